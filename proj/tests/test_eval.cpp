#include "iriseg/eval.hpp"

#include "iriseg/imageio.hpp"
#include "iriseg/rng.hpp"

#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <sstream>
#include <unistd.h>

using namespace iriseg;
namespace fs = std::filesystem;

namespace {

Mask random_mask(Rng& rng, int h, int w, double density) {
  Mask m(h, w);
  for (Eigen::Index i = 0; i < m.size(); ++i)
    m.data()[i] = rng.uniform() < density ? 1 : 0;
  return m;
}

long count_set(const Mask& m) {
  long n = 0;
  for (Eigen::Index i = 0; i < m.size(); ++i) n += m.data()[i] ? 1 : 0;
  return n;
}

PipelineParams synthetic_params() {
  PipelineParams p;
  p.edges.lambda_c = 0.05;  // tuned to the generator's iris/sclera contrast
  return p;
}

}  // namespace

TEST_CASE("accuracy error arithmetic") {
  Mask truth = Mask::Zero(240, 320);  // 76800 px
  Mask detected = Mask::Zero(240, 320);
  for (int k = 0; k < 10000; ++k) truth.data()[k] = 1;
  for (int k = 0; k < 9000; ++k) detected.data()[k] = 1;

  CHECK(accuracy_error(truth, truth) == 0.0);
  CHECK(accuracy_error(detected, truth) ==
        doctest::Approx(1000.0 / 76800.0 * 100.0).epsilon(1e-12));
  const Mask empty = Mask::Zero(240, 320);
  const double ae = accuracy_error(empty, truth);
  CHECK(ae == doctest::Approx(10000.0 / 76800.0 * 100.0).epsilon(1e-12));
  CHECK(ae > 10.0);  // an empty detection is a failure

  const Mask small = Mask::Zero(10, 10);
  CHECK_THROWS_AS(accuracy_error(small, truth), std::invalid_argument);
}

TEST_CASE("accuracy error is symmetric and scales with the count gap") {
  Rng rng(71);
  for (int trial = 0; trial < 20; ++trial) {
    const Mask a = random_mask(rng, 32, 32, rng.uniform(0.1, 0.9));
    const Mask b = random_mask(rng, 32, 32, rng.uniform(0.1, 0.9));
    CHECK(accuracy_error(a, b) == accuracy_error(b, a));
    const double expect =
        std::abs(static_cast<double>(count_set(a) - count_set(b))) / (32.0 * 32.0) * 100.0;
    CHECK(accuracy_error(a, b) == doctest::Approx(expect).epsilon(1e-12));
    if (count_set(a) == count_set(b)) CHECK(accuracy_error(a, b) == 0.0);
  }
}

TEST_CASE("accuracy rate counts the under-10-percent records") {
  std::vector<EvalRecord> records;
  for (int k = 0; k < 100; ++k) {
    EvalRecord r;
    r.ae = k == 57 ? 12.0 : 1.0;
    records.push_back(r);
  }
  CHECK(accuracy_rate(records) == doctest::Approx(99.0));
  for (auto& r : records) r.ae = 0.5;
  CHECK(accuracy_rate(records) == doctest::Approx(100.0));
  records.resize(5);
  for (auto& r : records) r.ae = 50.0;
  CHECK(accuracy_rate(records) == doctest::Approx(0.0));
  records.clear();
  CHECK_THROWS_AS(accuracy_rate(records), std::invalid_argument);
}

TEST_CASE("noise-free rendering hits the exact levels") {
  SyntheticEyeSpec spec;
  spec.seed = 5;
  const SyntheticEye eye = generate_eye(spec);
  const int cx = static_cast<int>(spec.iris.cx), cy = static_cast<int>(spec.iris.cy);
  CHECK(eye.image(cy, cx) == spec.level_pupil);
  CHECK(eye.image(cy, cx + static_cast<int>(spec.pupil.r + 8)) == spec.level_iris);
  CHECK(eye.image(cy, cx + static_cast<int>(spec.iris.r + 8)) == spec.level_sclera);
  CHECK(eye.image(10, 10) == spec.level_skin);
}

TEST_CASE("same seed renders bit-identical images") {
  SyntheticEyeSpec spec;
  spec.seed = 40;
  spec.noise = NoiseKind::Gaussian;
  spec.noise_strength = 0.05;
  spec.reflection_count = 2;
  const SyntheticEye a = generate_eye(spec);
  const SyntheticEye b = generate_eye(spec);
  CHECK((a.image == b.image).all());
  CHECK((a.truth == b.truth).all());
}

TEST_CASE("salt-and-pepper strength matches the flipped fraction") {
  SyntheticEyeSpec clean;
  clean.seed = 77;
  SyntheticEyeSpec noisy = clean;
  noisy.noise = NoiseKind::SaltPepper;
  noisy.noise_strength = 0.02;
  const SyntheticEye a = generate_eye(clean);
  const SyntheticEye b = generate_eye(noisy);
  long flipped = 0;
  for (Eigen::Index i = 0; i < a.image.size(); ++i)
    flipped += a.image.data()[i] != b.image.data()[i] ? 1 : 0;
  const double fraction = static_cast<double>(flipped) / a.image.size();
  CHECK(fraction >= 0.015);
  CHECK(fraction <= 0.025);
}

TEST_CASE("ground-truth annulus area matches the geometry") {
  SyntheticEyeSpec spec;
  spec.seed = 9;
  spec.pupil = {160.0, 120.0, 24.0};
  spec.iris = {160.0, 120.0, 64.0};
  const SyntheticEye eye = generate_eye(spec);
  const double expect = kPi * (64.0 * 64.0 - 24.0 * 24.0);
  CHECK(std::abs(count_set(eye.truth) - expect) / expect < 0.02);

  OcclusionArc arc;
  arc.span_deg = 90.0;
  arc.start_deg = 225.0;
  arc.depth = 20.0;
  spec.eyelids.push_back(arc);
  const SyntheticEye occluded = generate_eye(spec);
  CHECK(count_set(occluded.truth) < count_set(eye.truth));
}

TEST_CASE("bad geometry is rejected") {
  SyntheticEyeSpec spec;
  spec.pupil.r = 60.0;  // pupil bigger than iris
  CHECK_THROWS_AS(generate_eye(spec), std::invalid_argument);
  spec = SyntheticEyeSpec{};
  spec.iris.cx = 10.0;  // iris leaves the frame
  CHECK_THROWS_AS(generate_eye(spec), std::invalid_argument);
}

TEST_CASE("plan specs are deterministic and in range") {
  SynthPlan plan;
  plan.count = 30;
  plan.seed = 4242;
  for (int i = 0; i < plan.count; ++i) {
    const SyntheticEyeSpec a = plan_image_spec(plan, i);
    const SyntheticEyeSpec b = plan_image_spec(plan, i);
    CHECK(a.pupil.r == b.pupil.r);
    CHECK(a.iris.cx == b.iris.cx);
    CHECK(a.seed == b.seed);
    CHECK(a.pupil.r >= plan.pupil_r_min);
    CHECK(a.pupil.r <= plan.pupil_r_max);
    CHECK(a.iris.r <= plan.iris_r_max);
    CHECK(a.iris.r >= a.pupil.r + 28.0 - 1e-9);
    CHECK(a.iris.r <= 3.8 * a.pupil.r + 1e-9);
    CHECK_NOTHROW(a.validate());
  }
}

TEST_CASE("small clean corpus scores a perfect rate") {
  SynthPlan plan;
  plan.count = 8;
  plan.seed = 31337;
  const EvalReport report = run_corpus_synthetic(plan, synthetic_params(), 1);
  CHECK(report.ar == 100.0);
  CHECK(report.records.size() == 8);
  for (const auto& r : report.records) {
    CHECK(r.success);
    CHECK(r.ae < 10.0);
    CHECK(r.error.empty());
  }
  // Independent oracle for the rate aggregation.
  int successes = 0;
  for (const auto& r : report.records) successes += r.ae < 10.0 ? 1 : 0;
  CHECK(report.ar == doctest::Approx(100.0 * successes / 8.0));
}

TEST_CASE("parallel and sequential corpus runs agree") {
  SynthPlan plan;
  plan.count = 8;
  plan.seed = 55;
  plan.noise = NoiseKind::Gaussian;
  plan.noise_strength = 0.03;
  const EvalReport seq = run_corpus_synthetic(plan, synthetic_params(), 1);
  const EvalReport par = run_corpus_synthetic(plan, synthetic_params(), 4);
  REQUIRE(seq.records.size() == par.records.size());
  for (size_t i = 0; i < seq.records.size(); ++i) {
    CHECK(seq.records[i].id == par.records[i].id);
    CHECK(seq.records[i].ae == par.records[i].ae);  // bitwise
    CHECK(seq.records[i].success == par.records[i].success);
  }
  CHECK(seq.ar == par.ar);
  CHECK(seq.mean_ae == par.mean_ae);
}

TEST_CASE("directory corpus mode") {
  const fs::path dir =
      fs::temp_directory_path() / ("iriseg-eval-" + std::to_string(::getpid()));
  fs::create_directories(dir);

  SynthPlan plan;
  plan.count = 3;
  plan.seed = 808;
  for (int i = 0; i < plan.count; ++i) {
    const SyntheticEye eye = generate_eye(plan_image_spec(plan, i));
    const std::string base = (dir / ("eye-" + std::to_string(i))).string();
    save_pgm(base + ".pgm", eye.image);
    save_png_mask(base + ".truth.png", eye.truth);
  }
  const EvalReport report = run_corpus_directory(dir.string(), synthetic_params(), 2);
  CHECK(report.records.size() == 3);
  CHECK(report.ar == 100.0);

  // An image without a truth mask becomes a failed record, not an abort.
  save_pgm((dir / "orphan.pgm").string(), generate_eye(plan_image_spec(plan, 0)).image);
  const EvalReport with_orphan = run_corpus_directory(dir.string(), synthetic_params(), 1);
  CHECK(with_orphan.records.size() == 4);
  int failed = 0;
  for (const auto& r : with_orphan.records)
    if (!r.success) {
      ++failed;
      CHECK(r.error.find("truth") != std::string::npos);
    }
  CHECK(failed == 1);

  fs::remove_all(dir);
  fs::create_directories(dir);
  CHECK_THROWS_AS(run_corpus_directory(dir.string(), synthetic_params(), 1),
                  std::runtime_error);
  fs::remove_all(dir);
}

TEST_CASE("csv report shape") {
  SynthPlan plan;
  plan.count = 3;
  plan.seed = 2;
  const EvalReport report = run_corpus_synthetic(plan, synthetic_params(), 1);
  std::ostringstream os;
  write_report_csv(os, report);
  const std::string csv = os.str();
  CHECK(csv.rfind("id,ae_percent,success,ms\n", 0) == 0);
  CHECK(csv.find("synth-0000,") != std::string::npos);
  CHECK(csv.find("summary,ar=") != std::string::npos);
  size_t lines = 0;
  for (char ch : csv) lines += ch == '\n' ? 1 : 0;
  CHECK(lines == 5);  // header + 3 rows + summary
}

TEST_CASE("detected mask realizes the circles minus the occlusion") {
  SegmentationResult res;
  res.pupil = {60.0, 60.0, 20.0};
  res.iris = {60.0, 60.0, 50.0};
  const Mask m = detected_iris_mask(res, 120, 120);
  const double expect = kPi * (50.0 * 50.0 - 20.0 * 20.0);
  CHECK(std::abs(count_set(m) - expect) / expect < 0.02);
  CHECK(m(60, 60) == 0);           // pupil hole
  CHECK(m(60, 60 + 35) == 1);      // annulus
  CHECK(m(60, 115) == 0);          // outside the iris
}

#include "iriseg/eval.hpp"

#include "iriseg/imageio.hpp"
#include "iriseg/rng.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <ostream>
#include <stdexcept>
#include <thread>

namespace iriseg {

double accuracy_error(const Mask& detected, const Mask& truth) {
  if (detected.rows() != truth.rows() || detected.cols() != truth.cols())
    throw std::invalid_argument("mask dimensions differ");
  long na = 0, nd = 0;
  for (Eigen::Index i = 0; i < truth.size(); ++i) {
    na += truth.data()[i] ? 1 : 0;
    nd += detected.data()[i] ? 1 : 0;
  }
  const double total = static_cast<double>(truth.size());
  return std::abs(static_cast<double>(na - nd)) / total * 100.0;
}

double accuracy_rate(const std::vector<EvalRecord>& records) {
  if (records.empty()) throw std::invalid_argument("no records");
  int n = 0;
  for (const auto& r : records) n += r.ae < 10.0 ? 1 : 0;
  return 100.0 * n / static_cast<double>(records.size());
}

NoiseKind noise_kind_from_string(const std::string& name) {
  if (name == "none") return NoiseKind::None;
  if (name == "gaussian") return NoiseKind::Gaussian;
  if (name == "salt-pepper" || name == "saltpepper") return NoiseKind::SaltPepper;
  if (name == "speckle") return NoiseKind::Speckle;
  if (name == "poisson") return NoiseKind::Poisson;
  throw std::invalid_argument("unknown noise kind '" + name + "'");
}

std::string to_string(NoiseKind kind) {
  switch (kind) {
    case NoiseKind::None: return "none";
    case NoiseKind::Gaussian: return "gaussian";
    case NoiseKind::SaltPepper: return "salt-pepper";
    case NoiseKind::Speckle: return "speckle";
    case NoiseKind::Poisson: return "poisson";
  }
  return "none";
}

void SyntheticEyeSpec::validate() const {
  if (width < 32 || height < 32) throw std::invalid_argument("image too small");
  const double center_gap = std::hypot(pupil.cx - iris.cx, pupil.cy - iris.cy);
  if (!(pupil.r > 2.0) || !(iris.r > pupil.r + 6.0) ||
      center_gap + pupil.r >= iris.r)
    throw std::invalid_argument("invalid geometry: pupil must sit inside iris");
  if (iris.cx - iris.r < 0 || iris.cx + iris.r >= width || iris.cy - iris.r < 0 ||
      iris.cy + iris.r >= height)
    throw std::invalid_argument("invalid geometry: iris leaves the image");
  for (double v : {level_pupil, level_iris, level_sclera, level_skin, level_lid})
    if (v < 0.0 || v > 1.0) throw std::invalid_argument("levels must lie in [0,1]");
  for (const auto& arc : eyelids)
    if (arc.depth >= iris.r - pupil.r - 2.0)
      throw std::invalid_argument("invalid geometry: eyelid reaches the pupil");
  if (noise_strength < 0.0) throw std::invalid_argument("noise strength must be >= 0");
}

namespace {

/// Disc coverage with a one-pixel soft edge.
inline double coverage(double dist, double radius) {
  const double a = 0.5 + (radius - dist);
  return a < 0.0 ? 0.0 : (a > 1.0 ? 1.0 : a);
}

inline double mix(double base, double top, double alpha) {
  if (alpha <= 0.0) return base;
  if (alpha >= 1.0) return top;  // interior pixels take the level exactly
  return base + (top - base) * alpha;
}

}  // namespace

SyntheticEye generate_eye(const SyntheticEyeSpec& spec) {
  spec.validate();
  const int w = spec.width, h = spec.height;

  // Reflection spots live inside the pupil, like specular highlights.
  Rng geom(spec.seed);
  std::vector<Circle> spots;
  for (int k = 0; k < spec.reflection_count; ++k) {
    const double ang = geom.uniform(0.0, 2.0 * kPi);
    const double rad = geom.uniform(0.0, 0.5 * spec.pupil.r);
    spots.push_back(Circle{spec.pupil.cx + rad * std::cos(ang),
                           spec.pupil.cy + rad * std::sin(ang),
                           std::max(1.5, spec.reflection_radius)});
  }

  // Visible eye opening: an ellipse of sclera in the skin, wide enough that
  // its rim stays clear of the limbic search band.
  const double ell_a = 1.9 * spec.iris.r;
  const double ell_b = 1.3 * spec.iris.r;

  SyntheticEye eye;
  eye.pupil = spec.pupil;
  eye.iris = spec.iris;
  eye.image = Image(h, w);
  eye.truth = Mask::Zero(h, w);

  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const double dix = x - spec.iris.cx, diy = y - spec.iris.cy;
      const double di = std::hypot(dix, diy);
      const double dp = std::hypot(x - spec.pupil.cx, y - spec.pupil.cy);

      const double ex = dix / ell_a, ey = diy / ell_b;
      double v = (ex * ex + ey * ey <= 1.0) ? spec.level_sclera : spec.level_skin;
      v = mix(v, spec.level_iris, coverage(di, spec.iris.r));
      v = mix(v, spec.level_pupil, coverage(dp, spec.pupil.r));
      for (const auto& spot : spots)
        v = mix(v, 0.95, coverage(std::hypot(x - spot.cx, y - spot.cy), spot.r));

      bool lid_here = false;
      const double angle = wrap_angle(std::atan2(diy, dix));
      for (const auto& arc : spec.eyelids) {
        const double start = arc.start_deg * kPi / 180.0;
        const double span = arc.span_deg * kPi / 180.0;
        if (wrap_angle(angle - start) <= span && di >= spec.iris.r - arc.depth &&
            di <= spec.iris.r + arc.extend) {
          lid_here = true;
          break;
        }
      }
      if (lid_here) v = spec.level_lid;

      eye.image(y, x) = v;
      // Ground truth uses the exact geometry, no anti-aliasing.
      if (di < spec.iris.r && dp > spec.pupil.r) {
        bool covered = false;
        for (const auto& arc : spec.eyelids) {
          const double start = arc.start_deg * kPi / 180.0;
          const double span = arc.span_deg * kPi / 180.0;
          if (wrap_angle(angle - start) <= span && di >= spec.iris.r - arc.depth) {
            covered = true;
            break;
          }
        }
        if (!covered) eye.truth(y, x) = 1;
      }
    }
  }

  if (spec.noise != NoiseKind::None && spec.noise_strength > 0.0) {
    Rng rng(Rng::mix(spec.seed, 0x6e6f697365ULL));  // independent noise stream
    double* px = eye.image.data();
    const double s = spec.noise_strength;
    for (Eigen::Index i = 0; i < eye.image.size(); ++i) {
      double v = px[i];
      switch (spec.noise) {
        case NoiseKind::Gaussian:
          v += s * rng.normal();
          break;
        case NoiseKind::SaltPepper:
          if (rng.uniform() < s) v = rng.uniform() < 0.5 ? 0.0 : 1.0;
          break;
        case NoiseKind::Speckle:
          v += v * s * rng.normal();
          break;
        case NoiseKind::Poisson: {
          const double q = 1.0 / (s * s);  // photons at full scale
          v = rng.poisson(v * q) / q;
          break;
        }
        case NoiseKind::None:
          break;
      }
      px[i] = v < 0.0 ? 0.0 : (v > 1.0 ? 1.0 : v);
    }
  }
  return eye;
}

void SynthPlan::validate() const {
  if (count < 1) throw std::invalid_argument("plan count must be >= 1");
  if (width < 64 || height < 64) throw std::invalid_argument("plan image too small");
  if (!(pupil_r_min >= 4.0 && pupil_r_min <= pupil_r_max))
    throw std::invalid_argument("bad pupil radius range");
  if (!(iris_r_min <= iris_r_max)) throw std::invalid_argument("bad iris radius range");
  if (occlusion_deg_min < 0.0 || occlusion_deg_max > 160.0 ||
      occlusion_deg_min > occlusion_deg_max)
    throw std::invalid_argument("bad occlusion range");
  if (noise_strength < 0.0) throw std::invalid_argument("bad noise strength");
}

SyntheticEyeSpec plan_image_spec(const SynthPlan& plan, int index) {
  plan.validate();
  Rng rng(Rng::mix(plan.seed, static_cast<std::uint64_t>(index)));

  SyntheticEyeSpec spec;
  spec.width = plan.width;
  spec.height = plan.height;
  spec.seed = Rng::mix(plan.seed, static_cast<std::uint64_t>(index) + 0x100000ULL);

  const double rp = rng.uniform(plan.pupil_r_min, plan.pupil_r_max);
  // The limbic search reaches 4 pupil radii; keep the iris within it and
  // leave a workable annulus width.
  const double lo = std::max(plan.iris_r_min, rp + 28.0);
  const double hi = std::max(lo, std::min(plan.iris_r_max, 3.8 * rp));
  const double ri = rng.uniform(lo, hi);

  const double max_jitter_x = plan.width / 2.0 - ri - 6.0;
  const double max_jitter_y = plan.height / 2.0 - ri - 6.0;
  const double jx = std::min(plan.center_jitter, std::max(0.0, max_jitter_x));
  const double jy = std::min(plan.center_jitter, std::max(0.0, max_jitter_y));
  spec.iris.cx = plan.width / 2.0 + rng.uniform(-jx, jx);
  spec.iris.cy = plan.height / 2.0 + rng.uniform(-jy, jy);
  spec.iris.r = ri;
  spec.pupil.cx = spec.iris.cx + rng.uniform(-3.0, 3.0);
  spec.pupil.cy = spec.iris.cy + rng.uniform(-3.0, 3.0);
  spec.pupil.r = rp;

  if (plan.occlusion_deg_max > 0.0) {
    OcclusionArc arc;
    arc.span_deg = rng.uniform(plan.occlusion_deg_min, plan.occlusion_deg_max);
    arc.start_deg = 270.0 - arc.span_deg / 2.0;  // centered on the upper lid
    arc.depth = std::min(0.20 * ri + 6.0, ri - rp - 4.0);
    arc.extend = 0.20 * ri + 6.0;
    if (arc.span_deg > 1.0) spec.eyelids.push_back(arc);
  }
  spec.reflection_count = plan.reflections;
  spec.noise = plan.noise;
  spec.noise_strength = plan.noise_strength;
  return spec;
}

Mask detected_iris_mask(const SegmentationResult& result, int width, int height) {
  Mask out = Mask::Zero(height, width);
  const bool have_occlusion = result.occlusion.size() == out.size();
  for (int y = 0; y < height; ++y)
    for (int x = 0; x < width; ++x) {
      const double di = std::hypot(x - result.iris.cx, y - result.iris.cy);
      if (di >= result.iris.r) continue;
      const double dp = std::hypot(x - result.pupil.cx, y - result.pupil.cy);
      if (dp <= result.pupil.r) continue;
      if (have_occlusion && result.occlusion(y, x)) continue;
      out(y, x) = 1;
    }
  return out;
}

namespace {

EvalRecord evaluate_one(const std::string& id, const Image& img,
                        const Mask& truth, const PipelineParams& params) {
  EvalRecord rec;
  rec.id = id;
  const auto t0 = std::chrono::steady_clock::now();
  try {
    const SegmentationResult result = segment(img, params);
    const Mask detected = detected_iris_mask(result, static_cast<int>(img.cols()),
                                             static_cast<int>(img.rows()));
    rec.ae = accuracy_error(detected, truth);
  } catch (const std::exception& e) {
    rec.error = e.what();
    rec.ae = accuracy_error(Mask::Zero(truth.rows(), truth.cols()), truth);
  }
  const auto t1 = std::chrono::steady_clock::now();
  rec.ms = std::chrono::duration<double, std::milli>(t1 - t0).count();
  rec.success = rec.ae < 10.0;
  return rec;
}

void finalize_report(EvalReport& report) {
  report.ar = accuracy_rate(report.records);
  std::vector<double> aes;
  double sum_ae = 0.0, sum_ms = 0.0;
  for (const auto& r : report.records) {
    aes.push_back(r.ae);
    sum_ae += r.ae;
    sum_ms += r.ms;
  }
  report.mean_ae = sum_ae / aes.size();
  report.mean_ms = sum_ms / aes.size();
  std::sort(aes.begin(), aes.end());
  const size_t n = aes.size();
  report.median_ae = n % 2 ? aes[n / 2] : 0.5 * (aes[n / 2 - 1] + aes[n / 2]);
}

/// Runs worker(i) for i in [0,count) on up to `jobs` threads. Output slots
/// are per-index, so the result does not depend on scheduling.
template <class Fn>
void parallel_indexed(int count, int jobs, Fn&& worker) {
  jobs = std::max(1, std::min(jobs, count));
  if (jobs == 1) {
    for (int i = 0; i < count; ++i) worker(i);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::thread> pool;
  pool.reserve(jobs);
  for (int t = 0; t < jobs; ++t)
    pool.emplace_back([&]() {
      for (int i = next.fetch_add(1); i < count; i = next.fetch_add(1)) worker(i);
    });
  for (auto& th : pool) th.join();
}

std::string synth_id(int index) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "synth-%04d", index);
  return buf;
}

}  // namespace

EvalReport run_corpus_synthetic(const SynthPlan& plan,
                                const PipelineParams& params, int jobs) {
  plan.validate();
  params.validate();
  EvalReport report;
  report.records.resize(plan.count);
  parallel_indexed(plan.count, jobs, [&](int i) {
    const SyntheticEye eye = generate_eye(plan_image_spec(plan, i));
    report.records[i] = evaluate_one(synth_id(i), eye.image, eye.truth, params);
  });
  finalize_report(report);
  return report;
}

EvalReport run_corpus_directory(const std::string& dir,
                                const PipelineParams& params, int jobs) {
  namespace fs = std::filesystem;
  params.validate();
  if (!fs::is_directory(dir)) throw std::runtime_error(dir + ": not a directory");

  std::vector<fs::path> images;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (!entry.is_regular_file()) continue;
    const std::string name = entry.path().filename().string();
    const std::string ext = entry.path().extension().string();
    if (name.size() > 10 && name.find(".truth.png") != std::string::npos) continue;
    if (ext == ".pgm" || ext == ".png") images.push_back(entry.path());
  }
  std::sort(images.begin(), images.end());
  if (images.empty()) throw std::runtime_error(dir + ": no images found");

  EvalReport report;
  report.records.resize(images.size());
  parallel_indexed(static_cast<int>(images.size()), jobs, [&](int i) {
    const fs::path& img_path = images[i];
    const std::string id = img_path.stem().string();
    EvalRecord rec;
    rec.id = id;
    try {
      const Image img = load_image(img_path.string());
      fs::path truth_path = img_path;
      truth_path.replace_extension();
      truth_path += ".truth.png";
      if (!fs::exists(truth_path))
        throw std::runtime_error("missing truth mask " + truth_path.filename().string());
      const Image truth_img = load_image(truth_path.string());
      if (truth_img.rows() != img.rows() || truth_img.cols() != img.cols())
        throw std::runtime_error("truth mask dimensions differ");
      const Mask truth = (truth_img > 0.5).cast<std::uint8_t>();
      rec = evaluate_one(id, img, truth, params);
    } catch (const std::exception& e) {
      rec.ae = 100.0;
      rec.success = false;
      rec.error = e.what();
    }
    report.records[i] = rec;
  });
  finalize_report(report);
  return report;
}

void write_report_csv(std::ostream& os, const EvalReport& report) {
  os << "id,ae_percent,success,ms\n";
  char buf[64];
  for (const auto& r : report.records) {
    std::snprintf(buf, sizeof(buf), "%.6f", r.ae);
    os << r.id << "," << buf << "," << (r.success ? 1 : 0) << ",";
    std::snprintf(buf, sizeof(buf), "%.3f", r.ms);
    os << buf << "\n";
  }
  os << report_summary(report) << "\n";
}

std::string report_summary(const EvalReport& report) {
  char buf[160];
  std::snprintf(buf, sizeof(buf),
                "summary,ar=%.4f,mean_ae=%.6f,median_ae=%.6f,mean_ms=%.3f,n=%zu",
                report.ar, report.mean_ae, report.median_ae, report.mean_ms,
                report.records.size());
  return buf;
}

}  // namespace iriseg

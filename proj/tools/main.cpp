#include "iriseg/boundary.hpp"
#include "iriseg/config.hpp"
#include "iriseg/edges.hpp"
#include "iriseg/eval.hpp"
#include "iriseg/filters.hpp"
#include "iriseg/imageio.hpp"
#include "iriseg/pupil.hpp"
#include "iriseg/render.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

namespace {

namespace fs = std::filesystem;
using namespace iriseg;

constexpr int kExitOk = 0;
constexpr int kExitPipeline = 1;
constexpr int kExitUsage = 2;
constexpr int kExitBudget = 3;

/// Parameter overrides shared by every subcommand. Flags beat environment
/// variables beat the --config file beat built-in defaults.
struct ParamFlags {
  std::optional<double> t1, t2, r_avg, lambda_a, lambda_c, sigma_zc, grow_tol,
      stable_halfwidth, inlier_tol;
  std::optional<int> min_component, open_radius;
  std::string config_path;
  bool print_config = false;

  void attach(CLI::App* cmd) {
    cmd->add_option("--config", config_path, "key=value parameter file")
        ->envname("IRISEG_CONFIG");
    cmd->add_option("--t1", t1, "lower tri-level threshold")->envname("IRISEG_T1");
    cmd->add_option("--t2", t2, "upper tri-level threshold")->envname("IRISEG_T2");
    cmd->add_option("--r-avg", r_avg, "expected pupil radius (coarse LoG scale)")
        ->envname("IRISEG_R_AVG");
    cmd->add_option("--lambda-a", lambda_a, "seed mask threshold")
        ->envname("IRISEG_LAMBDA_A");
    cmd->add_option("--lambda-c", lambda_c, "zero-crossing gradient threshold")
        ->envname("IRISEG_LAMBDA_C");
    cmd->add_option("--sigma-zc", sigma_zc, "zero-crossing LoG sigma")
        ->envname("IRISEG_SIGMA_ZC");
    cmd->add_option("--min-component", min_component,
                    "smallest edge component kept, px")
        ->envname("IRISEG_MIN_COMPONENT");
    cmd->add_option("--grow-tol", grow_tol, "region growing tolerance")
        ->envname("IRISEG_GROW_TOL");
    cmd->add_option("--open-radius", open_radius, "opening disc radius, px")
        ->envname("IRISEG_OPEN_RADIUS");
    cmd->add_option("--stable-halfwidth", stable_halfwidth,
                    "stable zone halfwidth, radians")
        ->envname("IRISEG_STABLE_HALFWIDTH");
    cmd->add_option("--inlier-tol", inlier_tol, "circle fit inlier tolerance, px")
        ->envname("IRISEG_INLIER_TOL");
    cmd->add_flag("--print-config", print_config,
                  "print the effective parameters and exit");
  }

  PipelineParams resolve() const {
    PipelineParams p;
    if (!config_path.empty()) p = load_params(config_path);
    if (t1) p.pupil.t1 = *t1;
    if (t2) p.pupil.t2 = *t2;
    if (r_avg) p.pupil.r_avg = *r_avg;
    if (lambda_a) p.pupil.lambda_a = *lambda_a;
    if (grow_tol) p.pupil.grow_tolerance = *grow_tol;
    if (open_radius) p.pupil.open_radius = *open_radius;
    if (sigma_zc) p.edges.sigma_zc = *sigma_zc;
    if (lambda_c) p.edges.lambda_c = *lambda_c;
    if (min_component) p.edges.min_component = *min_component;
    if (stable_halfwidth) p.boundary.stable_halfwidth = *stable_halfwidth;
    if (inlier_tol) p.boundary.inlier_tol = *inlier_tol;
    p.validate();
    return p;
  }

  /// Handles --print-config; returns true when the command should stop.
  bool maybe_print(const PipelineParams& p) const {
    if (!print_config) return false;
    for (const auto& [key, value] : params_to_map(p))
      std::cout << key << "=" << value << "\n";
    return true;
  }
};

void write_debug_dumps(const Image& img, const PipelineParams& p,
                       const fs::path& base) {
  const Image smooth = morph_open(img, StructuringElement{p.pupil.open_radius});
  const Image tri = to_trilevel(smooth, p.pupil.t1, p.pupil.t2);
  const Image resp = coarse_log_response(tri, p.pupil.r_avg);
  save_png_gray(base.string() + ".debug.smooth.png", smooth);
  save_png_gray(base.string() + ".debug.trilevel.png", tri);
  save_png_gray(base.string() + ".debug.logresp.png", resp);
  save_png_mask(base.string() + ".debug.seedmask.png",
                seed_mask(resp, p.pupil.lambda_a));
  save_png_mask(base.string() + ".debug.edges.png",
                clean_components(zero_crossings(smooth, p.edges),
                                 p.edges.min_component));
}

int cmd_segment(const std::string& input, const std::string& outdir,
                bool debug, const ParamFlags& flags) {
  const PipelineParams params = flags.resolve();
  if (flags.maybe_print(params)) return kExitOk;

  const Image img = load_image(input);
  fs::path base = fs::path(outdir) / fs::path(input).stem();
  fs::create_directories(outdir);

  SegmentationResult result;
  try {
    result = segment(img, params);
  } catch (const StageError& e) {
    std::cerr << "segmentation failed: " << e.what() << "\n";
    if (debug) write_debug_dumps(img, params, base);
    return kExitPipeline;
  }

  std::ofstream rec(base.string() + ".result.json");
  rec << result_to_json(fs::path(input).stem().string(), result) << "\n";
  save_png_rgb(base.string() + ".overlay.png", render_overlay(img, result));
  if (debug) write_debug_dumps(img, params, base);

  std::printf("pupil  (%.2f, %.2f) r=%.2f%s\n", result.pupil.cx, result.pupil.cy,
              result.pupil.r, result.pupil_refined ? "" : " (coarse)");
  std::printf("iris   (%.2f, %.2f) r=%.2f\n", result.iris.cx, result.iris.cy,
              result.iris.r);
  std::printf("orientation %.4f rad%s, %zu occluded run(s)\n", result.orientation,
              result.orientation_low_confidence ? " (low confidence)" : "",
              result.gap_runs.size());
  return kExitOk;
}

EvalReport run_eval(const std::string& corpus, const std::string& plan_path,
                    std::optional<std::uint64_t> seed, const PipelineParams& params,
                    int jobs) {
  if (!corpus.empty()) return run_corpus_directory(corpus, params, jobs);
  SynthPlan plan = load_plan(plan_path);
  if (seed) plan.seed = *seed;
  return run_corpus_synthetic(plan, params, jobs);
}

int cmd_eval(const std::string& corpus, const std::string& plan_path,
             std::optional<std::uint64_t> seed, const std::string& out_csv,
             int jobs, const ParamFlags& flags) {
  const PipelineParams params = flags.resolve();
  if (flags.maybe_print(params)) return kExitOk;

  const EvalReport report = run_eval(corpus, plan_path, seed, params, jobs);
  if (!out_csv.empty()) {
    std::ofstream out(out_csv);
    if (!out) throw std::runtime_error(out_csv + ": cannot write report");
    write_report_csv(out, report);
  } else {
    write_report_csv(std::cout, report);
  }
  std::printf("Ar=%.2f%%  mean Ae=%.3f%%  median Ae=%.3f%%  mean=%.1f ms  (n=%zu)\n",
              report.ar, report.mean_ae, report.median_ae, report.mean_ms,
              report.records.size());
  return kExitOk;
}

int cmd_synth(const std::string& plan_path, std::optional<std::uint64_t> seed,
              const std::string& outdir) {
  SynthPlan plan = load_plan(plan_path);
  if (seed) plan.seed = *seed;
  fs::create_directories(outdir);
  for (int i = 0; i < plan.count; ++i) {
    const SyntheticEye eye = generate_eye(plan_image_spec(plan, i));
    char name[32];
    std::snprintf(name, sizeof(name), "synth-%04d", i);
    save_pgm((fs::path(outdir) / (std::string(name) + ".pgm")).string(), eye.image);
    save_png_mask((fs::path(outdir) / (std::string(name) + ".truth.png")).string(),
                  eye.truth);
  }
  std::printf("wrote %d image/truth pairs to %s\n", plan.count, outdir.c_str());
  return kExitOk;
}

double percentile95(std::vector<double> v) {
  if (v.empty()) return 0.0;
  std::sort(v.begin(), v.end());
  const size_t idx = static_cast<size_t>(0.95 * (v.size() - 1) + 0.5);
  return v[std::min(idx, v.size() - 1)];
}

int cmd_bench(const std::string& corpus, const std::string& plan_path,
              std::optional<std::uint64_t> seed, double budget_ms, int jobs,
              const ParamFlags& flags) {
  const PipelineParams params = flags.resolve();
  if (flags.maybe_print(params)) return kExitOk;

  // Segmentation only is timed; decode and synthesis stay outside the clock.
  std::vector<Image> images;
  if (!corpus.empty()) {
    for (const auto& entry : fs::directory_iterator(corpus)) {
      if (!entry.is_regular_file()) continue;
      const std::string name = entry.path().filename().string();
      if (name.find(".truth.png") != std::string::npos) continue;
      const std::string ext = entry.path().extension().string();
      if (ext == ".pgm" || ext == ".png") images.push_back(load_image(entry.path().string()));
    }
  } else {
    SynthPlan plan = load_plan(plan_path);
    if (seed) plan.seed = *seed;
    for (int i = 0; i < plan.count; ++i)
      images.push_back(generate_eye(plan_image_spec(plan, i)).image);
  }
  if (images.size() < 10)
    throw std::runtime_error("bench needs at least 10 images for stable averages");

  std::vector<std::string> stage_names;
  std::vector<std::vector<double>> stage_ms;
  std::vector<double> total_ms;
  int failures = 0;
  (void)jobs;  // timings are per image; a warm single lane keeps them stable
  for (const Image& img : images) {
    SegmentationResult result;
    try {
      result = segment(img, params);
    } catch (const StageError&) {
      ++failures;
      continue;
    }
    double total = 0.0;
    for (size_t s = 0; s < result.timings.size(); ++s) {
      if (s >= stage_names.size()) {
        stage_names.push_back(result.timings[s].name);
        stage_ms.emplace_back();
      }
      stage_ms[s].push_back(result.timings[s].ms);
      total += result.timings[s].ms;
    }
    total_ms.push_back(total);
  }
  if (total_ms.empty()) throw std::runtime_error("every image failed to segment");

  std::printf("%-12s %10s %10s\n", "stage", "mean ms", "p95 ms");
  for (size_t s = 0; s < stage_names.size(); ++s) {
    double mean = 0.0;
    for (double v : stage_ms[s]) mean += v;
    mean /= stage_ms[s].size();
    std::printf("%-12s %10.2f %10.2f\n", stage_names[s].c_str(), mean,
                percentile95(stage_ms[s]));
  }
  double mean_total = 0.0;
  for (double v : total_ms) mean_total += v;
  mean_total /= total_ms.size();
  std::printf("%-12s %10.2f %10.2f\n", "total", mean_total, percentile95(total_ms));
  std::printf("images=%zu failures=%d budget_ms=%.1f\n", total_ms.size(), failures,
              budget_ms);

  if (mean_total > budget_ms) {
    std::printf("budget exceeded: mean %.2f ms > %.1f ms\n", mean_total, budget_ms);
    return kExitBudget;
  }
  std::printf("within budget\n");
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Two-stage iris segmentation: coarse LoG blob detection with "
               "region growing, refined by LoG zero-crossing boundaries"};
  app.require_subcommand(1);

  // segment
  std::string seg_input, seg_outdir = ".";
  bool seg_debug = false;
  ParamFlags seg_flags;
  CLI::App* seg = app.add_subcommand("segment", "segment one eye image");
  seg->add_option("image", seg_input, "input image (8-bit PGM or PNG)")->required();
  seg->add_option("-o,--out", seg_outdir, "output directory");
  seg->add_flag("--debug", seg_debug, "dump per-stage rasters");
  seg_flags.attach(seg);

  // eval
  std::string eval_corpus, eval_plan, eval_csv;
  std::optional<std::uint64_t> eval_seed;
  int eval_jobs = 1;
  ParamFlags eval_flags;
  CLI::App* ev = app.add_subcommand("eval", "evaluate a corpus and report Ae/Ar");
  ev->add_option("--corpus", eval_corpus, "directory of images with .truth.png masks");
  ev->add_option("--plan", eval_plan, "synthetic corpus plan file");
  ev->add_option("--out", eval_csv, "CSV report path (default: stdout)");
  ev->add_option("--jobs", eval_jobs, "parallel workers")->envname("IRISEG_JOBS");
  ev->add_option("--seed", eval_seed, "override the plan seed")->envname("IRISEG_SEED");
  eval_flags.attach(ev);

  // synth
  std::string synth_plan, synth_out;
  std::optional<std::uint64_t> synth_seed;
  CLI::App* sy = app.add_subcommand("synth", "materialize a synthetic corpus");
  sy->add_option("--plan", synth_plan, "plan file")->required();
  sy->add_option("--out", synth_out, "output directory")->required();
  sy->add_option("--seed", synth_seed, "override the plan seed")->envname("IRISEG_SEED");

  // bench
  std::string bench_corpus, bench_plan;
  std::optional<std::uint64_t> bench_seed;
  double budget_ms = 500.0;
  int bench_jobs = 1;
  ParamFlags bench_flags;
  CLI::App* be = app.add_subcommand("bench", "timing report with a budget gate");
  be->add_option("--corpus", bench_corpus, "directory of images");
  be->add_option("--plan", bench_plan, "synthetic corpus plan file");
  be->add_option("--budget-ms", budget_ms, "fail when mean total exceeds this")
      ->envname("IRISEG_BUDGET_MS");
  be->add_option("--jobs", bench_jobs, "parallel workers")->envname("IRISEG_JOBS");
  be->add_option("--seed", bench_seed, "override the plan seed")->envname("IRISEG_SEED");
  bench_flags.attach(be);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (seg->parsed()) return cmd_segment(seg_input, seg_outdir, seg_debug, seg_flags);
    if (ev->parsed()) {
      if (eval_corpus.empty() == eval_plan.empty())
        throw std::invalid_argument("eval needs exactly one of --corpus or --plan");
      return cmd_eval(eval_corpus, eval_plan, eval_seed, eval_csv, eval_jobs,
                      eval_flags);
    }
    if (sy->parsed()) return cmd_synth(synth_plan, synth_seed, synth_out);
    if (be->parsed()) {
      if (bench_corpus.empty() == bench_plan.empty())
        throw std::invalid_argument("bench needs exactly one of --corpus or --plan");
      return cmd_bench(bench_corpus, bench_plan, bench_seed, budget_ms, bench_jobs,
                       bench_flags);
    }
  } catch (const StageError& e) {
    std::cerr << "pipeline failure: " << e.what() << "\n";
    return kExitPipeline;
  } catch (const std::invalid_argument& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitPipeline;
  }
  return kExitUsage;
}

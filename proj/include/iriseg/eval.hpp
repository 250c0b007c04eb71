#ifndef IRISEG_EVAL_HPP
#define IRISEG_EVAL_HPP

#include "iriseg/boundary.hpp"
#include "iriseg/core.hpp"

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace iriseg {

/// Per-image accuracy error: |count(truth) - count(detected)| divided by the
/// total pixel count, as a percentage. Throws on dimension mismatch.
double accuracy_error(const Mask& detected, const Mask& truth);

struct EvalRecord {
  std::string id;
  double ae = 100.0;
  bool success = false;  ///< ae < 10
  double ms = 0.0;
  std::string error;  ///< stage message when segmentation failed
};

/// Percentage of records with ae < 10. Throws on an empty list.
double accuracy_rate(const std::vector<EvalRecord>& records);

enum class NoiseKind { None, Gaussian, SaltPepper, Speckle, Poisson };

NoiseKind noise_kind_from_string(const std::string& name);
std::string to_string(NoiseKind kind);

/// Eyelid occlusion: the angular run [start, start+span] of the iris rim is
/// covered by lid-level pixels from radius iris.r - depth out to
/// iris.r + extend.
struct OcclusionArc {
  double start_deg = 0.0;
  double span_deg = 0.0;
  double depth = 22.0;
  double extend = 24.0;
};

struct SyntheticEyeSpec {
  int width = 320;
  int height = 240;
  Circle pupil{160.0, 120.0, 26.0};
  Circle iris{160.0, 120.0, 65.0};
  std::vector<OcclusionArc> eyelids;
  double level_pupil = 0.05;
  double level_iris = 0.40;
  double level_sclera = 0.90;
  double level_skin = 0.65;
  double level_lid = 0.65;
  NoiseKind noise = NoiseKind::None;
  double noise_strength = 0.0;
  int reflection_count = 0;
  double reflection_radius = 3.0;
  std::uint64_t seed = 0;

  void validate() const;
};

struct SyntheticEye {
  Image image;
  Mask truth;  ///< actual iris pixels: annulus minus eyelid coverage
  Circle pupil;
  Circle iris;
};

/// Renders a synthetic eye with ground truth. Deterministic given the seed.
SyntheticEye generate_eye(const SyntheticEyeSpec& spec);

struct EvalReport {
  std::vector<EvalRecord> records;
  double ar = 0.0;
  double mean_ae = 0.0;
  double median_ae = 0.0;
  double mean_ms = 0.0;
};

/// Randomized corpus description; image i is derived deterministically from
/// (seed, i) so parallel and sequential runs see identical inputs.
struct SynthPlan {
  int count = 100;
  int width = 320;
  int height = 240;
  double pupil_r_min = 18.0;
  double pupil_r_max = 35.0;
  double iris_r_min = 50.0;
  double iris_r_max = 90.0;
  double center_jitter = 20.0;
  NoiseKind noise = NoiseKind::None;
  double noise_strength = 0.0;
  double occlusion_deg_min = 0.0;
  double occlusion_deg_max = 0.0;
  int reflections = 0;
  std::uint64_t seed = 1;

  void validate() const;
};

/// Geometry and noise of the index-th image of the plan.
SyntheticEyeSpec plan_image_spec(const SynthPlan& plan, int index);

/// Filled iris annulus of the result minus its occlusion mask.
Mask detected_iris_mask(const SegmentationResult& result, int width,
                        int height);

/// Segments every image of the plan and aggregates Ae/Ar. Images are
/// processed in parallel up to `jobs` workers; records keep plan order.
EvalReport run_corpus_synthetic(const SynthPlan& plan,
                                const PipelineParams& params, int jobs);

/// Directory mode: every *.pgm/*.png image (excluding *.truth.png) must have
/// a <name>.truth.png mask, white = iris pixel. Unreadable images or missing
/// truth masks become failed records; the run continues.
EvalReport run_corpus_directory(const std::string& dir,
                                const PipelineParams& params, int jobs);

/// CSV report: header, one row per image (id, ae, success, ms), and a final
/// summary row.
void write_report_csv(std::ostream& os, const EvalReport& report);

std::string report_summary(const EvalReport& report);

}  // namespace iriseg

#endif  // IRISEG_EVAL_HPP

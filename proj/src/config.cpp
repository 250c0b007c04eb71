#include "iriseg/config.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace iriseg {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

double to_double(const std::string& key, const std::string& value) {
  size_t pos = 0;
  double v = 0.0;
  try {
    v = std::stod(value, &pos);
  } catch (const std::exception&) {
    throw std::invalid_argument("config key '" + key + "': bad number '" + value + "'");
  }
  if (pos != value.size())
    throw std::invalid_argument("config key '" + key + "': bad number '" + value + "'");
  return v;
}

int to_int(const std::string& key, const std::string& value) {
  const double v = to_double(key, value);
  const int i = static_cast<int>(v);
  if (static_cast<double>(i) != v)
    throw std::invalid_argument("config key '" + key + "': expected integer");
  return i;
}

std::uint64_t to_u64(const std::string& key, const std::string& value) {
  try {
    return std::stoull(value);
  } catch (const std::exception&) {
    throw std::invalid_argument("config key '" + key + "': bad seed '" + value + "'");
  }
}

std::string fmt(double v) {
  char buf[40];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);  // shortest exact round-trip form
}

}  // namespace

std::map<std::string, std::string> parse_key_values(const std::string& text) {
  std::map<std::string, std::string> kv;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("config line " + std::to_string(lineno) +
                                  ": expected key=value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) throw std::invalid_argument("config line " + std::to_string(lineno) + ": empty key");
    kv[key] = value;
  }
  return kv;
}

std::map<std::string, std::string> read_key_values(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error(path + ": cannot open config file");
  std::ostringstream text;
  text << in.rdbuf();
  return parse_key_values(text.str());
}

PipelineParams params_from_map(const std::map<std::string, std::string>& kv,
                               PipelineParams base) {
  for (const auto& [key, value] : kv) {
    if (key == "t1") base.pupil.t1 = to_double(key, value);
    else if (key == "t2") base.pupil.t2 = to_double(key, value);
    else if (key == "r_avg") base.pupil.r_avg = to_double(key, value);
    else if (key == "lambda_a") base.pupil.lambda_a = to_double(key, value);
    else if (key == "grow_tolerance") base.pupil.grow_tolerance = to_double(key, value);
    else if (key == "open_radius") base.pupil.open_radius = to_int(key, value);
    else if (key == "sigma_zc") base.edges.sigma_zc = to_double(key, value);
    else if (key == "lambda_c") base.edges.lambda_c = to_double(key, value);
    else if (key == "min_component") base.edges.min_component = to_int(key, value);
    else if (key == "stable_halfwidth") base.boundary.stable_halfwidth = to_double(key, value);
    else if (key == "inlier_tol") base.boundary.inlier_tol = to_double(key, value);
    else throw std::invalid_argument("unknown config key '" + key + "'");
  }
  base.validate();
  return base;
}

std::map<std::string, std::string> params_to_map(const PipelineParams& p) {
  std::map<std::string, std::string> kv;
  kv["t1"] = fmt(p.pupil.t1);
  kv["t2"] = fmt(p.pupil.t2);
  kv["r_avg"] = fmt(p.pupil.r_avg);
  kv["lambda_a"] = fmt(p.pupil.lambda_a);
  kv["grow_tolerance"] = fmt(p.pupil.grow_tolerance);
  kv["open_radius"] = std::to_string(p.pupil.open_radius);
  kv["sigma_zc"] = fmt(p.edges.sigma_zc);
  kv["lambda_c"] = fmt(p.edges.lambda_c);
  kv["min_component"] = std::to_string(p.edges.min_component);
  kv["stable_halfwidth"] = fmt(p.boundary.stable_halfwidth);
  kv["inlier_tol"] = fmt(p.boundary.inlier_tol);
  return kv;
}

PipelineParams load_params(const std::string& path, PipelineParams base) {
  return params_from_map(read_key_values(path), base);
}

void save_params(const std::string& path, const PipelineParams& p) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error(path + ": cannot write config file");
  for (const auto& [key, value] : params_to_map(p)) out << key << "=" << value << "\n";
}

SynthPlan plan_from_map(const std::map<std::string, std::string>& kv) {
  SynthPlan plan;
  for (const auto& [key, value] : kv) {
    if (key == "count") plan.count = to_int(key, value);
    else if (key == "width") plan.width = to_int(key, value);
    else if (key == "height") plan.height = to_int(key, value);
    else if (key == "pupil_r_min") plan.pupil_r_min = to_double(key, value);
    else if (key == "pupil_r_max") plan.pupil_r_max = to_double(key, value);
    else if (key == "iris_r_min") plan.iris_r_min = to_double(key, value);
    else if (key == "iris_r_max") plan.iris_r_max = to_double(key, value);
    else if (key == "center_jitter") plan.center_jitter = to_double(key, value);
    else if (key == "noise") plan.noise = noise_kind_from_string(value);
    else if (key == "noise_strength") plan.noise_strength = to_double(key, value);
    else if (key == "occlusion_deg_min") plan.occlusion_deg_min = to_double(key, value);
    else if (key == "occlusion_deg_max") plan.occlusion_deg_max = to_double(key, value);
    else if (key == "reflections") plan.reflections = to_int(key, value);
    else if (key == "seed") plan.seed = to_u64(key, value);
    else throw std::invalid_argument("unknown plan key '" + key + "'");
  }
  plan.validate();
  return plan;
}

SynthPlan load_plan(const std::string& path) {
  return plan_from_map(read_key_values(path));
}

std::map<std::string, std::string> plan_to_map(const SynthPlan& plan) {
  std::map<std::string, std::string> kv;
  kv["count"] = std::to_string(plan.count);
  kv["width"] = std::to_string(plan.width);
  kv["height"] = std::to_string(plan.height);
  kv["pupil_r_min"] = fmt(plan.pupil_r_min);
  kv["pupil_r_max"] = fmt(plan.pupil_r_max);
  kv["iris_r_min"] = fmt(plan.iris_r_min);
  kv["iris_r_max"] = fmt(plan.iris_r_max);
  kv["center_jitter"] = fmt(plan.center_jitter);
  kv["noise"] = to_string(plan.noise);
  kv["noise_strength"] = fmt(plan.noise_strength);
  kv["occlusion_deg_min"] = fmt(plan.occlusion_deg_min);
  kv["occlusion_deg_max"] = fmt(plan.occlusion_deg_max);
  kv["reflections"] = std::to_string(plan.reflections);
  kv["seed"] = std::to_string(plan.seed);
  return kv;
}

}  // namespace iriseg

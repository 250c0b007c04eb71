#ifndef IRISEG_CONFIG_HPP
#define IRISEG_CONFIG_HPP

#include "iriseg/boundary.hpp"
#include "iriseg/eval.hpp"

#include <map>
#include <string>

namespace iriseg {

/// Flat key=value file: one pair per line, '#' starts a comment. Unknown
/// keys are rejected by the typed loaders below.
std::map<std::string, std::string> read_key_values(const std::string& path);
std::map<std::string, std::string> parse_key_values(const std::string& text);

/// Pipeline parameters <-> key=value. Loading validates every invariant
/// before returning.
PipelineParams params_from_map(const std::map<std::string, std::string>& kv,
                               PipelineParams base = {});
std::map<std::string, std::string> params_to_map(const PipelineParams& p);
PipelineParams load_params(const std::string& path, PipelineParams base = {});
void save_params(const std::string& path, const PipelineParams& p);

/// Synthetic corpus plan <-> key=value.
SynthPlan plan_from_map(const std::map<std::string, std::string>& kv);
SynthPlan load_plan(const std::string& path);
std::map<std::string, std::string> plan_to_map(const SynthPlan& plan);

}  // namespace iriseg

#endif  // IRISEG_CONFIG_HPP

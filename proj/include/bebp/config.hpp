#ifndef BEBP_CONFIG_HPP
#define BEBP_CONFIG_HPP

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "bebp/eval.hpp"

namespace bebp {

// Run configuration. The file format is sectioned "key = value" text:
//
//   [dataset]
//   source = moons
//   [attack]
//   eta = 0.07
//
// Every key has a default; unknown sections or keys are rejected. Overrides
// use "section.key=value" and win over file values.
struct RunConfig {
  ExperimentSpec experiment;
  std::vector<double> eta_list;
  std::size_t raster_resolution = 200;
  std::filesystem::path output_dir;
  // Effective "section.key" -> value after defaults and overrides.
  std::map<std::string, std::string> values;

  // Canonical sectioned text of `values`; parses back to the same config.
  std::string render() const;
};

// Environment variable naming the default output root.
inline constexpr const char* kOutputRootEnv = "BEBP_OUTPUT_ROOT";

RunConfig parse_config(const std::filesystem::path& path,
                       const std::vector<std::string>& overrides = {});
RunConfig parse_config_text(const std::string& text,
                            const std::vector<std::string>& overrides = {},
                            const std::string& origin = "<config>");

}  // namespace bebp

#endif  // BEBP_CONFIG_HPP

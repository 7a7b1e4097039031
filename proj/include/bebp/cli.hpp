#ifndef BEBP_CLI_HPP
#define BEBP_CLI_HPP

#include <iosfwd>
#include <string>
#include <vector>

#include "bebp/config.hpp"

namespace bebp {

// prepare, attack, experiment, sweep, compare-baselines, raster.
const std::vector<std::string>& commands();

// Runs one command against a parsed config, writing artifacts and a manifest
// into config.output_dir. Returns the process exit status; diagnostics go to
// `err`.
int dispatch(const std::string& command, const RunConfig& config, std::ostream& log,
             std::ostream& err);

// Replays a finalized manifest. `output_override` (if nonempty) replaces the
// recorded output directory.
int rerun(const std::filesystem::path& manifest, const std::string& output_override,
          std::ostream& log, std::ostream& err);

}  // namespace bebp

#endif  // BEBP_CLI_HPP

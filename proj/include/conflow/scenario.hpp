#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>

namespace conflow {

inline constexpr int kExitPass = 0;
inline constexpr int kExitHardError = 1;
inline constexpr int kExitCheckFailed = 2;

struct RunOptions {
  std::filesystem::path out_dir = ".";
  bool quiet = false;
};

/// Runs one JSON scenario and writes its artifacts under opts.out_dir.
/// Returns 0 on pass, 2 when hypotheses are inapplicable or a certificate
/// or check fails, 1 on hard errors (bad config, vacuum, non-convergence,
/// I/O). Diagnostics go to `err`, progress to `log` unless quiet.
int run_scenario(const std::filesystem::path& scenario, const RunOptions& opts, std::ostream& log,
                 std::ostream& err);

/// Same, from JSON text; relative file references resolve against base_dir.
int run_scenario_text(const std::string& text, const std::filesystem::path& base_dir,
                      const RunOptions& opts, std::ostream& log, std::ostream& err);

} // namespace conflow

#pragma once

#include <iosfwd>
#include <span>
#include <string>

namespace ncring::cli {

inline constexpr int exit_ok = 0;
inline constexpr int exit_validation = 2;
inline constexpr int exit_pipeline = 3;

/// Runs one subcommand. Data goes to `out` (or files), diagnostics to `err`.
/// `config_env` stands in for $NCRING_CONFIG (empty = unset).
int run(std::span<const std::string> args, std::ostream& out, std::ostream& err,
        const std::string& config_env = {});

} // namespace ncring::cli

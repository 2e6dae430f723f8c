#pragma once

#include <ostream>
#include <string>
#include <vector>

#include "codedelay/simulator.hpp"

namespace codedelay::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFlagError = 2;
inline constexpr int kExitNumerical = 3;

/// Parses argv (argv[0] is the program name) and runs one subcommand. Tables go to `out`
/// unless --out names a file; diagnostics go to `err`. Returns the process exit code.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

/// Convenience overload for in-process callers.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Single-line JSON echo of a simulation configuration.
std::string config_echo(const SimConfig& config);

/// Trace CSV: a `# <config json>` line, a header, then one row per packet record.
void write_trace(std::ostream& out, const SimConfig& config, const std::vector<PacketRecord>& packets);

}  // namespace codedelay::cli

// Command implementations behind the CLI, separated from argument parsing so
// tests can drive them directly. Each returns a process exit code:
//   0 success, 2 usage error, 3 data error, 4 convergence error.
#pragma once

#include <optional>
#include <string>

#include "dnls/common.hpp"
#include "dnls/grid.hpp"

namespace dnls {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitData = 3;
inline constexpr int kExitConvergence = 4;

struct CommonOpts {
  std::string input;    // CSV path; empty when a preset is used
  std::string preset;   // gaussian-small | gaussian-medium | zero
  std::string output;
  int threads = 0;      // 0 = runtime default
  bool serial = false;  // force the serial reference drivers
};

struct DirectOpts : CommonOpts {
  bool check = false;
};

struct InverseOpts : CommonOpts {
  std::string xs;       // "lo:hi:n", empty = dual spatial grid
  double tol = 1e-10;
};

struct EvolveOpts : CommonOpts {
  double t = 0.0;
  double dt = 1e-4;     // stepper step when via includes the pde path
  std::string via = "ist";  // ist | pde | both
};

struct OracleOpts : CommonOpts {
  double t = 0.0;
  double dt = 1e-4;
  std::string eq = "dnls2";  // dnls2 | dnls1
};

struct RoundtripOpts : CommonOpts {
  double tol = 1e-3;
};

struct CheckOpts : CommonOpts {};

int cmd_direct(const DirectOpts&);
int cmd_inverse(const InverseOpts&);
int cmd_evolve(const EvolveOpts&);
int cmd_oracle(const OracleOpts&);
int cmd_roundtrip(const RoundtripOpts&);
int cmd_check(const CheckOpts&);

// Resolve --input/--preset into a potential; used by several commands.
// Presets: gaussian-small (0.3 e^{-x^2}), gaussian-medium (0.6 e^{-x^2}),
// zero; all on L=16, N=1024.
Potential load_input_potential(const CommonOpts&);
// Apply DNLS_OUTDIR to relative output paths.
std::string resolve_output(const std::string& path);

}  // namespace dnls

#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "qlse/config.hpp"
#include "qlse/functionals.hpp"
#include "qlse/paths.hpp"
#include "qlse/solver.hpp"

namespace qlse {

struct CommandOptions {
  std::optional<std::string> out_dir;  // overrides [output] directory
  std::optional<std::uint64_t> seed;   // overrides [random] seed
  bool refine = false;                 // halve delta
  bool inject_fault = false;           // verify-g: test the failure path
  bool timing = false;                 // add wall time to summaries (breaks byte identity)
};

// Each command returns 0 on success and 1 when a verification or a summary
// invariant fails; errors are thrown as qlse::Error.
int cmd_verify_g(const CommandOptions& opt, std::ostream& log);
int cmd_verify_h(const RunConfig& cfg, const CommandOptions& opt, std::ostream& log);
int cmd_solve(const RunConfig& cfg, const CommandOptions& opt, std::ostream& log);
int cmd_oracle(const RunConfig& cfg, const CommandOptions& opt, std::ostream& log);
int cmd_paths(const RunConfig& cfg, const CommandOptions& opt, std::ostream& log);
int cmd_sweep(const RunConfig& cfg, const CommandOptions& opt, std::ostream& log);

// Process exit status for an error kind.
int exit_code(ErrorKind kind);

// Shared building blocks, also used by the tests.
FunctionalContext make_context(const RunConfig& cfg, bool refine = false);

// A Gaussian (radial) or A (r1^2 - r2^2)/w^2 exp(-|x|^2/w^2) (tau sectors)
// field, with the amplitude doubled until int H(g(v)) > 0.
Field default_seed(const FunctionalContext& ctx, double amplitude, double width);

// Path family for cfg: the override R when given, otherwise the tuned one.
struct PathSetup {
  PathFamily family;
  std::vector<std::vector<double>> samples;
  std::optional<TuneResult> tuning;
};
PathSetup make_paths(const RunConfig& cfg, std::uint64_t seed);

// The 2^k vertices of Sigma_k mapped to grid fields.
std::vector<Field> vertex_seeds(const FunctionalContext& ctx, const PathFamily& fam, double fill);

struct SolutionChecks {
  double pohozaev = 0.0;        // |psi - 2* Phi| / psi
  double energy_identity = 0.0; // |J - psi/N| / psi
  double duality = 0.0;         // |I(g(v)) - J(v)| / (1 + |J|)
  double antisymmetry = 0.0;    // max |v + tau v| (tau sectors)
  bool ok = false;              // converged and every invariant within tolerance
};
SolutionChecks check_solution(const FunctionalContext& ctx, const SolveReport& r);

std::string format_number(double x);  // 17 significant digits

}  // namespace qlse

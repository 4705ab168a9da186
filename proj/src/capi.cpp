#include "qlse/qlse.h"

#include <cstring>
#include <exception>
#include <map>
#include <sstream>
#include <string>

#include "qlse/commands.hpp"
#include "qlse/config.hpp"
#include "qlse/error.hpp"
#include "qlse/solver.hpp"

struct qlse_config {
  qlse::RunConfig cfg;
};

struct qlse_solution {
  std::map<std::string, double> values;
  qlse::Field field;
};

namespace {

thread_local std::string last_error;

qlse_status status_of(qlse::ErrorKind kind) { return static_cast<qlse_status>(static_cast<int>(kind)); }

template <class Fn>
qlse_status guarded(Fn&& fn) {
  try {
    last_error.clear();
    return fn();
  } catch (const qlse::Error& e) {
    last_error = e.what();
    return status_of(e.kind());
  } catch (const std::exception& e) {
    last_error = std::string("internal error: ") + e.what();
    return QLSE_ERR_INTERNAL;
  } catch (...) {
    last_error = "internal error";
    return QLSE_ERR_INTERNAL;
  }
}

qlse_status require(const void* p, const char* what) {
  if (p) return QLSE_OK;
  last_error = std::string(what) + " is NULL";
  return QLSE_ERR_USAGE;
}

// Forwards everything written to it to the log callback.
class CallbackBuf : public std::stringbuf {
 public:
  CallbackBuf(qlse_log_fn fn, void* user) : fn_(fn), user_(user) {}
  int sync() override {
    if (fn_ && !str().empty()) fn_(str().c_str(), user_);
    str("");
    return 0;
  }

 private:
  qlse_log_fn fn_;
  void* user_;
};

}  // namespace

extern "C" {

const char* qlse_version(void) { return "0.1.0"; }

const char* qlse_last_error(void) { return last_error.c_str(); }

const char* qlse_status_name(qlse_status status) {
  switch (status) {
    case QLSE_OK: return "ok";
    case QLSE_VERIFY_FAILED: return "verification failed";
    case QLSE_ERR_INTERNAL: return "internal";
    default:
      if (status >= QLSE_ERR_DOMAIN && status <= QLSE_ERR_IO) {
        return qlse::to_string(static_cast<qlse::ErrorKind>(status));
      }
      return "unknown";
  }
}

int qlse_exit_code(qlse_status status) {
  switch (status) {
    case QLSE_OK: return 0;
    case QLSE_VERIFY_FAILED: return 1;
    case QLSE_ERR_INTERNAL: return 10;
    default:
      if (status >= QLSE_ERR_DOMAIN && status <= QLSE_ERR_IO) {
        return qlse::exit_code(static_cast<qlse::ErrorKind>(status));
      }
      return 10;
  }
}

qlse_status qlse_config_load(const char* path, qlse_config** out) {
  if (auto s = require(path, "path"); s != QLSE_OK) return s;
  if (auto s = require(out, "out"); s != QLSE_OK) return s;
  *out = nullptr;
  return guarded([&] {
    *out = new qlse_config{qlse::load_config(path)};
    return QLSE_OK;
  });
}

qlse_status qlse_config_parse(const char* text, qlse_config** out) {
  if (auto s = require(text, "text"); s != QLSE_OK) return s;
  if (auto s = require(out, "out"); s != QLSE_OK) return s;
  *out = nullptr;
  return guarded([&] {
    *out = new qlse_config{qlse::parse_config(text)};
    return QLSE_OK;
  });
}

void qlse_config_free(qlse_config* config) { delete config; }

qlse_status qlse_run(const char* command, const qlse_config* config,
                     const qlse_run_options* options, qlse_log_fn log, void* user) {
  if (auto s = require(command, "command"); s != QLSE_OK) return s;
  return guarded([&] {
    qlse::CommandOptions opt;
    if (options) {
      if (options->out_dir) opt.out_dir = std::string(options->out_dir);
      if (options->has_seed) opt.seed = options->seed;
      opt.refine = options->refine != 0;
      opt.inject_fault = options->inject_fault != 0;
      opt.timing = options->timing != 0;
    }
    CallbackBuf buf(log, user);
    std::ostream os(&buf);
    const std::string cmd = command;
    int rc = 0;
    if (cmd == "verify-g") {
      rc = qlse::cmd_verify_g(opt, os);
    } else {
      if (!config) qlse::fail(qlse::ErrorKind::Usage, cmd + " needs a configuration");
      const qlse::RunConfig& cfg = config->cfg;
      if (cmd == "verify-h") rc = qlse::cmd_verify_h(cfg, opt, os);
      else if (cmd == "solve") rc = qlse::cmd_solve(cfg, opt, os);
      else if (cmd == "oracle") rc = qlse::cmd_oracle(cfg, opt, os);
      else if (cmd == "paths") rc = qlse::cmd_paths(cfg, opt, os);
      else if (cmd == "sweep") rc = qlse::cmd_sweep(cfg, opt, os);
      else qlse::fail(qlse::ErrorKind::Usage, "unknown command '" + cmd + "'");
    }
    os.flush();
    return rc == 0 ? QLSE_OK : QLSE_VERIFY_FAILED;
  });
}

qlse_status qlse_g(double t, double* out) {
  if (auto s = require(out, "out"); s != QLSE_OK) return s;
  return guarded([&] {
    *out = qlse::DualTransform()(t);
    return QLSE_OK;
  });
}

qlse_status qlse_g_inverse(double u, double* out) {
  if (auto s = require(out, "out"); s != QLSE_OK) return s;
  return guarded([&] {
    *out = qlse::DualTransform().inverse(u);
    return QLSE_OK;
  });
}

qlse_status qlse_solve(const qlse_config* config, int refine, qlse_solution** out) {
  if (auto s = require(config, "config"); s != QLSE_OK) return s;
  if (auto s = require(out, "out"); s != QLSE_OK) return s;
  *out = nullptr;
  return guarded([&] {
    const qlse::RunConfig& cfg = config->cfg;
    const qlse::FunctionalContext ctx = qlse::make_context(cfg, refine != 0);
    const qlse::Field v0 = qlse::default_seed(ctx, cfg.seed.amplitude, cfg.seed.width);
    const qlse::SolveReport r = qlse::minimize(ctx, v0, cfg.solver);
    const qlse::SolutionChecks c = qlse::check_solution(ctx, r);
    auto* sol = new qlse_solution;
    sol->field = r.field;
    sol->values = {{"beta", r.beta},
                   {"psi", r.psi},
                   {"theta", r.theta},
                   {"deficit", r.deficit},
                   {"el_residual", r.el_residual},
                   {"quasilinear_residual", r.quasilinear_residual},
                   {"grad_norm", r.grad_norm},
                   {"iterations", static_cast<double>(r.iterations)},
                   {"converged", r.converged ? 1.0 : 0.0},
                   {"antisymmetry_defect", c.antisymmetry}};
    *out = sol;
    return QLSE_OK;
  });
}

qlse_status qlse_solution_get(const qlse_solution* solution, const char* key, double* out) {
  if (auto s = require(solution, "solution"); s != QLSE_OK) return s;
  if (auto s = require(key, "key"); s != QLSE_OK) return s;
  if (auto s = require(out, "out"); s != QLSE_OK) return s;
  const auto it = solution->values.find(key);
  if (it == solution->values.end()) {
    last_error = std::string("unknown solution key '") + key + "'";
    return QLSE_ERR_USAGE;
  }
  *out = it->second;
  return QLSE_OK;
}

size_t qlse_solution_size(const qlse_solution* solution) {
  return solution ? static_cast<size_t>(solution->field.size()) : 0;
}

qlse_status qlse_solution_field(const qlse_solution* solution, double* buffer, size_t n) {
  if (auto s = require(solution, "solution"); s != QLSE_OK) return s;
  if (auto s = require(buffer, "buffer"); s != QLSE_OK) return s;
  if (n != static_cast<size_t>(solution->field.size())) {
    last_error = "buffer size does not match the solution size";
    return QLSE_ERR_USAGE;
  }
  std::memcpy(buffer, solution->field.data(), n * sizeof(double));
  return QLSE_OK;
}

void qlse_solution_free(qlse_solution* solution) { delete solution; }

}  // extern "C"

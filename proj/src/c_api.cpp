#include "degen/degen.h"

#include <exception>
#include <filesystem>
#include <new>
#include <string>

#include "degen/error.hpp"
#include "degen/experiments.hpp"
#include "degen/sources.hpp"

struct degen_config {
  degen::Config config;
};

struct degen_report {
  degen::RunResult result;
  std::string text;
};

struct degen_eddy {
  degen::EddyProblem problem;
};

namespace {

thread_local std::string last_error;

degen_status status_of(degen::ErrorKind kind) {
  switch (kind) {
    case degen::ErrorKind::Argument: return DEGEN_ERR_ARGUMENT;
    case degen::ErrorKind::Dimension: return DEGEN_ERR_DIMENSION;
    case degen::ErrorKind::Model: return DEGEN_ERR_MODEL;
    case degen::ErrorKind::Certification: return DEGEN_ERR_CERTIFICATION;
    case degen::ErrorKind::Config: return DEGEN_ERR_CONFIG;
    case degen::ErrorKind::Io: return DEGEN_ERR_IO;
    case degen::ErrorKind::Internal: return DEGEN_ERR_INTERNAL;
  }
  return DEGEN_ERR_INTERNAL;
}

template <class F>
degen_status guarded(F&& f) {
  last_error.clear();
  try {
    return f();
  } catch (const degen::Error& e) {
    last_error = e.what();
    return status_of(e.kind());
  } catch (const std::filesystem::filesystem_error& e) {
    last_error = e.what();
    return DEGEN_ERR_IO;
  } catch (const std::bad_alloc&) {
    last_error = "out of memory";
    return DEGEN_ERR_INTERNAL;
  } catch (const std::exception& e) {
    last_error = e.what();
    return DEGEN_ERR_INTERNAL;
  } catch (...) {
    last_error = "unknown exception";
    return DEGEN_ERR_INTERNAL;
  }
}

degen_status null_argument(const char* what) {
  last_error = std::string(what) + " must not be NULL";
  return DEGEN_ERR_ARGUMENT;
}

}  // namespace

extern "C" {

const char* degen_version(void) { return "0.1.0"; }

const char* degen_status_name(degen_status status) {
  switch (status) {
    case DEGEN_OK: return "ok";
    case DEGEN_ERR_ARGUMENT: return "argument";
    case DEGEN_ERR_DIMENSION: return "dimension";
    case DEGEN_ERR_MODEL: return "model";
    case DEGEN_ERR_CERTIFICATION: return "certification";
    case DEGEN_ERR_CONFIG: return "config";
    case DEGEN_ERR_IO: return "io";
    case DEGEN_ERR_INTERNAL: return "internal";
    case DEGEN_CHECK_FAILED: return "check_failed";
  }
  return "unknown";
}

const char* degen_last_error(void) { return last_error.c_str(); }

degen_status degen_config_load(const char* path, degen_config** out) {
  if (!out) return null_argument("out");
  *out = nullptr;
  if (!path) return null_argument("path");
  return guarded([&] {
    *out = new degen_config{degen::Config::load(path)};
    return DEGEN_OK;
  });
}

degen_status degen_config_parse(const char* text, degen_config** out) {
  if (!out) return null_argument("out");
  *out = nullptr;
  if (!text) return null_argument("text");
  return guarded([&] {
    *out = new degen_config{degen::Config::parse(text)};
    return DEGEN_OK;
  });
}

void degen_config_free(degen_config* config) { delete config; }

size_t degen_command_count(void) { return degen::experiment_commands().size(); }

const char* degen_command_name(size_t i) {
  const auto& c = degen::experiment_commands();
  return i < c.size() ? c[i].c_str() : nullptr;
}

degen_status degen_run(const char* command, const degen_config* config, const degen_run_options* options,
                       degen_report** out) {
  if (!out) return null_argument("out");
  *out = nullptr;
  if (!command) return null_argument("command");
  if (!config) return null_argument("config");
  return guarded([&] {
    degen::RunOptions o;
    if (options) {
      if (options->has_seed) o.seed = options->seed;
      if (options->threads < 0) degen::fail(degen::ErrorKind::Argument, "threads must be >= 0");
      if (options->threads > 0) o.threads = options->threads;
      if (options->out_dir) o.out_dir = options->out_dir;
    }
    auto* r = new degen_report{degen::run_experiment(command, config->config, o), {}};
    *out = r;
    return r->result.pass ? DEGEN_OK : DEGEN_CHECK_FAILED;
  });
}

int degen_report_pass(const degen_report* report) { return report && report->result.pass ? 1 : 0; }

const char* degen_report_json(degen_report* report, int indent) {
  if (!report) return nullptr;
  report->text = report->result.report.dump(indent < 0 ? -1 : indent);
  return report->text.c_str();
}

void degen_report_free(degen_report* report) { delete report; }

degen_status degen_eddy_create(int n, const int* boxes, size_t box_count, double sigma, double mu,
                               degen_eddy** out) {
  if (!out) return null_argument("out");
  *out = nullptr;
  if (box_count > 0 && !boxes) return null_argument("boxes");
  return guarded([&] {
    std::vector<degen::CellBox> b(box_count);
    for (size_t i = 0; i < box_count; ++i)
      for (int j = 0; j < 6; ++j) b[i][j] = boxes[6 * i + j];
    degen::require(sigma > 0.0 && mu > 0.0, degen::ErrorKind::Argument, "sigma and mu must be positive");
    const degen::StaggeredMesh mesh = degen::build_mesh(n, b);
    *out = new degen_eddy{degen::assemble_eddy(mesh, degen::scalar_sigma_tilde(mesh, sigma),
                                               degen::scalar_mu(mesh, mu))};
    return DEGEN_OK;
  });
}

void degen_eddy_free(degen_eddy* eddy) { delete eddy; }

degen_status degen_eddy_get_dims(const degen_eddy* eddy, degen_eddy_dims* out) {
  if (!eddy) return null_argument("eddy");
  if (!out) return null_argument("out");
  return guarded([&] {
    const degen::EddyProblem& p = eddy->problem;
    const auto& parts = p.degenerate.decomposition.parts;
    out->edges = static_cast<size_t>(p.edge_dim());
    out->faces = static_cast<size_t>(p.face_dim());
    out->h0 = static_cast<size_t>(p.degenerate.reduced_dim());
    out->h2 = parts.size() == 3 ? static_cast<size_t>(parts[2].dim()) : 0;
    out->multipliers = static_cast<size_t>(p.diamond.multiplier_dim());
    out->components = p.mesh.components;
    return DEGEN_OK;
  });
}

degen_status degen_eddy_get_constants(const degen_eddy* eddy, degen_eddy_constants* out) {
  if (!eddy) return null_argument("eddy");
  if (!out) return null_argument("out");
  return guarded([&] {
    const degen::EddyConstants k = degen::eddy_constants(eddy->problem);
    *out = {eddy->problem.degenerate.c1, k.k0, k.k1, k.c_star, k.c0_formula, k.c0_direct};
    return DEGEN_OK;
  });
}

degen_status degen_eddy_solve_ramp(const degen_eddy* eddy, const double* j_space, double horizon, int steps,
                                   double rho, double start, double width, double* e_out, double* residuals) {
  if (!eddy) return null_argument("eddy");
  if (!j_space) return null_argument("j_space");
  return guarded([&] {
    const degen::EddyProblem& p = eddy->problem;
    const degen::TimeGrid grid(horizon, steps, rho);
    degen::require(width > 0.0 && start >= 0.0, degen::ErrorKind::Argument, "ramp needs start >= 0, width > 0");
    const degen::Vector space = p.project_h0(Eigen::Map<const degen::Vector>(j_space, p.edge_dim()));
    const degen::TimeProfile g{degen::TimeShape::Ramp, start, width, 1.0};
    const degen::TimeSignal j = degen::separable(grid, space, g);
    const degen::EddySolution s = degen::eddy_solve(p, j, degen::TimeSignal(grid, p.face_dim()));
    if (e_out) Eigen::Map<degen::Matrix>(e_out, p.edge_dim(), grid.nodes()) = s.e.values();
    if (residuals) {
      residuals[0] = s.residual_first;
      residuals[1] = s.residual_second;
    }
    return DEGEN_OK;
  });
}

}  // extern "C"

#include "bkeq/bkeq.h"

#include <cstdlib>
#include <cstring>
#include <exception>
#include <string>

#include "bkeq/error.hpp"
#include "bkeq/report.hpp"

struct bkeq_model {
  bkeq::ModelSpec spec;
};

struct bkeq_analysis {
  bkeq::Report report;
};

namespace {

thread_local std::string last_error;

bkeq_status fail(bkeq_status status, const std::string& message) {
  last_error = message;
  return status;
}

template <typename F>
bkeq_status guarded(F&& body) {
  try {
    last_error.clear();
    return body();
  } catch (const bkeq::InputError& e) {
    return fail(BKEQ_ERR_INPUT, e.what());
  } catch (const bkeq::NumericalError& e) {
    return fail(BKEQ_ERR_NUMERIC, e.what());
  } catch (const std::out_of_range& e) {
    return fail(BKEQ_ERR_RANGE, e.what());
  } catch (const std::invalid_argument& e) {
    return fail(BKEQ_ERR_INPUT, e.what());
  } catch (const std::exception& e) {
    return fail(BKEQ_ERR_INTERNAL, e.what());
  } catch (...) {
    return fail(BKEQ_ERR_INTERNAL, "unknown error");
  }
}

char* copy_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

bkeq::ModelSpec apply_options(const bkeq::ModelSpec& spec, const bkeq_options* options) {
  if (!options) return spec;
  bkeq::ToleranceOverrides o;
  if (options->unit_margin > 0) o.unit_margin = options->unit_margin;
  if (options->cluster_tol > 0) o.cluster_tol = options->cluster_tol;
  if (options->rank_tol > 0) o.rank_tol = options->rank_tol;
  if (options->residual_tol > 0) o.residual_tol = options->residual_tol;
  return spec.with_tolerances(o.apply(spec.tol()));
}

bkeq::AnalysisOptions analysis_options(const bkeq_options* options) {
  bkeq::AnalysisOptions out;
  if (!options) return out;
  out.mode = options->allow_complex ? bkeq::SelectionMode::AllowComplex
                                    : bkeq::SelectionMode::RealOnly;
  switch (options->boundary) {
    case BKEQ_BOUNDARY_REFUSE: out.boundary = bkeq::BoundaryPolicy::Refuse; break;
    case BKEQ_BOUNDARY_STABLE: out.boundary = bkeq::BoundaryPolicy::TreatStable; break;
    case BKEQ_BOUNDARY_UNSTABLE: out.boundary = bkeq::BoundaryPolicy::TreatUnstable; break;
    default: throw bkeq::InputError("unknown boundary policy");
  }
  return out;
}

void require(const void* p, const char* what) {
  if (!p) throw std::invalid_argument(std::string(what) + " must not be null");
}

}  // namespace

extern "C" {

const char* bkeq_version(void) { return "1.0.0"; }

const char* bkeq_last_error(void) { return last_error.c_str(); }

void bkeq_string_free(char* s) { std::free(s); }

void bkeq_options_init(bkeq_options* options) {
  if (!options) return;
  *options = bkeq_options{0, BKEQ_BOUNDARY_REFUSE, 0.0, 0.0, 0.0, 0.0};
}

bkeq_status bkeq_model_from_json(const char* document, bkeq_model** out) {
  return guarded([&] {
    require(document, "document");
    require(out, "out");
    *out = new bkeq_model{bkeq::load_model(document)};
    return BKEQ_OK;
  });
}

bkeq_status bkeq_model_from_file(const char* path, bkeq_model** out) {
  return guarded([&] {
    require(path, "path");
    require(out, "out");
    *out = new bkeq_model{bkeq::load_model_file(path)};
    return BKEQ_OK;
  });
}

void bkeq_model_free(bkeq_model* model) { delete model; }

int bkeq_model_n(const bkeq_model* model) { return model ? model->spec.n() : -1; }

int bkeq_model_m(const bkeq_model* model) { return model ? model->spec.m() : -1; }

bkeq_status bkeq_analyze(const bkeq_model* model, const bkeq_options* options,
                         bkeq_analysis** out) {
  return guarded([&] {
    require(model, "model");
    require(out, "out");
    const auto spec = apply_options(model->spec, options);
    *out = new bkeq_analysis{bkeq::analyze(spec, analysis_options(options))};
    return BKEQ_OK;
  });
}

void bkeq_analysis_free(bkeq_analysis* analysis) { delete analysis; }

bkeq_case bkeq_analysis_case(const bkeq_analysis* analysis) {
  if (!analysis || !analysis->report.classification.verdict) return BKEQ_CASE_WITHHELD;
  switch (*analysis->report.classification.verdict) {
    case bkeq::Verdict::NoEquilibrium: return BKEQ_CASE_NO_EQUILIBRIUM;
    case bkeq::Verdict::Unique: return BKEQ_CASE_UNIQUE;
    case bkeq::Verdict::FiniteMany: return BKEQ_CASE_FINITE_MANY;
    case bkeq::Verdict::Uncountable: return BKEQ_CASE_UNCOUNTABLE;
  }
  return BKEQ_CASE_WITHHELD;
}

int bkeq_analysis_boundary_blocked(const bkeq_analysis* analysis) {
  return analysis && analysis->report.classification.boundary_blocked ? 1 : 0;
}

size_t bkeq_analysis_equilibrium_count(const bkeq_analysis* analysis) {
  return analysis ? analysis->report.equilibria.size() : 0;
}

bkeq_status bkeq_analysis_equilibrium(const bkeq_analysis* analysis, size_t index,
                                      double* out, int* is_real) {
  return guarded([&] {
    require(analysis, "analysis");
    const auto& list = analysis->report.equilibria;
    if (index >= list.size()) {
      throw std::out_of_range("equilibrium index " + std::to_string(index) +
                              " out of range (" + std::to_string(list.size()) +
                              " equilibria)");
    }
    const auto& eq = list[index].equilibrium;
    if (out) {
      for (Eigen::Index i = 0; i < eq.N.rows(); ++i) {
        for (Eigen::Index j = 0; j < eq.N.cols(); ++j) {
          out[i * eq.N.cols() + j] = eq.N(i, j).real();
        }
      }
    }
    if (is_real) *is_real = eq.real ? 1 : 0;
    return BKEQ_OK;
  });
}

bkeq_status bkeq_analysis_render(const bkeq_analysis* analysis, bkeq_format format,
                                 int include_equilibria, char** out) {
  return guarded([&] {
    require(analysis, "analysis");
    require(out, "out");
    const bool all = include_equilibria != 0;
    *out = copy_string(format == BKEQ_FORMAT_JSON
                           ? bkeq::render_json(analysis->report, all)
                           : bkeq::render_text(analysis->report, all));
    return BKEQ_OK;
  });
}

bkeq_status bkeq_analysis_simulate(const bkeq_analysis* analysis, size_t index,
                                   const double* k0, size_t k0_len, int steps,
                                   bkeq_format format, char** out) {
  return guarded([&] {
    require(analysis, "analysis");
    require(out, "out");
    const auto& report = analysis->report;
    if (index >= report.equilibria.size()) {
      throw std::out_of_range("equilibrium index " + std::to_string(index) +
                              " out of range (" + std::to_string(report.equilibria.size()) +
                              " equilibria)");
    }
    if (k0_len != static_cast<size_t>(report.model.n())) {
      throw bkeq::InputError("k0 must have " + std::to_string(report.model.n()) +
                             " entries, got " + std::to_string(k0_len));
    }
    if (k0_len > 0) require(k0, "k0");
    if (steps < 0) throw bkeq::InputError("steps must be non-negative");
    bkeq::Vector start(static_cast<Eigen::Index>(k0_len));
    for (size_t i = 0; i < k0_len; ++i) start(static_cast<Eigen::Index>(i)) = k0[i];
    const auto blocks = bkeq::partition_blocks(report.model);
    const auto path =
        bkeq::simulate(report.equilibria[index].equilibrium, blocks, start, steps);
    const auto bounded = bkeq::boundedness_check(path, report.model.tol().unit_margin);
    *out = copy_string(format == BKEQ_FORMAT_JSON
                           ? bkeq::render_trajectory_json(path, bounded, index)
                           : bkeq::render_trajectory_text(path, bounded));
    return BKEQ_OK;
  });
}

bkeq_status bkeq_verify(const bkeq_model* model, const bkeq_options* options,
                        const char* n_document, bkeq_format format, char** out,
                        int* passed) {
  return guarded([&] {
    require(model, "model");
    require(n_document, "n_document");
    require(out, "out");
    const auto spec = apply_options(model->spec, options);
    const auto N = bkeq::parse_feedback(n_document, spec.m(), spec.n());
    const auto result = bkeq::verify_feedback(spec, N);
    if (passed) *passed = result.passed ? 1 : 0;
    *out = copy_string(format == BKEQ_FORMAT_JSON ? bkeq::render_verify_json(result)
                                                  : bkeq::render_verify_text(result));
    return BKEQ_OK;
  });
}

}  // extern "C"

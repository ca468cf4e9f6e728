// bkeq command-line front end. Talks to the library only through bkeq.h.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "bkeq/bkeq.h"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInput = 1;
constexpr int kExitBoundary = 2;

struct ModelDeleter {
  void operator()(bkeq_model* p) const { bkeq_model_free(p); }
};
struct AnalysisDeleter {
  void operator()(bkeq_analysis* p) const { bkeq_analysis_free(p); }
};
struct StringDeleter {
  void operator()(char* p) const { bkeq_string_free(p); }
};
using ModelPtr = std::unique_ptr<bkeq_model, ModelDeleter>;
using AnalysisPtr = std::unique_ptr<bkeq_analysis, AnalysisDeleter>;
using StringPtr = std::unique_ptr<char, StringDeleter>;

struct GlobalFlags {
  std::string format = "text";
  bool allow_complex = false;
  std::string boundary;
  double tol_unit_margin = 0.0;
  double tol_cluster = 0.0;
  double tol_rank = 0.0;
  double tol_residual = 0.0;
};

int report_error(const std::string& context) {
  std::cerr << "bkeq: " << context << ": " << bkeq_last_error() << "\n";
  return kExitInput;
}

bkeq_format format_of(const GlobalFlags& g) {
  return g.format == "json" ? BKEQ_FORMAT_JSON : BKEQ_FORMAT_TEXT;
}

bkeq_options options_of(const GlobalFlags& g) {
  bkeq_options o;
  bkeq_options_init(&o);
  o.allow_complex = g.allow_complex ? 1 : 0;
  if (g.boundary == "stable") o.boundary = BKEQ_BOUNDARY_STABLE;
  if (g.boundary == "unstable") o.boundary = BKEQ_BOUNDARY_UNSTABLE;
  o.unit_margin = g.tol_unit_margin;
  o.cluster_tol = g.tol_cluster;
  o.rank_tol = g.tol_rank;
  o.residual_tol = g.tol_residual;
  return o;
}

bool load(const std::string& path, ModelPtr& model) {
  bkeq_model* raw = nullptr;
  if (bkeq_model_from_file(path.c_str(), &raw) != BKEQ_OK) return false;
  model.reset(raw);
  return true;
}

int run_report(const GlobalFlags& g, const std::string& model_path, bool full) {
  ModelPtr model;
  if (!load(model_path, model)) return report_error(model_path);
  const bkeq_options options = options_of(g);
  bkeq_analysis* raw = nullptr;
  if (bkeq_analyze(model.get(), &options, &raw) != BKEQ_OK) {
    return report_error("analysis failed");
  }
  AnalysisPtr analysis(raw);
  char* text = nullptr;
  if (bkeq_analysis_render(analysis.get(), format_of(g), full ? 1 : 0, &text) != BKEQ_OK) {
    return report_error("render failed");
  }
  StringPtr owned(text);
  std::cout << owned.get();
  return bkeq_analysis_boundary_blocked(analysis.get()) ? kExitBoundary : kExitOk;
}

int run_verify(const GlobalFlags& g, const std::string& model_path,
               const std::string& n_path) {
  ModelPtr model;
  if (!load(model_path, model)) return report_error(model_path);
  std::ifstream in(n_path);
  if (!in) {
    std::cerr << "bkeq: cannot read N file " << n_path << "\n";
    return kExitInput;
  }
  std::stringstream buffer;
  buffer << in.rdbuf();
  const bkeq_options options = options_of(g);
  char* text = nullptr;
  int passed = 0;
  if (bkeq_verify(model.get(), &options, buffer.str().c_str(), format_of(g), &text,
                  &passed) != BKEQ_OK) {
    return report_error(n_path);
  }
  StringPtr owned(text);
  std::cout << owned.get();
  return passed ? kExitOk : kExitInput;
}

int run_simulate(const GlobalFlags& g, const std::string& model_path, std::size_t index,
                 const std::vector<double>& k0, int steps) {
  ModelPtr model;
  if (!load(model_path, model)) return report_error(model_path);
  const bkeq_options options = options_of(g);
  bkeq_analysis* raw = nullptr;
  if (bkeq_analyze(model.get(), &options, &raw) != BKEQ_OK) {
    return report_error("analysis failed");
  }
  AnalysisPtr analysis(raw);
  if (bkeq_analysis_boundary_blocked(analysis.get())) {
    std::cerr << "bkeq: boundary eigenvalue; rerun with --boundary=stable|unstable\n";
    return kExitBoundary;
  }
  char* text = nullptr;
  if (bkeq_analysis_simulate(analysis.get(), index, k0.data(), k0.size(), steps,
                             format_of(g), &text) != BKEQ_OK) {
    return report_error("simulate");
  }
  StringPtr owned(text);
  std::cout << owned.get();
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Blanchard-Kahn classification and equilibrium enumeration for "
               "linear rational expectations models"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(bkeq_version()));

  GlobalFlags g;
  app.add_option("--format", g.format, "Output format")
      ->check(CLI::IsMember({"text", "json"}))
      ->capture_default_str();
  app.add_flag("--allow-complex", g.allow_complex,
               "Also enumerate selections that are not closed under conjugation");
  app.add_option("--boundary", g.boundary,
                 "Treat unit-modulus eigenvalues as stable or unstable")
      ->check(CLI::IsMember({"stable", "unstable"}));
  app.add_option("--tol-unit-margin", g.tol_unit_margin, "Override unit_margin");
  app.add_option("--tol-cluster", g.tol_cluster, "Override cluster_tol");
  app.add_option("--tol-rank", g.tol_rank, "Override rank_tol");
  app.add_option("--tol-residual", g.tol_residual, "Override residual_tol");

  std::string model_path;
  std::string n_path;
  std::size_t index = 0;
  std::vector<double> k0;
  int steps = 20;

  auto* classify = app.add_subcommand("classify", "Blanchard-Kahn verdict and spectrum");
  classify->add_option("model", model_path, "Model JSON document")->required();

  auto* enumerate = app.add_subcommand("enumerate", "Verdict plus every equilibrium");
  enumerate->add_option("model", model_path, "Model JSON document")->required();

  auto* verify = app.add_subcommand("verify", "Check a feedback matrix N");
  verify->add_option("model", model_path, "Model JSON document")->required();
  verify->add_option("N", n_path, "JSON array of m rows of n numbers")->required();

  auto* simulate = app.add_subcommand("simulate", "Closed-loop path under one equilibrium");
  simulate->add_option("model", model_path, "Model JSON document")->required();
  simulate->add_option("--equilibrium-index", index, "Index into the equilibrium list")
      ->capture_default_str();
  simulate->add_option("--k0", k0, "Initial predetermined state (n values)")
      ->delimiter(',');
  simulate->add_option("--steps", steps, "Number of steps T")
      ->check(CLI::NonNegativeNumber)
      ->capture_default_str();

  for (auto* sub : {classify, enumerate, verify, simulate}) sub->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitInput;
  }

  if (*classify) return run_report(g, model_path, false);
  if (*enumerate) return run_report(g, model_path, true);
  if (*verify) return run_verify(g, model_path, n_path);
  return run_simulate(g, model_path, index, k0, steps);
}

#include "bkeq/report.hpp"

#include <charconv>
#include <cmath>
#include <iomanip>
#include <sstream>

#include "bkeq/error.hpp"
#include "json.hpp"

namespace bkeq {

namespace {

using nlohmann::json;
using ordered_json = nlohmann::ordered_json;

// ---- analysis -------------------------------------------------------------

EquilibriumRecord make_record(const Spectrum& spectrum, const Blocks& blocks,
                              const Tolerances& tol, Equilibrium eq) {
  EquilibriumRecord rec{std::move(eq), std::nullopt, {}, 0.0};
  rec.factorization_error = verify_charpoly_factorization(rec.equilibrium.N, blocks);
  try {
    rec.left_error = left_crosscheck(spectrum, rec.equilibrium.selection,
                                     rec.equilibrium, tol);
    if (!rec.left_error) rec.left_note = "dual check unavailable: Q_mm is singular";
  } catch (const NumericalError& e) {
    rec.left_note = e.what();
  }
  return rec;
}

// ---- formatting helpers ---------------------------------------------------

std::string num(double x, int precision = 10) {
  std::ostringstream os;
  os << std::setprecision(precision) << x;
  return os.str();
}

std::string num(Complex z, int precision = 10) {
  if (z.imag() == 0.0) return num(z.real(), precision);
  std::ostringstream os;
  os << std::setprecision(precision) << z.real() << (z.imag() < 0 ? "-" : "+")
     << std::abs(z.imag()) << "i";
  return os.str();
}

// Shortest representation that parses back to the same double.
std::string exact(double x) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, res.ptr);
}

ordered_json complex_json(Complex z) { return ordered_json{{"re", z.real()}, {"im", z.imag()}}; }

ordered_json number_or_null(double x) {
  if (std::isfinite(x)) return x;
  return nullptr;
}

ordered_json matrix_json(const CMatrix& M, bool real) {
  ordered_json rows = ordered_json::array();
  for (Eigen::Index i = 0; i < M.rows(); ++i) {
    ordered_json row = ordered_json::array();
    for (Eigen::Index j = 0; j < M.cols(); ++j) {
      if (real) {
        row.push_back(M(i, j).real());
      } else {
        row.push_back(complex_json(M(i, j)));
      }
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

ordered_json selection_json(const Selection& sel) {
  ordered_json picks = ordered_json::array();
  for (const Pick& p : sel.picks) {
    picks.push_back({{"cluster", p.cluster}, {"chain", p.chain}, {"prefix", p.prefix}});
  }
  return {{"picks", picks}, {"conjugate_closed", sel.conjugate_closed}};
}

std::string selection_text(const Selection& sel) {
  std::ostringstream os;
  os << "[";
  for (std::size_t i = 0; i < sel.picks.size(); ++i) {
    const Pick& p = sel.picks[i];
    if (i) os << ", ";
    os << "cluster " << p.cluster << " chain " << p.chain << " prefix " << p.prefix;
  }
  os << "]";
  return os.str();
}

std::string matrix_text(const CMatrix& M) {
  std::ostringstream os;
  os << "[";
  for (Eigen::Index i = 0; i < M.rows(); ++i) {
    if (i) os << ", ";
    os << "[";
    for (Eigen::Index j = 0; j < M.cols(); ++j) {
      if (j) os << ", ";
      os << num(M(i, j));
    }
    os << "]";
  }
  os << "]";
  return os.str();
}

const char* mode_name(SelectionMode mode) {
  return mode == SelectionMode::RealOnly ? "real_only" : "allow_complex";
}

const char* boundary_name(BoundaryPolicy p) {
  switch (p) {
    case BoundaryPolicy::Refuse: return "refuse";
    case BoundaryPolicy::TreatStable: return "stable";
    case BoundaryPolicy::TreatUnstable: return "unstable";
  }
  return "?";
}

const char* case_label(Verdict v) {
  switch (v) {
    case Verdict::NoEquilibrium: return "Case 1";
    case Verdict::Unique: return "Case 2";
    case Verdict::FiniteMany: return "Case 3.1";
    case Verdict::Uncountable: return "Case 3.2";
  }
  return "?";
}

ordered_json tolerances_json(const Tolerances& t) {
  return {{"unit_margin", t.unit_margin},
          {"cluster_tol", t.cluster_tol},
          {"rank_tol", t.rank_tol},
          {"residual_tol", t.residual_tol}};
}

}  // namespace

Report analyze(const ModelSpec& model, const AnalysisOptions& options) {
  const Tolerances& tol = model.tol();
  const Blocks blocks = partition_blocks(model);
  Report report{model, options.mode, options.boundary, {}, {}, {}, {}, std::nullopt};
  report.mode = options.mode;
  report.boundary = options.boundary;
  report.spectrum = resolve_boundary(eigendecompose(model), options.boundary);

  if (report.spectrum.has_boundary) {
    report.classification =
        blanchard_kahn_case(report.spectrum, model.n(), model.m(), 0, 0);
    return report;
  }

  const auto selections = enumerate_selections(report.spectrum, model.n(), options.mode);
  std::vector<Equilibrium> accepted;
  for (const auto& sel : selections) {
    auto built = build_equilibrium(sel, blocks, tol, options.mode);
    if (auto* eq = std::get_if<Equilibrium>(&built)) {
      accepted.push_back(std::move(*eq));
    } else {
      report.rejections.push_back(std::get<Rejection>(std::move(built)));
    }
  }
  auto deduped = dedupe_equilibria(std::move(accepted), tol);
  for (auto& [eq, twin] : deduped.dropped) {
    report.rejections.push_back({RejectionReason::Duplicate, eq.selection, eq.pnn_condition,
                                 "same N as equilibrium " + std::to_string(twin)});
  }
  for (auto& eq : deduped.kept) {
    report.equilibria.push_back(make_record(report.spectrum, blocks, tol, std::move(eq)));
  }

  report.classification = blanchard_kahn_case(report.spectrum, model.n(), model.m(),
                                               selections.size(), report.equilibria.size());
  if (options.sample_alpha && report.classification.verdict == Verdict::Uncountable &&
      model.n() >= 1) {
    if (auto cluster = first_multi_eigenspace(report.spectrum)) {
      try {
        report.alpha_family = sample_alpha_family(report.spectrum, *cluster, blocks, tol);
      } catch (const std::invalid_argument&) {
        // no selection leaves room for the family; the verdict stands
      }
    }
  }
  return report;
}

std::string verdict_line(const Classification& c) {
  if (c.boundary_blocked) {
    return "boundary: an eigenvalue lies on the unit circle; rerun with "
           "--boundary=stable or --boundary=unstable";
  }
  if (!c.verdict) return "no verdict";
  std::ostringstream os;
  os << case_label(*c.verdict) << ": ";
  switch (*c.verdict) {
    case Verdict::NoEquilibrium:
      os << "no equilibrium";
      break;
    case Verdict::Unique:
      os << "unique equilibrium";
      if (c.accepted_count == 0) os << " predicted, none realized (singular P_nn)";
      break;
    case Verdict::FiniteMany:
      os << c.accepted_count << " of " << c.candidate_count << " candidates realized";
      break;
    case Verdict::Uncountable:
      os << "uncountable equilibria (a stable eigenvalue has several eigenvectors)";
      break;
  }
  return os.str();
}

std::string render_text(const Report& report, bool include_equilibria) {
  const auto& model = report.model;
  const auto& tol = model.tol();
  const auto& c = report.classification;
  std::ostringstream os;
  os << "model: n=" << model.n() << " m=" << model.m() << "  tol: unit_margin="
     << num(tol.unit_margin) << " cluster_tol=" << num(tol.cluster_tol)
     << " rank_tol=" << num(tol.rank_tol) << " residual_tol=" << num(tol.residual_tol)
     << "\n";
  os << "spectrum:\n";
  os << "  " << std::left << std::setw(4) << "#" << std::setw(28) << "lambda"
     << std::setw(14) << "|lambda|" << std::setw(5) << "alg" << std::setw(5) << "geo"
     << "stability\n";
  for (std::size_t i = 0; i < report.spectrum.clusters.size(); ++i) {
    const auto& cl = report.spectrum.clusters[i];
    os << "  " << std::setw(4) << i << std::setw(28) << num(cl.value) << std::setw(14)
       << num(std::abs(cl.value)) << std::setw(5) << cl.alg_mult << std::setw(5)
       << cl.geo_mult << to_string(cl.stability) << "\n";
  }
  os << std::right;
  os << "verdict: " << verdict_line(c) << "\n";
  os << "  s=" << c.s << " s1=" << c.s1 << " n=" << c.n << " m=" << c.m
     << " candidates=C(" << c.s1 << "," << c.n << ")=" << c.candidate_count
     << " enumerated=" << c.enumerated_count << " accepted=" << c.accepted_count
     << " mode=" << mode_name(report.mode) << "\n";
  if (c.realized_below_bound) {
    os << "  note: fewer equilibria realized than the candidate bound\n";
  }

  if (!include_equilibria) return os.str();

  os << "equilibria: " << report.equilibria.size() << "\n";
  for (std::size_t i = 0; i < report.equilibria.size(); ++i) {
    const auto& rec = report.equilibria[i];
    const auto& eq = rec.equilibrium;
    os << "  [" << i << "] picks " << selection_text(eq.selection) << "\n";
    os << "      N = " << matrix_text(eq.N) << (eq.real ? "" : "  (complex)") << "\n";
    os << "      closed-loop eigenvalues:";
    for (Complex z : eq.closed_loop_eigenvalues) os << " " << num(z);
    os << "\n      residual " << num(eq.residual_norm, 3) << "  P_nn condition "
       << num(eq.pnn_condition, 4) << "  factorization " << num(rec.factorization_error, 3)
       << "  left check "
       << (rec.left_error ? num(*rec.left_error, 3) : std::string("unavailable")) << "\n";
  }
  if (!report.rejections.empty()) {
    os << "rejections: " << report.rejections.size() << "\n";
    for (const auto& r : report.rejections) {
      os << "  " << to_string(r.reason) << " picks " << selection_text(r.selection)
         << ": " << r.detail << "\n";
    }
  }
  if (report.alpha_family) {
    const auto& fam = *report.alpha_family;
    os << "alpha family through cluster " << fam.cluster << " ("
       << num(report.spectrum.clusters[fam.cluster].value) << "):\n";
    for (const auto& member : fam.members) {
      os << "  alpha=" << std::left << std::setw(10) << num(member.alpha) << std::right;
      if (const auto* eq = std::get_if<Equilibrium>(&member.outcome)) {
        os << " N = " << matrix_text(eq->N) << "  residual " << num(eq->residual_norm, 3)
           << "\n";
      } else {
        const auto& r = std::get<Rejection>(member.outcome);
        os << " rejected: " << to_string(r.reason) << "\n";
      }
    }
  }
  return os.str();
}

std::string render_json(const Report& report, bool include_equilibria) {
  const auto& model = report.model;
  const auto& c = report.classification;

  ordered_json model_json{{"n", model.n()}, {"m", model.m()}};
  if (!model.names().empty()) model_json["names"] = model.names();
  model_json["tol"] = tolerances_json(model.tol());
  model_json["mode"] = mode_name(report.mode);
  model_json["boundary"] = boundary_name(report.boundary);

  ordered_json spectrum = ordered_json::array();
  for (const auto& cl : report.spectrum.clusters) {
    ordered_json chains = ordered_json::array();
    for (const auto& chain : cl.chains) chains.push_back(chain.size());
    spectrum.push_back({{"value", complex_json(cl.value)},
                        {"modulus", std::abs(cl.value)},
                        {"alg_mult", cl.alg_mult},
                        {"geo_mult", cl.geo_mult},
                        {"chain_lengths", chains},
                        {"conjugate_partner", cl.conjugate_partner
                                                  ? ordered_json(*cl.conjugate_partner)
                                                  : ordered_json(nullptr)},
                        {"stability", to_string(cl.stability)}});
  }

  ordered_json classification{
      {"case", c.verdict ? ordered_json(to_string(*c.verdict)) : ordered_json(nullptr)},
      {"label", verdict_line(c)},
      {"s", c.s},
      {"s1", c.s1},
      {"n", c.n},
      {"m", c.m},
      {"candidate_count", c.candidate_count},
      {"enumerated_count", c.enumerated_count},
      {"accepted_count", c.accepted_count},
      {"boundary_blocked", c.boundary_blocked},
      {"realized_below_bound", c.realized_below_bound}};

  ordered_json doc{{"model", model_json},
                   {"spectrum", spectrum},
                   {"classification", classification}};
  if (!include_equilibria) return doc.dump(2) + "\n";

  ordered_json equilibria = ordered_json::array();
  for (std::size_t i = 0; i < report.equilibria.size(); ++i) {
    const auto& rec = report.equilibria[i];
    const auto& eq = rec.equilibrium;
    ordered_json eigen = ordered_json::array();
    for (Complex z : eq.closed_loop_eigenvalues) eigen.push_back(complex_json(z));
    equilibria.push_back(
        {{"index", i},
         {"selection", selection_json(eq.selection)},
         {"real", eq.real},
         {"N", matrix_json(eq.N, eq.real)},
         {"closed_loop_eigenvalues", eigen},
         {"residual", eq.residual_norm},
         {"pnn_condition", number_or_null(eq.pnn_condition)},
         {"factorization_error", rec.factorization_error},
         {"left_crosscheck",
          rec.left_error ? ordered_json(*rec.left_error) : ordered_json(nullptr)},
         {"left_crosscheck_note", rec.left_note}});
  }
  ordered_json rejections = ordered_json::array();
  for (const auto& r : report.rejections) {
    rejections.push_back({{"selection", selection_json(r.selection)},
                          {"reason", to_string(r.reason)},
                          {"pnn_condition", number_or_null(r.pnn_condition)},
                          {"detail", r.detail}});
  }
  doc["equilibria"] = equilibria;
  doc["rejections"] = rejections;
  if (report.alpha_family) {
    const auto& fam = *report.alpha_family;
    ordered_json members = ordered_json::array();
    for (const auto& member : fam.members) {
      ordered_json entry{{"alpha", complex_json(member.alpha)}};
      if (const auto* eq = std::get_if<Equilibrium>(&member.outcome)) {
        entry["N"] = matrix_json(eq->N, false);
        entry["residual"] = eq->residual_norm;
      } else {
        const auto& r = std::get<Rejection>(member.outcome);
        entry["rejection"] = to_string(r.reason);
        entry["detail"] = r.detail;
      }
      members.push_back(std::move(entry));
    }
    doc["alpha_family"] = {{"cluster", fam.cluster},
                           {"value", complex_json(report.spectrum.clusters[fam.cluster].value)},
                           {"members", members}};
  }
  return doc.dump(2) + "\n";
}

std::string render_trajectory_text(const Trajectory& trajectory,
                                   const BoundednessResult& bounded) {
  std::ostringstream os;
  os << "# rho_hat=" << num(trajectory.rho_hat) << " bounded="
     << (bounded.bounded ? "yes" : "no") << " max_ratio=" << num(bounded.max_ratio, 4)
     << "\n";
  os << "# t";
  if (!trajectory.k_path.empty()) {
    for (Eigen::Index i = 0; i < trajectory.k_path.front().size(); ++i) os << " k" << i;
    for (Eigen::Index i = 0; i < trajectory.q_path.front().size(); ++i) os << " q" << i;
  }
  os << "\n";
  for (std::size_t t = 0; t < trajectory.k_path.size(); ++t) {
    os << t;
    for (double x : trajectory.k_path[t]) os << " " << exact(x);
    for (double x : trajectory.q_path[t]) os << " " << exact(x);
    os << "\n";
  }
  return os.str();
}

std::string render_trajectory_json(const Trajectory& trajectory,
                                   const BoundednessResult& bounded,
                                   std::size_t equilibrium_index) {
  ordered_json rows = ordered_json::array();
  for (std::size_t t = 0; t < trajectory.k_path.size(); ++t) {
    rows.push_back({{"t", t},
                    {"k", std::vector<double>(trajectory.k_path[t].begin(),
                                              trajectory.k_path[t].end())},
                    {"q", std::vector<double>(trajectory.q_path[t].begin(),
                                              trajectory.q_path[t].end())}});
  }
  ordered_json doc{{"equilibrium_index", equilibrium_index},
                   {"rho_hat", trajectory.rho_hat},
                   {"bounded", bounded.bounded},
                   {"max_ratio", number_or_null(bounded.max_ratio)},
                   {"rows", rows}};
  return doc.dump(2) + "\n";
}

Matrix parse_feedback(std::string_view document, int m, int n) {
  json doc;
  try {
    doc = json::parse(document.begin(), document.end());
  } catch (const json::exception& e) {
    throw InputError(std::string("malformed N document: ") + e.what());
  }
  const std::string shape = std::to_string(m) + "x" + std::to_string(n);
  if (!doc.is_array() || static_cast<int>(doc.size()) != m) {
    throw InputError("N must be an " + shape + " array of arrays");
  }
  Matrix N(m, n);
  for (int i = 0; i < m; ++i) {
    const json& row = doc[i];
    if (!row.is_array() || static_cast<int>(row.size()) != n) {
      throw InputError("N must be an " + shape + " array of arrays");
    }
    for (int j = 0; j < n; ++j) {
      if (!row[j].is_number()) throw InputError("N entries must be numbers");
      N(i, j) = row[j].get<double>();
      if (!std::isfinite(N(i, j))) throw InputError("N contains a non-finite entry");
    }
  }
  return N;
}

VerifyResult verify_feedback(const ModelSpec& model, const Matrix& N) {
  const Blocks blocks = partition_blocks(model);
  const CMatrix Nc = N.cast<Complex>();
  VerifyResult result;
  result.residual = riccati_residual(Nc, blocks);
  result.residual_tol = model.tol().residual_tol;
  result.spectrum_split_error = spectrum_split_error(Nc, blocks);
  result.factorization_error = verify_charpoly_factorization(Nc, blocks);
  result.passed = result.residual <= result.residual_tol;
  return result;
}

std::string render_verify_text(const VerifyResult& r) {
  std::ostringstream os;
  os << (r.passed ? "PASS" : "FAIL") << ": Riccati residual " << num(r.residual, 6)
     << (r.passed ? " <= " : " > ") << num(r.residual_tol) << "\n";
  os << "spectrum split error " << num(r.spectrum_split_error, 6) << "\n";
  os << "characteristic polynomial factorization error " << num(r.factorization_error, 6)
     << "\n";
  return os.str();
}

std::string render_verify_json(const VerifyResult& r) {
  ordered_json doc{{"passed", r.passed},
                   {"residual", r.residual},
                   {"residual_tol", r.residual_tol},
                   {"spectrum_split_error", r.spectrum_split_error},
                   {"factorization_error", number_or_null(r.factorization_error)}};
  return doc.dump(2) + "\n";
}

}  // namespace bkeq

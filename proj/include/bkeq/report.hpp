#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "bkeq/classify.hpp"
#include "bkeq/dynamics.hpp"

namespace bkeq {

struct AnalysisOptions {
  SelectionMode mode = SelectionMode::RealOnly;
  BoundaryPolicy boundary = BoundaryPolicy::Refuse;
  /// Sample the alpha family when the verdict is Uncountable.
  bool sample_alpha = true;
};

struct EquilibriumRecord {
  Equilibrium equilibrium;
  /// Relative disagreement with the left-chain construction, when available.
  std::optional<double> left_error;
  /// Why the left check is unavailable, if it is.
  std::string left_note;
  double factorization_error = 0.0;
};

/// Everything one analysis run produces; rendered as text or JSON.
struct Report {
  ModelSpec model;
  SelectionMode mode = SelectionMode::RealOnly;
  BoundaryPolicy boundary = BoundaryPolicy::Refuse;
  /// Spectrum with the boundary policy applied.
  Spectrum spectrum;
  Classification classification;
  std::vector<EquilibriumRecord> equilibria;
  std::vector<Rejection> rejections;
  std::optional<AlphaFamily> alpha_family;
};

Report analyze(const ModelSpec& model, const AnalysisOptions& options = {});

/// One-line verdict such as "Case 3.1: 2 of 2 candidates realized".
std::string verdict_line(const Classification& c);

std::string render_text(const Report& report, bool include_equilibria);
std::string render_json(const Report& report, bool include_equilibria);

std::string render_trajectory_text(const Trajectory& trajectory,
                                   const BoundednessResult& bounded);
std::string render_trajectory_json(const Trajectory& trajectory,
                                   const BoundednessResult& bounded,
                                   std::size_t equilibrium_index);

/// Checks a user-supplied feedback matrix against the model.
struct VerifyResult {
  double residual = 0.0;
  double residual_tol = 0.0;
  double spectrum_split_error = 0.0;
  double factorization_error = 0.0;
  bool passed = false;
};

/// Parses an m x n JSON array of arrays of numbers. Throws InputError on a
/// malformed document or shape mismatch.
Matrix parse_feedback(std::string_view document, int m, int n);

VerifyResult verify_feedback(const ModelSpec& model, const Matrix& N);

std::string render_verify_text(const VerifyResult& result);
std::string render_verify_json(const VerifyResult& result);

}  // namespace bkeq

#include "bkeq/model.hpp"

#include <cmath>
#include <fstream>
#include "json.hpp"
#include <set>
#include <sstream>

#include "bkeq/error.hpp"

namespace bkeq {

namespace {

using nlohmann::json;

void check_tolerance(const char* name, double value) {
  if (!(value > 0.0 && value < 1e-2)) {
    std::ostringstream os;
    os << "tolerance " << name << " must lie in (0, 1e-2), got " << value;
    throw InputError(os.str());
  }
}

int read_count(const json& doc, const char* key) {
  if (!doc.contains(key)) {
    throw InputError(std::string("missing required key \"") + key + "\"");
  }
  const json& v = doc.at(key);
  if (!v.is_number_integer()) {
    throw InputError(std::string("\"") + key + "\" must be an integer");
  }
  const auto value = v.get<long long>();
  if (value < 0 || value > 100000) {
    throw InputError(std::string("\"") + key + "\" out of range");
  }
  return static_cast<int>(value);
}

double read_number(const json& v, const std::string& where) {
  if (!v.is_number()) throw InputError(where + " must be a number");
  const double x = v.get<double>();
  if (!std::isfinite(x)) throw InputError(where + " is not finite");
  return x;
}

}  // namespace

void Tolerances::validate() const {
  check_tolerance("unit_margin", unit_margin);
  check_tolerance("cluster_tol", cluster_tol);
  check_tolerance("rank_tol", rank_tol);
  check_tolerance("residual_tol", residual_tol);
}

Tolerances ToleranceOverrides::apply(Tolerances base) const {
  if (unit_margin) base.unit_margin = *unit_margin;
  if (cluster_tol) base.cluster_tol = *cluster_tol;
  if (rank_tol) base.rank_tol = *rank_tol;
  if (residual_tol) base.residual_tol = *residual_tol;
  base.validate();
  return base;
}

ModelSpec::ModelSpec(int n, int m, Matrix A, std::vector<std::string> names,
                     Tolerances tol)
    : n_(n), m_(m), A_(std::move(A)), names_(std::move(names)), tol_(tol) {
  if (n_ < 0) throw InputError("n must be non-negative");
  if (m_ < 1) throw InputError("m >= 1 required (the forward block is nonempty)");
  const int size = n_ + m_;
  if (A_.rows() != size || A_.cols() != size) {
    std::ostringstream os;
    os << "A must be " << size << "x" << size << ", got " << A_.rows() << "x"
       << A_.cols();
    throw InputError(os.str());
  }
  if (!A_.allFinite()) throw InputError("A contains a non-finite entry");
  if (!names_.empty() && static_cast<int>(names_.size()) != size) {
    std::ostringstream os;
    os << "names must list " << size << " labels, got " << names_.size();
    throw InputError(os.str());
  }
  tol_.validate();
}

ModelSpec ModelSpec::with_tolerances(const Tolerances& tol) const {
  return ModelSpec(n_, m_, A_, names_, tol);
}

Matrix Blocks::assemble() const {
  const Eigen::Index n = nn.rows();
  const Eigen::Index m = mm.rows();
  Matrix A(n + m, n + m);
  A.topLeftCorner(n, n) = nn;
  A.topRightCorner(n, m) = nm;
  A.bottomLeftCorner(m, n) = mn;
  A.bottomRightCorner(m, m) = mm;
  return A;
}

ModelSpec load_model(std::string_view document) {
  json doc;
  try {
    doc = json::parse(document.begin(), document.end());
  } catch (const json::out_of_range& e) {
    throw InputError(std::string("model document holds a number that is not finite: ") +
                     e.what());
  } catch (const json::exception& e) {
    throw InputError(std::string("malformed model document: ") + e.what());
  }
  if (!doc.is_object()) {
    throw InputError("malformed model document: expected a JSON object");
  }
  static const std::set<std::string> known{"n", "m", "A", "names", "tol"};
  for (const auto& item : doc.items()) {
    if (!known.count(item.key())) {
      throw InputError("unknown key \"" + item.key() + "\" in model document");
    }
  }

  const int n = read_count(doc, "n");
  const int m = read_count(doc, "m");
  if (n + m == 0) throw InputError("n + m must be positive");
  if (m < 1) throw InputError("m >= 1 required (the forward block is nonempty)");
  const int size = n + m;

  if (!doc.contains("A")) throw InputError("missing required key \"A\"");
  const json& rows = doc.at("A");
  if (!rows.is_array()) throw InputError("\"A\" must be an array of rows");
  if (static_cast<int>(rows.size()) != size) {
    std::ostringstream os;
    os << "A must be " << size << "x" << size << ": expected " << size
       << " rows, got " << rows.size();
    throw InputError(os.str());
  }
  Matrix A(size, size);
  for (int i = 0; i < size; ++i) {
    const json& row = rows[i];
    if (!row.is_array() || static_cast<int>(row.size()) != size) {
      std::ostringstream os;
      os << "A must be " << size << "x" << size << ": row " << i
         << " does not have " << size << " entries";
      throw InputError(os.str());
    }
    for (int j = 0; j < size; ++j) {
      std::ostringstream where;
      where << "A[" << i << "][" << j << "]";
      A(i, j) = read_number(row[j], where.str());
    }
  }

  std::vector<std::string> names;
  if (doc.contains("names")) {
    const json& list = doc.at("names");
    if (!list.is_array()) throw InputError("\"names\" must be an array of strings");
    for (const auto& label : list) {
      if (!label.is_string()) throw InputError("\"names\" must be an array of strings");
      names.push_back(label.get<std::string>());
    }
  }

  Tolerances tol;
  if (doc.contains("tol")) {
    const json& t = doc.at("tol");
    if (!t.is_object()) throw InputError("\"tol\" must be an object");
    for (const auto& item : t.items()) {
      const std::string where = "tol." + item.key();
      if (item.key() == "unit_margin") {
        tol.unit_margin = read_number(item.value(), where);
      } else if (item.key() == "cluster_tol") {
        tol.cluster_tol = read_number(item.value(), where);
      } else if (item.key() == "rank_tol") {
        tol.rank_tol = read_number(item.value(), where);
      } else if (item.key() == "residual_tol") {
        tol.residual_tol = read_number(item.value(), where);
      } else {
        throw InputError("unknown key \"" + item.key() + "\" in \"tol\"");
      }
    }
  }
  return ModelSpec(n, m, std::move(A), std::move(names), tol);
}

ModelSpec load_model_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot read model file " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  return load_model(buffer.str());
}

Blocks partition_blocks(const ModelSpec& spec) {
  const int n = spec.n();
  const int m = spec.m();
  const Matrix& A = spec.A();
  return Blocks{A.topLeftCorner(n, n), A.topRightCorner(n, m),
                A.bottomLeftCorner(m, n), A.bottomRightCorner(m, m)};
}

}  // namespace bkeq

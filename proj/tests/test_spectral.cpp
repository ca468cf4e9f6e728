#include <cmath>
#include <random>

#include "bkeq/error.hpp"
#include "bkeq/spectral.hpp"
#include "doctest.h"
#include "helpers.hpp"
#include "oracles.hpp"

using namespace bkeq;
using testing::mat;

namespace {

double chain_residual(const Matrix& A, const EigenCluster& c) {
  const Eigen::Index dim = A.rows();
  const CMatrix B = A.cast<Complex>() - c.value * CMatrix::Identity(dim, dim);
  double worst = 0.0;
  for (const auto& chain : c.chains) {
    for (std::size_t j = 0; j < chain.size(); ++j) {
      const CVector target = j == 0 ? CVector::Zero(dim) : chain[j - 1];
      worst = std::max(worst, (B * chain[j] - target).norm());
    }
  }
  return worst;
}

}  // namespace

TEST_CASE("eigendecompose: triangular 2x2 with distinct stable eigenvalues") {
  const auto spectrum = eigendecompose(testing::running_example());
  REQUIRE(spectrum.clusters.size() == 2);
  CHECK(spectrum.clusters[0].value == Complex(0.5, 0));
  CHECK(spectrum.clusters[1].value.real() == doctest::Approx(0.8).epsilon(1e-14));
  for (const auto& c : spectrum.clusters) {
    CHECK(c.alg_mult == 1);
    CHECK(c.geo_mult == 1);
    CHECK(c.stability == Stability::Stable);
    CHECK_FALSE(c.conjugate_partner);
  }
  CHECK(spectrum.s == 2);
  CHECK(spectrum.s1 == 2);
  CHECK_FALSE(spectrum.has_boundary);
  // eigenvector of 0.8 is (1, 0.3) up to scale
  const CVector& v = spectrum.clusters[1].chains[0][0];
  CHECK(std::abs(v(1) / v(0) - 0.3) < 1e-12);
  CHECK(v.norm() == doctest::Approx(1.0));
  CHECK(v(0).real() > 0);
  CHECK(v(0).imag() == 0.0);
}

TEST_CASE("eigendecompose: scaled identity has two length-1 chains") {
  const auto spectrum = eigendecompose(mat({{0.5, 0}, {0, 0.5}}), Tolerances{});
  REQUIRE(spectrum.clusters.size() == 1);
  const auto& c = spectrum.clusters[0];
  CHECK(c.value == Complex(0.5, 0));
  CHECK(c.alg_mult == 2);
  CHECK(c.geo_mult == 2);
  REQUIRE(c.chains.size() == 2);
  CHECK(c.chains[0].size() == 1);
  CHECK(c.chains[1].size() == 1);
  CHECK(spectrum.s == 2);
  CHECK(spectrum.s1 == 1);
}

TEST_CASE("eigendecompose: Jordan block has one length-2 chain") {
  const Matrix A = mat({{0.5, 1}, {0, 0.5}});
  const auto spectrum = eigendecompose(A, Tolerances{});
  REQUIRE(spectrum.clusters.size() == 1);
  const auto& c = spectrum.clusters[0];
  CHECK(c.alg_mult == 2);
  CHECK(c.geo_mult == 1);
  REQUIRE(c.chains.size() == 1);
  CHECK(c.chains[0].size() == 2);
  CHECK(chain_residual(A, c) < 1e-14);
  // eigenvector is e1
  CHECK(std::abs(c.chains[0][0](0) - 1.0) < 1e-15);
}

TEST_CASE("eigendecompose: identity sits on the boundary") {
  const auto spectrum = eigendecompose(mat({{1, 0}, {0, 1}}), Tolerances{});
  REQUIRE(spectrum.clusters.size() == 1);
  CHECK(spectrum.clusters[0].stability == Stability::Boundary);
  CHECK(spectrum.has_boundary);
  CHECK(spectrum.s == 0);
}

TEST_CASE("eigendecompose: similar Jordan structure with a looser cluster radius") {
  // S J S^-1 with J = J_2(0.5) + [2]; rounding splits the double root.
  const Matrix S = mat({{1, 0.2, 0.3}, {0.1, 1, 0.4}, {0.5, 0.3, 1}});
  const Matrix J = mat({{0.5, 1, 0}, {0, 0.5, 0}, {0, 0, 2}});
  const Matrix A = S * J * S.inverse();
  Tolerances tol;
  tol.cluster_tol = 1e-6;
  const auto spectrum = eigendecompose(A, tol);
  REQUIRE(spectrum.clusters.size() == 2);
  const auto& c = spectrum.clusters[0];
  CHECK(std::abs(c.value - 0.5) < 1e-7);
  CHECK(c.alg_mult == 2);
  CHECK(c.geo_mult == 1);
  CHECK(c.chains[0].size() == 2);
  CHECK(chain_residual(A, c) < 1e-6);
  CHECK(spectrum.clusters[1].stability == Stability::Unstable);
}

TEST_CASE("eigendecompose: complex pairs are conjugate partners") {
  const Matrix A = mat({{0.4, -0.3, 0}, {0.3, 0.4, 0}, {0, 0, 1.5}});
  const auto spectrum = eigendecompose(A, Tolerances{});
  REQUIRE(spectrum.clusters.size() == 3);
  // ordered by modulus then argument: 0.4-0.3i, 0.4+0.3i, 1.5
  CHECK(spectrum.clusters[0].value.imag() < 0);
  CHECK(spectrum.clusters[1].value.imag() > 0);
  CHECK(spectrum.clusters[0].conjugate_partner == 1u);
  CHECK(spectrum.clusters[1].conjugate_partner == 0u);
  CHECK(spectrum.clusters[0].value == std::conj(spectrum.clusters[1].value));
  CHECK(spectrum.clusters[0].chains[0][0] == spectrum.clusters[1].chains[0][0].conjugate());
  CHECK(std::abs(spectrum.clusters[1].value - Complex(0.4, 0.3)) < 1e-14);
}

TEST_CASE("stability_split orders by modulus then argument") {
  const auto s1 = stability_split(eigendecompose(testing::running_example()));
  CHECK(s1.stable == std::vector<std::size_t>{0, 1});
  CHECK(s1.unstable.empty());
  CHECK(s1.boundary.empty());

  const auto spec2 = eigendecompose(mat({{3, 0}, {0, 2}}), Tolerances{});
  const auto s2 = stability_split(spec2);
  CHECK(s2.stable.empty());
  REQUIRE(s2.unstable.size() == 2);
  CHECK(spec2.clusters[s2.unstable[0]].value.real() == 2.0);
  CHECK(spec2.clusters[s2.unstable[1]].value.real() == 3.0);

  const auto spec3 = eigendecompose(mat({{0.5, 0}, {0, 1.0}}), Tolerances{});
  const auto s3 = stability_split(spec3);
  REQUIRE(s3.boundary.size() == 1);
  CHECK(spec3.clusters[s3.boundary[0]].value.real() == 1.0);
}

TEST_CASE("resolve_boundary relabels unit-modulus clusters") {
  const auto spectrum = eigendecompose(mat({{0.5, 0}, {0, 1.0}}), Tolerances{});
  const auto stable = resolve_boundary(spectrum, BoundaryPolicy::TreatStable);
  CHECK_FALSE(stable.has_boundary);
  CHECK(stable.s == 2);
  const auto unstable = resolve_boundary(spectrum, BoundaryPolicy::TreatUnstable);
  CHECK(unstable.s == 1);
  CHECK(resolve_boundary(spectrum, BoundaryPolicy::Refuse).has_boundary);
}

TEST_CASE("classify_modulus uses the unit margin on both sides") {
  CHECK(classify_modulus(1.0 - 2e-9, 1e-9) == Stability::Stable);
  CHECK(classify_modulus(1.0 - 5e-10, 1e-9) == Stability::Boundary);
  CHECK(classify_modulus(1.0 + 5e-10, 1e-9) == Stability::Boundary);
  CHECK(classify_modulus(1.0 + 2e-9, 1e-9) == Stability::Unstable);
}

TEST_CASE("geometric_multiplicity examples") {
  CHECK(geometric_multiplicity(mat({{0.5, 0}, {0, 0.5}}), 0.5, Tolerances{}) == 2);
  CHECK(geometric_multiplicity(mat({{0.5, 1}, {0, 0.5}}), 0.5, Tolerances{}) == 1);
  CHECK(geometric_multiplicity(mat({{0.5, 1}, {0, 0.8}}), 0.8, Tolerances{}) == 1);
  CHECK_THROWS_AS(geometric_multiplicity(mat({{0.5, 1}, {0, 0.8}}), 0.3, Tolerances{}),
                  InputError);
}

TEST_CASE("eigendecompose reports a chain failure when clustering merges distinct roots") {
  // 0.5 and 0.5 + 1e-7 merge under a wide radius, but A - mean I is not
  // numerically singular at rank_tol.
  Tolerances tol;
  tol.cluster_tol = 1e-3;
  try {
    eigendecompose(mat({{0.5, 0}, {0, 0.5 + 1e-7}}), tol);
    FAIL("expected NumericalError");
  } catch (const NumericalError& e) {
    CHECK(std::string(e.what()).find("cluster_tol") != std::string::npos);
  }
}

TEST_CASE("spectral properties on random matrices") {
  std::mt19937_64 rng(20240601);
  for (int trial = 0; trial < 200; ++trial) {
    std::uniform_int_distribution<int> dim_dist(1, 12);
    const int dim = dim_dist(rng);
    const Matrix A = testing::random_matrix(rng, dim, -1.5, 1.5);
    const Tolerances tol;
    const auto spectrum = eigendecompose(A, tol);
    CAPTURE(trial);

    CHECK(spectrum.dimension() == dim);
    int s = 0, s1 = 0;
    for (std::size_t i = 0; i < spectrum.clusters.size(); ++i) {
      const auto& c = spectrum.clusters[i];
      int total = 0;
      for (const auto& chain : c.chains) total += static_cast<int>(chain.size());
      CHECK(total == c.alg_mult);
      CHECK(static_cast<int>(c.chains.size()) == c.geo_mult);
      CHECK(c.stability == classify_modulus(std::abs(c.value), tol.unit_margin));
      if (c.stability == Stability::Stable) {
        s += c.alg_mult;
        ++s1;
      }
      if (c.is_real()) {
        CHECK_FALSE(c.conjugate_partner);
      } else {
        REQUIRE(c.conjugate_partner);
        const auto& partner = spectrum.clusters[*c.conjugate_partner];
        CHECK(partner.conjugate_partner == i);
        CHECK(partner.value == std::conj(c.value));
        CHECK(partner.chains[0][0] == c.chains[0][0].conjugate());
      }
      CHECK(geometric_multiplicity(A, c.value, tol) == c.geo_mult);
    }
    CHECK(spectrum.s == s);
    CHECK(spectrum.s1 == s1);

    const auto basis = jordan_basis(spectrum);
    const double recon = (A.cast<Complex>() * basis.P - basis.P * basis.J).norm();
    CHECK(recon <= tol.residual_tol * (1.0 + A.norm()) * basis.P.norm());

    Complex product(1.0, 0.0);
    for (const auto& c : spectrum.clusters) product *= std::pow(c.value, c.alg_mult);
    const double det = A.determinant();
    CHECK(std::abs(product - det) <= 1e-6 * std::max(std::abs(det), 1e-12) + 1e-12);
  }
}

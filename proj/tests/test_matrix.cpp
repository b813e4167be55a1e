#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "dqs/errors.hpp"
#include "dqs/matrix.hpp"
#include "oracles.hpp"

using dqs::Basis;
using dqs::EigenSystem;
using dqs::SymMatrix;

namespace {

double reconstruction_error(const SymMatrix& a, const EigenSystem& es) {
  const int m = a.dim();
  double err = 0.0;
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) {
      double s = 0.0;
      for (int k = 0; k < m; ++k)
        s += es.eigenvalues[k] * es.eigenvectors[k][i] * es.eigenvectors[k][j];
      err = std::max(err, std::abs(s - a(i, j)));
    }
  return err;
}

double orthonormality_error(const EigenSystem& es) {
  const int m = static_cast<int>(es.eigenvectors.size());
  double err = 0.0;
  for (int a = 0; a < m; ++a)
    for (int b = 0; b < m; ++b) {
      const double g = dqs::dot(es.eigenvectors[a], es.eigenvectors[b]);
      err = std::max(err, std::abs(g - (a == b ? 1.0 : 0.0)));
    }
  return err;
}

}  // namespace

TEST_CASE("eigensym: identity") {
  const auto es = dqs::eigensym(SymMatrix::identity(4), 1e-8);
  CHECK(es.rank == 4);
  for (double l : es.eigenvalues) CHECK(l == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("eigensym: ideal protocol matrix against two independent routes") {
  const SymMatrix f = oracles::ideal_protocol_cfim();

  // Route 1: circulant symbol 1/2 + (1/2) cos(pi k / 2).
  const auto symbol = oracles::circulant4_eigenvalues(0.5, 0.25, 0.0, 0.25);
  CHECK(symbol[0] == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(symbol[1] == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(symbol[2] == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(symbol[3] == doctest::Approx(0.0).epsilon(1e-14));

  // Route 2: Jacobi sweep.
  const auto jac = oracles::jacobi_eigensym(f);

  const auto es = dqs::eigensym(f, 1e-8);
  CHECK(es.rank == 3);
  for (int k = 0; k < 4; ++k) {
    CHECK(es.eigenvalues[k] == doctest::Approx(symbol[k]).epsilon(1e-10));
    CHECK(es.eigenvalues[k] == doctest::Approx(jac.eigenvalues[k]).epsilon(1e-10));
  }
  CHECK(reconstruction_error(f, es) <= 1e-9);
  CHECK(orthonormality_error(es) <= 1e-9);
}

TEST_CASE("eigensym: zero matrix") {
  const auto es = dqs::eigensym(SymMatrix(3), 1e-8);
  CHECK(es.rank == 0);
  for (double l : es.eigenvalues) CHECK(l == 0.0);
}

TEST_CASE("eigensym: non-finite input rejected") {
  SymMatrix a(2);
  a.set(0, 1, std::nan(""));
  CHECK_THROWS_AS(dqs::eigensym(a, 1e-8), dqs::InvalidMatrix);
  CHECK_THROWS_AS(dqs::eigensym(SymMatrix::identity(2), 1.5), dqs::InvalidInput);
}

TEST_CASE("eigensym: deterministic sign convention") {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 50; ++trial) {
    const auto a = oracles::random_symmetric(5, rng);
    const auto e1 = dqs::eigensym(a, 1e-8);
    const auto e2 = dqs::eigensym(a, 1e-8);
    for (int k = 0; k < 5; ++k) {
      CHECK(e1.eigenvalues[k] == e2.eigenvalues[k]);
      for (int i = 0; i < 5; ++i) CHECK(e1.eigenvectors[k][i] == e2.eigenvectors[k][i]);
      // largest-magnitude component is positive
      int pivot = 0;
      for (int i = 1; i < 5; ++i)
        if (std::abs(e1.eigenvectors[k][i]) > std::abs(e1.eigenvectors[k][pivot])) pivot = i;
      CHECK(e1.eigenvectors[k][pivot] > 0.0);
    }
  }
}

TEST_CASE("eigensym: reconstruction and orthonormality on random matrices") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 1000; ++trial) {
    const int m = 2 + static_cast<int>(trial % 7);
    const auto a = oracles::random_symmetric(m, rng, 3.0);
    const auto es = dqs::eigensym(a, 1e-8);
    const double scale = std::max(1.0, a.max_abs());
    REQUIRE(reconstruction_error(a, es) <= 1e-9 * scale);
    REQUIRE(orthonormality_error(es) <= 1e-9);
  }
}

TEST_CASE("pinv: diagonal and identity cases") {
  SymMatrix d(2);
  d.set(0, 0, 2.0);
  const auto dp = dqs::pinv(d, 1e-8);
  CHECK(dp(0, 0) == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(dp(1, 1) == 0.0);
  CHECK(dp(0, 1) == 0.0);

  const auto ip = dqs::pinv(SymMatrix::identity(5), 1e-8);
  CHECK(oracles::max_abs_diff(ip, SymMatrix::identity(5)) <= 1e-12);
}

TEST_CASE("pinv: Penrose identities and support identity for the protocol matrix") {
  const SymMatrix f = oracles::ideal_protocol_cfim();
  const SymMatrix fp = dqs::pinv(f, 1e-8);
  const SymMatrix pi = dqs::support_projector(f, 1e-8);

  const int m = 4;
  // A A+ A = A and A+ A A+ = A+; both products are symmetric by construction.
  SymMatrix afa(m), faf(m), fpf(m);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) {
      double s1 = 0.0, s2 = 0.0, s3 = 0.0;
      for (int k = 0; k < m; ++k)
        for (int l = 0; l < m; ++l) {
          s1 += f(i, k) * fp(k, l) * f(l, j);
          s2 += fp(i, k) * f(k, l) * fp(l, j);
          s3 += fp(i, k) * (k == l ? 1.0 : 0.0) * f(l, j);
        }
      if (j <= i) {
        afa.set(i, j, s1);
        faf.set(i, j, s2);
        fpf.set(i, j, s3);
      }
    }
  CHECK(oracles::max_abs_diff(afa, f) <= 1e-8);
  CHECK(oracles::max_abs_diff(faf, fp) <= 1e-8);
  CHECK(oracles::max_abs_diff(fpf, pi) <= 1e-9);  // F+ F equals the support projector

  // Frozen closed form: circulant(5/4, 1/4, -3/4, 1/4).
  const SymMatrix expected = SymMatrix::from_rows({{1.25, 0.25, -0.75, 0.25},
                                                   {0.25, 1.25, 0.25, -0.75},
                                                   {-0.75, 0.25, 1.25, 0.25},
                                                   {0.25, -0.75, 0.25, 1.25}});
  CHECK(oracles::max_abs_diff(fp, expected) <= 1e-9);
}

TEST_CASE("pinv: involution up to support projection") {
  std::mt19937_64 rng(13);
  for (int trial = 0; trial < 200; ++trial) {
    const int m = 2 + static_cast<int>(trial % 7);
    const auto a = oracles::random_psd(m, 1 + static_cast<int>(trial % m), rng);
    const auto app = dqs::pinv(dqs::pinv(a, 1e-8), 1e-8);
    const auto pi = dqs::support_projector(a, 1e-8);
    // pinv(pinv(A)) = Pi A Pi
    SymMatrix pap(m);
    for (int i = 0; i < m; ++i)
      for (int j = 0; j <= i; ++j) {
        double s = 0.0;
        for (int k = 0; k < m; ++k)
          for (int l = 0; l < m; ++l) s += pi(i, k) * a(k, l) * pi(l, j);
        pap.set(i, j, s);
      }
    REQUIRE(oracles::max_abs_diff(app, pap) <= 1e-7);
  }
}

TEST_CASE("support_projector: full rank, singular, zero") {
  const auto id = dqs::support_projector(SymMatrix::identity(4), 1e-8);
  CHECK(oracles::max_abs_diff(id, SymMatrix::identity(4)) <= 1e-12);

  const SymMatrix f = oracles::ideal_protocol_cfim();
  const auto pi = dqs::support_projector(f, 1e-8);
  // I - k k^T with k the alternating unit vector.
  const auto k = oracles::alternating_kernel_unit();
  SymMatrix expected = SymMatrix::identity(4);
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j <= i; ++j) expected.add(i, j, -k[i] * k[j]);
  CHECK(oracles::max_abs_diff(pi, expected) <= 1e-9);

  // Projector laws.
  SymMatrix pi2(4), pif(4);
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j <= i; ++j) {
      double s2 = 0.0, sf = 0.0;
      for (int l = 0; l < 4; ++l) {
        s2 += pi(i, l) * pi(l, j);
        sf += pi(i, l) * f(l, j);
      }
      pi2.set(i, j, s2);
      pif.set(i, j, sf);
    }
  CHECK(oracles::max_abs_diff(pi2, pi) <= 1e-8);
  CHECK(oracles::max_abs_diff(pif, f) <= 1e-8 * std::max(1.0, f.max_abs()));

  const auto zero = dqs::support_projector(SymMatrix(3), 1e-8);
  CHECK(zero.max_abs() == 0.0);
}

TEST_CASE("support_projector: scale invariance") {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 200; ++trial) {
    const int m = 2 + static_cast<int>(trial % 7);
    const auto a = oracles::random_psd(m, 1 + static_cast<int>(trial % m), rng);
    const double c = 0.5 + 10.0 * dqs::uniform01(rng);
    const auto p1 = dqs::support_projector(a, 1e-8);
    const auto p2 = dqs::support_projector(c * a, 1e-8);
    REQUIRE(oracles::max_abs_diff(p1, p2) <= 1e-12);
  }
}

TEST_CASE("complement_basis: axis input") {
  const auto basis = dqs::complement_basis({{1.0, 0.0, 0.0}});
  REQUIRE(basis.size() == 2);
  for (const auto& v : basis.vectors) {
    CHECK(std::abs(v[0]) <= 1e-12);
    CHECK(dqs::norm(v) == doctest::Approx(1.0).epsilon(1e-12));
  }
  CHECK(std::abs(dqs::dot(basis.vectors[0], basis.vectors[1])) <= 1e-9);
}

TEST_CASE("complement_basis: uniform weight vector") {
  const auto basis = dqs::complement_basis({{0.25, 0.25, 0.25, 0.25}});
  REQUIRE(basis.size() == 3);
  const std::vector<double> ones = {1.0, 1.0, 1.0, 1.0};
  for (const auto& v : basis.vectors) CHECK(std::abs(dqs::dot(v, ones)) <= 1e-12);
}

TEST_CASE("complement_basis: full span and error cases") {
  const auto empty = dqs::complement_basis(
      {{1, 0, 0, 0}, {0, 1, 0, 0}, {0, 0, 1, 0}, {0, 0, 0, 1}});
  CHECK(empty.size() == 0);

  CHECK_THROWS_AS(dqs::complement_basis({{0.0, 0.0}}), dqs::InvalidInput);
  CHECK_THROWS_AS(dqs::complement_basis({}), dqs::InvalidInput);
  CHECK_THROWS_AS(dqs::complement_basis({{1.0, 0.0}, {1.0, 0.0, 0.0}}), dqs::InvalidInput);
}

TEST_CASE("complement_basis: orthogonality property on random spans") {
  std::mt19937_64 rng(19);
  for (int trial = 0; trial < 300; ++trial) {
    const int m = 2 + static_cast<int>(trial % 7);
    const int r = 1 + static_cast<int>(rng() % m);
    std::vector<std::vector<double>> ws;
    for (int j = 0; j < r; ++j) ws.push_back(oracles::random_unit_vector(m, rng));
    const auto basis = dqs::complement_basis(ws);
    for (const auto& b : basis.vectors) {
      REQUIRE(dqs::norm(b) == doctest::Approx(1.0).epsilon(1e-10));
      for (const auto& w : ws) REQUIRE(std::abs(dqs::dot(b, w)) <= 1e-10);
    }
    // dimension counting: complement size + span rank == m
    const auto span_rank = m - basis.size();
    REQUIRE(span_rank >= 1);
    REQUIRE(span_rank <= std::min(r, m));
  }
}

TEST_CASE("SymMatrix: symmetrization and validation") {
  const SymMatrix a(2, std::vector<double>{1.0, 2.0, 4.0, 3.0});
  CHECK(a(0, 1) == 3.0);
  CHECK(a(1, 0) == 3.0);
  CHECK_THROWS_AS(SymMatrix(0), dqs::InvalidMatrix);
  CHECK_THROWS_AS(SymMatrix::from_rows({{1.0, 2.0}, {3.0}}), dqs::InvalidMatrix);
}

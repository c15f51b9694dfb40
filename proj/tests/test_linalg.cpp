#include <cmath>
#include <cstdlib>

#include <doctest.h>

#include "generators.hpp"
#include "qrand/linalg.hpp"

using namespace qrand;
using doctest::Approx;

namespace {

// -sum p log2 p over a plain list, written independently of the library.
double entropy_of(std::initializer_list<double> ps) {
  double h = 0.0;
  for (double p : ps)
    if (p > 0) h -= p * std::log(p) / std::log(2.0);
  return h;
}

} // namespace

TEST_CASE("construction rejects non-Hermitian and non-square input") {
  CMatrix m(2, 2);
  m << 1, 2, 3, 4;
  CHECK_THROWS_AS(HermitianMatrix{m}, ValidationError);
  CHECK_THROWS_AS(HermitianMatrix{CMatrix(2, 3)}, ValidationError);
  CHECK_THROWS_AS(HermitianMatrix::zero(kMaxDim + 1), SizeError);
  CMatrix ok(2, 2);
  ok << 1, Complex(0, 1), Complex(0, -1), 2;
  HermitianMatrix h(ok);
  CHECK(h.trace() == Approx(3.0));
  CHECK(h.expectation(CVector::Unit(2, 1)) == Approx(2.0));
}

TEST_CASE("eigendecomposition reconstructs random Hermitian matrices") {
  testgen::Gen gen(11);
  for (int trial = 0; trial < 200; ++trial) {
    const int d = gen.integer(1, 8);
    HermitianMatrix h = gen.hermitian(d);
    Spectrum sp = eig_hermitian(h);
    CMatrix back = sp.eigenvectors * sp.eigenvalues.asDiagonal() * sp.eigenvectors.adjoint();
    CHECK(max_abs_diff(back, h.mat()) < 1e-9);
    for (Eigen::Index i = 1; i < sp.eigenvalues.size(); ++i) CHECK(sp.eigenvalues(i - 1) >= sp.eigenvalues(i));
  }
}

TEST_CASE("matrix square root examples") {
  CHECK(max_abs_diff(matrix_sqrt(HermitianMatrix::diagonal({4, 9})).mat(),
                     HermitianMatrix::diagonal({2, 3}).mat()) < 1e-12);
  CHECK(max_abs_diff(matrix_sqrt(HermitianMatrix::identity(3)).mat(), CMatrix::Identity(3, 3)) < 1e-12);
  HermitianMatrix r = matrix_sqrt(HermitianMatrix::diagonal({0.925, 0.075}));
  CHECK(r(0, 0).real() == Approx(0.961769).epsilon(1e-6));
  CHECK(r(1, 1).real() == Approx(0.273861).epsilon(1e-6));
}

TEST_CASE("matrix square root squares back and rejects negative spectra") {
  testgen::Gen gen(12);
  for (int trial = 0; trial < 100; ++trial) {
    const int d = gen.integer(1, 8);
    HermitianMatrix p = gen.psd(d, gen.integer(1, d));
    HermitianMatrix s = matrix_sqrt(p);
    CHECK(max_abs_diff(s.mat() * s.mat(), p.mat()) < 1e-9);
    CHECK(min_eigenvalue(s) > -1e-12);
  }
  CHECK_THROWS_AS(matrix_sqrt(HermitianMatrix::diagonal({1.0, -1e-3})), DomainError);
  HermitianMatrix tiny = matrix_sqrt(HermitianMatrix::diagonal({1.0, -1e-12}));
  CHECK(tiny(1, 1).real() == Approx(0.0));
}

TEST_CASE("inverse square root acts on the support only") {
  HermitianMatrix w = matrix_inv_sqrt(HermitianMatrix::diagonal({4.0, 0.0}));
  CHECK(w(0, 0).real() == Approx(0.5));
  CHECK(w(1, 1).real() == Approx(0.0));
}

TEST_CASE("fidelity examples") {
  HermitianMatrix zero = HermitianMatrix::diagonal({1, 0});
  HermitianMatrix one = HermitianMatrix::diagonal({0, 1});
  HermitianMatrix mixed = HermitianMatrix::diagonal({0.5, 0.5});
  CHECK(fidelity(zero, zero) == Approx(1.0));
  CHECK(fidelity(zero, one) == Approx(0.0));
  CHECK(fidelity(zero, mixed) == Approx(1.0 / std::sqrt(2.0)));
  CHECK(fidelity(zero, mixed) == Approx(0.707107).epsilon(1e-6));
  CHECK_THROWS_AS(fidelity(HermitianMatrix::diagonal({1, -0.5}), mixed), DomainError);
}

TEST_CASE("fidelity is symmetric and bounded for random states") {
  testgen::Gen gen(13);
  for (int trial = 0; trial < 100; ++trial) {
    const int d = gen.integer(1, 6);
    HermitianMatrix a = gen.density(d, gen.integer(1, d));
    HermitianMatrix b = gen.density(d, gen.integer(1, d));
    const double f = fidelity(a, b);
    // Rank-deficient inputs lose half the digits to the square root.
    CHECK(std::abs(f - fidelity(b, a)) <= 1e-7);
    CHECK(f >= -1e-12);
    CHECK(f <= 1.0 + 1e-9);
  }
}

TEST_CASE("von Neumann entropy examples") {
  CHECK(von_neumann_entropy(HermitianMatrix::outer(CVector::Unit(3, 1))) == Approx(0.0));
  CHECK(von_neumann_entropy(HermitianMatrix::identity(4) * 0.25) == Approx(2.0));
  const double s = von_neumann_entropy(HermitianMatrix::diagonal({0.925, 0.075}));
  CHECK(s == Approx(entropy_of({0.925, 0.075})).epsilon(1e-12));
  CHECK(s == Approx(0.384311539).epsilon(1e-8));
  CHECK_THROWS_AS(von_neumann_entropy(HermitianMatrix::diagonal({0.5, 0.4})), ValidationError);
}

TEST_CASE("von Neumann entropy is unitarily invariant") {
  testgen::Gen gen(14);
  for (int trial = 0; trial < 100; ++trial) {
    const int d = gen.integer(1, 8);
    HermitianMatrix rho = gen.density(d, gen.integer(1, d));
    const double s = von_neumann_entropy(rho);
    CHECK(von_neumann_entropy(rho.conjugated(gen.unitary(d))) == Approx(s).epsilon(1e-9));
    CHECK(s >= -1e-12);
    CHECK(s <= std::log2(static_cast<double>(d)) + 1e-9);
  }
}

TEST_CASE("binary and Shannon entropy") {
  CHECK(binary_entropy(0.5) == Approx(1.0));
  CHECK(binary_entropy(0.0) == 0.0);
  CHECK(binary_entropy(1.0) == 0.0);
  CHECK(binary_entropy(0.763391) == Approx(0.789).epsilon(0.001 / 0.789));
  CHECK(binary_entropy(0.763391) == Approx(entropy_of({0.763391, 0.236609})).epsilon(1e-12));
  CHECK_THROWS_AS(binary_entropy(1.5), DomainError);
  CHECK_THROWS_AS(binary_entropy(-0.1), DomainError);
  CHECK(shannon_entropy({0.25, 0.25, 0.25, 0.25}) == Approx(2.0));
  CHECK(shannon_entropy({1.0, 0.0}) == 0.0);
}

TEST_CASE("PSD check and trace product") {
  CHECK(is_psd(HermitianMatrix::diagonal({1, 0}), 1e-9));
  CHECK_FALSE(is_psd(HermitianMatrix::diagonal({1, -1e-6}), 1e-9));
  CHECK(trace_product(HermitianMatrix::diagonal({1, 2}), HermitianMatrix::diagonal({3, 4})) == Approx(11.0));
}

TEST_CASE("default tolerances honour the environment") {
  const char* env = std::getenv("QRAND_TOL");
  if (env) {
    CHECK(default_tolerances().feasibility == Approx(std::strtod(env, nullptr)));
  } else {
    CHECK(default_tolerances().feasibility == 1e-9);
  }
  CHECK(default_tolerances().clamp == 1e-10);
}

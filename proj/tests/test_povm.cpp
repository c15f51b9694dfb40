#include <algorithm>
#include <numeric>

#include <doctest.h>

#include "generators.hpp"
#include "qrand/povm.hpp"

using namespace qrand;
using doctest::Approx;

TEST_CASE("pure states are normalized and phase-fixed") {
  PureState s(CVector::Constant(2, Complex(0, 1.0 / std::sqrt(2.0))));
  CHECK(s[0].imag() == Approx(0.0));
  CHECK(s[0].real() > 0.0);
  CHECK(s.amplitudes().norm() == Approx(1.0));
  CHECK_THROWS_AS(PureState(CVector::Constant(2, 1.0)), ValidationError);
  CVector leading_zero(3);
  leading_zero << 0.0, Complex(0, -0.6), 0.8;
  PureState z(leading_zero);
  CHECK(z[1].real() == Approx(0.6));
  CHECK(z[1].imag() == Approx(0.0));
}

TEST_CASE("POVM validation") {
  CHECK_THROWS_AS(Povm({HermitianMatrix::identity(2)}), ValidationError);
  CHECK_THROWS_AS(Povm({HermitianMatrix::diagonal({1.2, 0.5}), HermitianMatrix::diagonal({-0.2, 0.5})}),
                  ValidationError);
  CHECK_THROWS_AS(Povm({HermitianMatrix::diagonal({0.5, 0.5}), HermitianMatrix::diagonal({0.4, 0.5})}),
                  ValidationError);
  Povm ok({HermitianMatrix::diagonal({0.5, 0.5}), HermitianMatrix::diagonal({0.5, 0.5})});
  CHECK(ok.size() == 2);
  CHECK(ok.dim() == 2);
}

TEST_CASE("depolarizing channel examples") {
  HermitianMatrix op = HermitianMatrix::diagonal({0.3, 0.7});
  CHECK(max_abs_diff(depolarize(op, 0.0).mat(), op.mat()) < 1e-15);
  CHECK(max_abs_diff(depolarize(HermitianMatrix::diagonal({1, 0, 0}), 1.0).mat(), CMatrix::Identity(3, 3) / 3.0) < 1e-15);
  HermitianMatrix r = depolarize(HermitianMatrix::diagonal({1, 0}), 0.15);
  CHECK(r(0, 0).real() == Approx(0.925));
  CHECK(r(1, 1).real() == Approx(0.075));
  CHECK_THROWS_AS(depolarize(op, 1.5), DomainError);
  testgen::Gen gen(21);
  for (int trial = 0; trial < 50; ++trial) {
    HermitianMatrix h = gen.hermitian(gen.integer(1, 6));
    CHECK(depolarize(h, gen.uniform()).trace() == Approx(h.trace()).epsilon(1e-12));
  }
}

TEST_CASE("noise model stores derived parameters") {
  NoiseModel n(3, 0.2);
  CHECK(n.A == 3 - 0.2 * 2);
  CHECK(n.delta == 0.2 * (2 - 0.2));
  CHECK_THROWS_AS(NoiseModel(1, 0.1), DomainError);
  CHECK_THROWS_AS(NoiseModel(2, -0.1), DomainError);
}

TEST_CASE("noisy projective measurement examples") {
  Povm p0 = noisy_projective(2, 0.0);
  CHECK(max_abs_diff(p0[0].mat(), HermitianMatrix::diagonal({1, 0}).mat()) < 1e-15);
  Povm p1 = noisy_projective(2, 1.0);
  CHECK(max_abs_diff(p1[1].mat(), CMatrix::Identity(2, 2) * 0.5) < 1e-15);
  Povm p3 = noisy_projective(3, 0.2);
  CHECK(p3[0](0, 0).real() == Approx(0.866667).epsilon(1e-6));
  CHECK(p3[0](1, 1).real() == Approx(0.066667).epsilon(1e-5));
  CHECK(p3[0](2, 2).real() == Approx(0.066667).epsilon(1e-5));
}

TEST_CASE("noisy projective spectra") {
  for (int d = 2; d <= 6; ++d)
    for (double eps : {0.0, 0.1, 0.5, 0.9, 1.0}) {
      NoiseModel n(d, eps);
      Povm p = noisy_projective(n);
      CHECK(p.size() == d);
      for (int x = 0; x < d; ++x) {
        Spectrum sp = eig_hermitian(p[x]);
        CHECK(sp.max() == Approx(n.A / d).epsilon(1e-12));
        CHECK(sp.eigenvalues(1) == Approx(eps / d).epsilon(1e-12));
        CHECK(sp.min() == Approx(eps / d).epsilon(1e-12));
      }
    }
}

TEST_CASE("noisy projective measurements are permutation covariant") {
  for (int d = 2; d <= 5; ++d) {
    Povm p = noisy_projective(d, 0.3);
    std::vector<int> perm(static_cast<std::size_t>(d));
    std::iota(perm.begin(), perm.end(), 0);
    do {
      CMatrix P = permutation_matrix(perm);
      for (int x = 0; x < d; ++x) {
        CMatrix lhs = P.transpose() * p[perm[static_cast<std::size_t>(x)]].mat() * P;
        CHECK(max_abs_diff(lhs, p[x].mat()) == 0.0);
      }
    } while (std::next_permutation(perm.begin(), perm.end()));
  }
}

TEST_CASE("unbiased state and Born probabilities") {
  PureState psi2 = unbiased_state(2);
  CHECK(psi2[0].real() == Approx(1 / std::sqrt(2.0)));
  CHECK(psi2[1].real() == Approx(1 / std::sqrt(2.0)));
  PureState psi4 = unbiased_state(4);
  for (int i = 0; i < 4; ++i) CHECK(psi4[i].real() == Approx(0.5));
  for (double p : born_probabilities(unbiased_state(3), noisy_projective(3, 0.2))) CHECK(p == Approx(1.0 / 3));
  std::vector<double> b = born_probabilities(PureState(CVector::Unit(2, 0)), noisy_projective(2, 0.15));
  CHECK(b[0] == Approx(0.925));
  CHECK(b[1] == Approx(0.075));
  testgen::Gen gen(22);
  Povm trivial({HermitianMatrix::identity(2) * 0.5, HermitianMatrix::identity(2) * 0.5});
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<double> t = born_probabilities(gen.state(2), trivial);
    CHECK(t[0] == Approx(0.5));
    const int d = gen.integer(2, 6);
    std::vector<double> u = born_probabilities(gen.state(d), gen.povm(d, gen.integer(2, 4)));
    CHECK(std::accumulate(u.begin(), u.end(), 0.0) == Approx(1.0).epsilon(1e-10));
    for (double v : u) CHECK(v >= -1e-12);
  }
  CHECK_THROWS_AS(born_probabilities(unbiased_state(3), trivial), ValidationError);
}

TEST_CASE("coarse graining") {
  const double eps = 0.2;
  Povm hat = coarse_grain(noisy_projective(4, eps), half_split(4));
  CHECK(hat.size() == 2);
  CHECK(max_abs_diff(hat[0].mat(), HermitianMatrix::diagonal({0.9, 0.9, 0.1, 0.1}).mat()) < 1e-12);
  CHECK(max_abs_diff(hat[0].mat(),
                     HermitianMatrix::diagonal({(2 - eps) / 2, (2 - eps) / 2, eps / 2, eps / 2}).mat()) < 1e-12);
  Povm p = noisy_projective(3, 0.4);
  Povm same = coarse_grain(p, {{0}, {1}, {2}});
  for (int x = 0; x < 3; ++x) CHECK(max_abs_diff(same[x].mat(), p[x].mat()) == 0.0);
  CHECK_THROWS_AS(coarse_grain(p, {{0, 1}, {1, 2}}), ValidationError);
  CHECK_THROWS_AS(coarse_grain(p, {{0}, {1}}), ValidationError);
  CHECK_THROWS_AS(coarse_grain(p, {{0, 1, 2}, {}}), ValidationError);
  CHECK_THROWS_AS(half_split(5), DomainError);
}

TEST_CASE("coarse graining preserves completeness and positivity") {
  testgen::Gen gen(23);
  for (int trial = 0; trial < 50; ++trial) {
    const int d = gen.integer(2, 5), m = gen.integer(3, 6);
    Povm p = gen.povm(d, m);
    std::vector<int> label(static_cast<std::size_t>(m));
    for (int x = 0; x < m; ++x) label[static_cast<std::size_t>(x)] = x < 2 ? x : gen.integer(0, 1);
    Partition part(2);
    for (int x = 0; x < m; ++x) part[static_cast<std::size_t>(label[static_cast<std::size_t>(x)])].push_back(x);
    Povm c = coarse_grain(p, part);
    CHECK(max_abs_diff((c[0] + c[1]).mat(), CMatrix::Identity(d, d)) < 1e-9);
    CHECK(is_psd(c[0], 1e-9));
    CHECK(is_psd(c[1], 1e-9));
  }
}

TEST_CASE("two-outcome qubit POVMs") {
  Povm proj = two_outcome_qubit(1.0, 0.0);
  CHECK(max_abs_diff(proj[0].mat(), HermitianMatrix::diagonal({1, 0}).mat()) < 1e-15);
  Povm half = two_outcome_qubit(0.5, 0.5);
  CHECK(max_abs_diff(half[0].mat(), half[1].mat()) < 1e-15);
  Povm np = two_outcome_qubit(0.925, 0.075);
  Povm ref = noisy_projective(2, 0.15);
  CHECK(max_abs_diff(np[0].mat(), ref[0].mat()) < 1e-12);
  bool swapped = false;
  Povm big = two_outcome_qubit(0.9, 0.6, std::nullopt, &swapped);
  CHECK(swapped);
  CHECK(big[0].trace() == Approx(0.5));
  CHECK_THROWS_AS(two_outcome_qubit(1.2, 0.1), DomainError);
  CHECK_THROWS_AS(two_outcome_qubit(0.2, 0.5), DomainError);
  testgen::Gen gen(24);
  CMatrix u = gen.unitary(2);
  Povm rot = two_outcome_qubit(0.7, 0.2, u);
  CHECK(max_eigenvalue(rot[0]) == Approx(0.7));
  CHECK(min_eigenvalue(rot[0]) == Approx(0.2));
}

TEST_CASE("depolarizing noise on state and measurement preserves the Born rule") {
  testgen::Gen gen(25);
  for (int trial = 0; trial < 100; ++trial) {
    const int d = gen.integer(2, 6);
    const double eps = gen.uniform();
    const double delta = eps * (2 - eps);
    HermitianMatrix rho = gen.density(d);
    HermitianMatrix M = gen.density(d);
    const double both = trace_product(depolarize(rho, eps), depolarize(M, eps));
    CHECK(both == Approx(trace_product(depolarize(rho, delta), M)).epsilon(1e-10));
    CHECK(both == Approx(trace_product(rho, depolarize(M, delta))).epsilon(1e-10));
  }
}

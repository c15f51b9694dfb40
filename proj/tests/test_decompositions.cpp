#include <algorithm>
#include <cmath>
#include <numeric>

#include <doctest.h>

#include "generators.hpp"
#include "qrand/closed_form.hpp"
#include "qrand/decompositions.hpp"
#include "qrand/sdp.hpp"

using namespace qrand;
using doctest::Approx;

namespace {

double oracle_noisy(int d, double eps) {
  const double t = std::sqrt(1.0 - eps + eps / d) + (d - 1) * std::sqrt(eps / d);
  return t * t / d;
}

// sum_x <phi|sqrt(M_x)|phi>^2 using the diagonal form of sqrt(M_x).
double oracle_sqrt_value(int d, double eps, const PureState& s) {
  const double hi = std::sqrt(1.0 - eps + eps / d), lo = std::sqrt(eps / d);
  double v = 0.0;
  for (int x = 0; x < d; ++x) {
    double e = 0.0;
    for (int k = 0; k < d; ++k) e += std::norm(s[k]) * (k == x ? hi : lo);
    v += e * e;
  }
  return v;
}

// Symmetric decomposition of the noisy projective measurement built directly
// from its coefficients for a given h.
Decomposition symmetric_family(int d, double eps, double h) {
  const double tau = 1.0 / d - (d - 1) * h, alpha = eps / d - h, f = h + (1 - eps) / d;
  const double root = std::sqrt(f * h);
  Decomposition K(d, d, d);
  for (int x = 0; x < d; ++x)
    for (int j = 0; j < d; ++j) {
      CMatrix m = CMatrix::Zero(d, d);
      if (x == j) {
        for (int k = 0; k < d; ++k) m(k, k) = k == x ? tau : alpha;
        for (int k = 0; k < d; ++k)
          if (k != x) m(x, k) = m(k, x) = root;
      } else {
        m(x, x) = f;
        m(j, j) = h;
        m(x, j) = m(j, x) = -root;
      }
      K(x, j) = HermitianMatrix(m);
    }
  return K;
}

double sum_of_squares(const std::vector<double>& v) {
  return std::inner_product(v.begin(), v.end(), v.begin(), 0.0);
}

} // namespace

TEST_CASE("qubit square-root decomposition") {
  Povm p = noisy_projective(2, 0.15);
  Decomposition K = sqrt_decomposition_qubit(p, unbiased_state(2));
  CHECK(verify_decomposition(K, p, 1e-9).passed);
  CHECK(K.guess_value(unbiased_state(2)) == Approx(0.5 * (1 + std::sqrt(0.2775))).epsilon(1e-12));
  CHECK(K.guess_value(unbiased_state(2)) == Approx(0.7633913438).epsilon(1e-10));

  // An eigenvector of M1 gives Eve a perfect guess.
  Povm q = two_outcome_qubit(0.4, 0.1);
  PureState e1(CVector::Unit(2, 0));
  Decomposition Ke = sqrt_decomposition_qubit(q, e1);
  CHECK(verify_decomposition(Ke, q, 1e-9).passed);
  CHECK(Ke.guess_value(e1) == Approx(1.0));
  CHECK(Ke.guess_value(e1) > pguess_star_qubit_two_outcome(q).pguess);

  // Projective limit: K22 is rank one.
  Povm proj = two_outcome_qubit(1.0, 0.0);
  testgen::Gen gen(41);
  PureState s = gen.state(2);
  Decomposition Kp = sqrt_decomposition_qubit(proj, s);
  CHECK(verify_decomposition(Kp, proj, 1e-9).passed);
  Spectrum sp = eig_hermitian(Kp(1, 1));
  CHECK(std::abs(sp.min()) < 1e-12);
}

TEST_CASE("qubit square-root value formula on random inputs") {
  testgen::Gen gen(42);
  for (int trial = 0; trial < 100; ++trial) {
    Povm q = gen.qubit_two_outcome(0.0, 1.0);
    PureState s = gen.state(2);
    Decomposition K = sqrt_decomposition_qubit(q, s);
    CHECK(verify_decomposition(K, q, 1e-9).passed);
    // Evaluate 1 - 2 p1 + 2 <phi|sqrt M1|phi>^2 on the trace-ordered POVM.
    HermitianMatrix m1 = q[0].trace() <= q[1].trace() ? q[0] : q[1];
    const double p1 = m1.expectation(s.amplitudes());
    const double r = matrix_sqrt(m1).expectation(s.amplitudes());
    CHECK(K.guess_value(s) == Approx(1 - 2 * p1 + 2 * r * r).epsilon(1e-10));
  }
}

TEST_CASE("qudit square-root decomposition") {
  const NoiseModel n(3, 0.2);
  const Povm p = noisy_projective(n);
  QuditSqrtDecomposition q = sqrt_decomposition_qudit(n, unbiased_state(3));
  CHECK(verify_decomposition(q.decomposition, p, 1e-9).passed);
  CHECK(q.decomposition.guess_value(unbiased_state(3)) == Approx(0.698272).epsilon(1e-6));
  CHECK(q.decomposition.guess_value(unbiased_state(3)) == Approx(oracle_noisy(3, 0.2)).epsilon(1e-12));
  CHECK(sqrt_decomposition_value(n, unbiased_state(3)) == Approx(oracle_noisy(3, 0.2)).epsilon(1e-12));

  CVector b(2);
  b << 0.8, 0.6;
  const NoiseModel n2(2, 0.15);
  const double biased = sqrt_decomposition_qudit(n2, PureState(b)).decomposition.guess_value(PureState(b));
  CHECK(biased > oracle_noisy(2, 0.15));
  CHECK(biased == Approx(oracle_sqrt_value(2, 0.15, PureState(b))).epsilon(1e-12));
}

TEST_CASE("qudit square-root decomposition handles complex and signed amplitudes") {
  testgen::Gen gen(43);
  for (int trial = 0; trial < 60; ++trial) {
    const int d = gen.integer(2, 6);
    const NoiseModel n(d, gen.uniform(0.01, 0.99));
    PureState s = gen.state(d);
    QuditSqrtDecomposition q = sqrt_decomposition_qudit(n, s);
    CHECK(verify_decomposition(q.decomposition, noisy_projective(n), 1e-9).passed);
    CHECK(q.decomposition.guess_value(s) == Approx(oracle_sqrt_value(d, n.epsilon, s)).epsilon(1e-10));
    CHECK(q.phases.size() == d);
  }
}

TEST_CASE("qudit square-root decomposition at zero noise") {
  const NoiseModel n(3, 0.0);
  CVector v(3);
  v << 0.6, 0.8, 0.0;
  PureState s(v);
  Decomposition K = sqrt_decomposition_qudit(n, s).decomposition;
  CHECK(verify_decomposition(K, noisy_projective(n), 1e-9).passed);
  CHECK(K.guess_value(s) == Approx(0.36 * 0.36 + 0.64 * 0.64));
}

TEST_CASE("square-root value exceeds the unbiased value by the squared margins") {
  testgen::Gen gen(44);
  for (int d = 2; d <= 6; ++d)
    for (double eps : {0.05, 0.3, 0.7, 0.95}) {
      const NoiseModel n(d, eps);
      const double base = oracle_noisy(d, eps);
      for (int trial = 0; trial < 100; ++trial) {
        PureState s = gen.state(d);
        const double v = sqrt_decomposition_value(n, s);
        CHECK(v >= base - 1e-10);
        CHECK(v - base == Approx(sum_of_squares(unbiasedness_margins(n, s))).epsilon(1e-9));
      }
      CHECK(sqrt_decomposition_value(n, unbiased_state(d)) == Approx(base).epsilon(1e-12));
      for (double m : unbiasedness_margins(n, unbiased_state(d))) CHECK(std::abs(m) < 1e-15);
    }
}

TEST_CASE("Bloch witness at the unbiased state") {
  Povm p = two_outcome_qubit(0.5, 0.1);
  BlochWitness w = bloch_decomposition_qubit(p, unbiased_state(2));
  CHECK(w.cos_theta == Approx(0.0));
  CHECK(w.a == Approx(0.3));
  CHECK(w.b == Approx(0.3));
  CHECK(w.value == Approx(pguess_star_qubit_two_outcome(p).pguess).epsilon(1e-12));
  CHECK(w.value == Approx(sqrt_decomposition_qubit(p, unbiased_state(2)).guess_value(unbiased_state(2))).epsilon(1e-9));
}

TEST_CASE("Bloch witness for a trivial POVM and the degenerate eigenstate") {
  BlochWitness w = bloch_decomposition_qubit(two_outcome_qubit(0.5, 0.5), unbiased_state(2));
  CHECK(w.z == Approx(0.0));
  CHECK(w.value == Approx(1.0));
  CHECK_THROWS_AS(bloch_decomposition_qubit(two_outcome_qubit(0.4, 0.1), PureState(CVector::Unit(2, 0))), DomainError);
}

TEST_CASE("Bloch witness invariants on random inputs") {
  testgen::Gen gen(45);
  auto unit = [](const Vec3& v) { return std::sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2]); };
  for (int trial = 0; trial < 100; ++trial) {
    Povm q = gen.qubit_two_outcome();
    PureState s = gen.state(2);
    BlochWitness w = bloch_decomposition_qubit(q, s);
    CHECK(w.a >= 0.0);
    CHECK(w.b >= 0.0);
    CHECK(w.a + w.b == Approx(w.trace_m1).epsilon(1e-10));
    for (const Vec3* v : {&w.r_lambda1, &w.r_mu1, &w.r_1, &w.r_phi}) CHECK(unit(*v) == Approx(1.0).epsilon(1e-10));
    for (int k = 0; k < 3; ++k)
      CHECK(w.a * w.r_lambda1[static_cast<std::size_t>(k)] - w.b * w.r_mu1[static_cast<std::size_t>(k)] ==
            Approx(w.z * w.r_1[static_cast<std::size_t>(k)]).epsilon(1e-9));
    Decomposition K = bloch_witness_to_decomposition(w);
    CHECK(verify_decomposition(K, q, 1e-9).passed);
    CHECK(K.guess_value(s) == Approx(w.value).epsilon(1e-9));
    // Both attacks are feasible, so neither can beat the optimum at this state.
    const double opt = solve_primal({q, s, 0}).value;
    CHECK(w.value <= opt + 1e-6);
    CHECK(sqrt_decomposition_qubit(q, s).guess_value(s) <= opt + 1e-6);
  }
}

TEST_CASE("permutation symmetrization preserves the unbiased value") {
  for (int d = 2; d <= 5; ++d) {
    const NoiseModel n(d, 0.3);
    Decomposition K = sqrt_decomposition_qudit(n, unbiased_state(d)).decomposition;
    Decomposition S = permutation_symmetrize(K);
    CHECK(verify_decomposition(S, noisy_projective(n), 1e-9).passed);
    CHECK(S.guess_value(unbiased_state(d)) == Approx(K.guess_value(unbiased_state(d))).epsilon(1e-10));
  }
  CHECK_THROWS_AS(permutation_symmetrize(Decomposition(7, 7, 7)), SizeError);
}

TEST_CASE("symmetrized decompositions are permutation covariant") {
  const int d = 3;
  const NoiseModel n(d, 0.2);
  testgen::Gen gen(46);
  Decomposition K = sqrt_decomposition_qudit(n, gen.state(d)).decomposition;
  Decomposition S = permutation_symmetrize(K);
  std::vector<int> perm{0, 1, 2};
  do {
    CMatrix P = permutation_matrix(perm);
    for (int x = 0; x < d; ++x)
      for (int j = 0; j < d; ++j)
        CHECK(max_abs_diff(S(perm[static_cast<std::size_t>(x)], perm[static_cast<std::size_t>(j)]).mat(),
                           P * S(x, j).mat() * P.transpose()) < 1e-12);
  } while (std::next_permutation(perm.begin(), perm.end()));
}

TEST_CASE("symmetrized coefficients obey the constraint relations") {
  testgen::Gen gen(47);
  for (int d = 3; d <= 5; ++d) {
    const NoiseModel n(d, 0.2);
    // Mix of two attacks, one built for a biased real state.
    CVector v(d);
    for (int k = 0; k < d; ++k) v(k) = gen.uniform(0.2, 1.0);
    PureState biased(v / v.norm());
    Decomposition A = sqrt_decomposition_qudit(n, unbiased_state(d)).decomposition;
    Decomposition B = sqrt_decomposition_qudit(n, biased).decomposition;
    Decomposition mix(d, d, d);
    for (int x = 0; x < d; ++x)
      for (int j = 0; j < d; ++j) mix(x, j) = 0.3 * A(x, j) + 0.7 * B(x, j);
    REQUIRE(verify_decomposition(mix, noisy_projective(n), 1e-9).passed);
    SymmetricCoefficients c = extract_symmetric_coefficients(permutation_symmetrize(mix));
    const double eps = n.epsilon;
    CHECK(c.t == Approx(c.s).epsilon(1e-10));
    CHECK(c.alpha == Approx(-(d - 2) * c.a - c.h + eps / d).epsilon(1e-10));
    CHECK(c.beta == Approx(-(d - 3) * c.b - 2 * c.s).epsilon(1e-10));
    CHECK(c.gamma == Approx(-c.g - (d - 2) * c.s).epsilon(1e-10));
    CHECK(c.tau == Approx(1.0 / d - (d - 1) * c.h).epsilon(1e-10));
    CHECK(c.f == Approx(c.h + (1 - eps) / d).epsilon(1e-10));
  }
}

TEST_CASE("symmetric family value") {
  const NoiseModel n(2, 0.15);
  CHECK(symmetric_family_value(n, 0.0375) == Approx(0.763391).epsilon(1e-6));
  for (int d = 2; d <= 6; ++d)
    for (double eps : {0.1, 0.5, 0.9}) {
      const NoiseModel m(d, eps);
      CHECK(symmetric_family_value(m, eps / (d * d)) == Approx(oracle_noisy(d, eps)).epsilon(1e-12));
      CHECK(symmetric_family_value(m, 0.0) == Approx(1 - (d - 1) * (1 - eps) / d).epsilon(1e-12));
    }
  CHECK_THROWS_AS(symmetric_family_value(n, 0.1), DomainError);
  CHECK_THROWS_AS(symmetric_family_value(n, -0.01), DomainError);
}

TEST_CASE("symmetric family matches explicitly built decompositions") {
  for (int d = 2; d <= 5; ++d)
    for (double eps : {0.1, 0.4, 0.8}) {
      const NoiseModel n(d, eps);
      for (int k = 0; k <= 10; ++k) {
        const double h = eps / (d * d) * k / 10.0;
        Decomposition K = symmetric_family(d, eps, h);
        CHECK(verify_decomposition(K, noisy_projective(n), 1e-9).passed);
        CHECK(K.guess_value(unbiased_state(d)) == Approx(symmetric_family_value(n, h)).epsilon(1e-12));
      }
    }
}

TEST_CASE("symmetric family is increasing in h") {
  for (int d = 2; d <= 6; ++d) {
    const NoiseModel n(d, 0.35);
    double prev = -1.0;
    for (int k = 0; k <= 1000; ++k) {
      const double v = symmetric_family_value(n, n.epsilon / (d * d) * k / 1000.0);
      CHECK(v >= prev);
      prev = v;
    }
  }
}

TEST_CASE("inflated qubit attack") {
  const NoiseModel n(4, 0.2);
  const Povm hat = coarse_grain(noisy_projective(n), half_split(4));
  const double a1 = std::sqrt(0.5);
  Decomposition K = inflate_qubit_decomposition(n, sqrt_decomposition_qubit(noisy_projective(2, 0.2), unbiased_state(2)));
  CHECK(verify_decomposition(K, hat, 1e-9).passed);
  CHECK(K.guess_value(block_uniform_state(4, a1, a1)) == Approx(0.8).epsilon(1e-12));
  CHECK(inflated_attack_value(0.2, a1) == Approx(0.8).epsilon(1e-12));
  CHECK(inflated_attack_value(0.2, 1.0) == Approx(1.0));
  testgen::Gen gen(48);
  for (int trial = 0; trial < 30; ++trial) {
    const double eps = gen.uniform(), t = gen.uniform(0.01, 1.5);
    const double al1 = std::cos(t), al2 = std::sin(t);
    CVector q(2);
    q << al1, al2;
    const NoiseModel m(6, eps);
    Decomposition Q = sqrt_decomposition_qubit(noisy_projective(2, eps), PureState(q));
    Decomposition I = inflate_qubit_decomposition(m, Q);
    CHECK(verify_decomposition(I, coarse_grain(noisy_projective(m), half_split(6)), 1e-9).passed);
    const double v = I.guess_value(block_uniform_state(6, al1, al2));
    CHECK(v == Approx(Q.guess_value(PureState(q))).epsilon(1e-12));
    CHECK(v == Approx(inflated_attack_value(eps, al1)).epsilon(1e-10));
  }
  CHECK_THROWS_AS(inflate_qubit_decomposition(NoiseModel(5, 0.2), K), DomainError);
}

TEST_CASE("coarse-grained square-root attack") {
  const NoiseModel n(4, 0.2);
  Decomposition K = sqrt_decomposition_qudit(n, unbiased_state(4)).decomposition;
  Decomposition C = coarse_grain_eve_attack(K, half_split(4));
  const Povm hat = coarse_grain(noisy_projective(n), half_split(4));
  CHECK(verify_decomposition(C, hat, 1e-9).passed);
  const double oracle = 0.5 + std::sqrt(0.2) / 8.0 * (2 * std::sqrt(3.4) + 2 * std::sqrt(0.2));
  CHECK(oracle == Approx(0.7561552813).epsilon(1e-10));
  CHECK(C.guess_value(unbiased_state(4)) == Approx(oracle).epsilon(1e-12));
  CHECK(coarse_grained_attack_value(n) == Approx(oracle).epsilon(1e-12));
  CHECK_THROWS_AS(coarse_grain_eve_attack(K, {{0, 1}, {1, 2, 3}}), ValidationError);
}

TEST_CASE("coarse-grained attack is strictly worse than the inflated one") {
  for (int d = 4; d <= 8; d += 2) {
    for (int k = 1; k < 100; ++k) {
      const double eps = k / 100.0;
      const NoiseModel n(d, eps);
      CHECK(coarse_grained_attack_value(n) < inflated_attack_value(eps, std::sqrt(0.5)));
    }
    CHECK(coarse_grained_attack_value(NoiseModel(d, 1.0)) == Approx(1.0).epsilon(1e-10));
    CHECK(inflated_attack_value(1.0, std::sqrt(0.5)) == Approx(1.0).epsilon(1e-10));
    CHECK(coarse_grained_attack_value(NoiseModel(d, 0.0)) == Approx(0.5).epsilon(1e-10));
    CHECK(inflated_attack_value(0.0, std::sqrt(0.5)) == Approx(0.5).epsilon(1e-10));
  }
}

TEST_CASE("joint noise decomposition examples") {
  const double es = epsilon_star();
  CHECK(es == Approx(1 - 1 / std::sqrt(2.0)).epsilon(1e-15));
  JointDecomposition at_star = joint_noise_decomposition(es);
  CHECK(at_star.guess_value() == Approx(1.0).epsilon(1e-9));
  CHECK(verify_joint_decomposition(at_star, 1e-9).passed);

  JointDecomposition low = joint_noise_decomposition(0.15);
  const double oracle = 0.5 * (1 + 2 * 0.85 * std::sqrt(0.15 * 1.85));
  CHECK(low.guess_value() == Approx(oracle).epsilon(1e-12));
  CHECK(low.guess_value() == Approx(0.947766).epsilon(1e-6));
  CHECK(verify_joint_decomposition(low, 1e-9).passed);

  JointDecomposition high = joint_noise_decomposition(0.5);
  CHECK(high.guess_value() == Approx(1.0).epsilon(1e-9));
  CHECK(verify_joint_decomposition(high, 1e-9).passed);

  CHECK_THROWS_AS(joint_noise_decomposition(0.0), DomainError);
  CHECK_THROWS_AS(joint_noise_decomposition(1.0), DomainError);
}

TEST_CASE("joint noise decomposition satisfies its constraints on a grid") {
  for (int k = 1; k < 100; ++k) {
    const double eps = k / 100.0;
    JointDecomposition jd = joint_noise_decomposition(eps);
    JointReport r = verify_joint_decomposition(jd, 1e-9);
    CHECK(r.passed);
    double total = 0.0;
    for (const auto& b : jd.branches) {
      CHECK(b.weight >= 0.0);
      total += b.weight;
    }
    CHECK(total == Approx(1.0).epsilon(1e-10));
    const double delta = eps * (2 - eps);
    CHECK(jd.guess_value() >= 0.5 * (1 + std::sqrt(delta * (2 - delta))) - 1e-12);
    if (eps >= epsilon_star()) CHECK(jd.guess_value() == Approx(1.0).epsilon(1e-9));
  }
}

TEST_CASE("verify_decomposition detects injected faults") {
  const NoiseModel n(3, 0.2);
  const Povm p = noisy_projective(n);
  Decomposition K = sqrt_decomposition_qudit(n, unbiased_state(3)).decomposition;
  CHECK(verify_decomposition(K, p, 1e-9).passed);
  K(1, 2) -= HermitianMatrix::diagonal({1e-3, 0, 0});
  DecompositionReport r = verify_decomposition(K, p, 1e-9);
  CHECK_FALSE(r.passed);
  CHECK(std::max(r.psd_violation, r.reconstruction_violation) >= 1e-4);

  for (double eps : {0.3, 1.0}) {
    const Povm q = noisy_projective(3, eps);
    Decomposition T(3, 3, 3);
    for (int x = 0; x < 3; ++x) T(x, x) = q[x];
    DecompositionReport t = verify_decomposition(T, q, 1e-9);
    CHECK(t.passed == (eps == 1.0));
    if (eps < 1.0) CHECK(t.proportionality_violation > 1e-3);
  }
}

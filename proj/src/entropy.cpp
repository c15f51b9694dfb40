#include "qrand/entropy.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <future>
#include <limits>
#include <random>
#include <thread>

#include "qrand/closed_form.hpp"

namespace qrand {

void validate_ensemble(const EveEnsemble& ens, double tol) {
  if (ens.probs.empty()) throw ValidationError("ensemble has no outcomes");
  if (ens.states.size() != ens.probs.size() || ens.empty.size() != ens.probs.size())
    throw ValidationError("ensemble arrays have different lengths");
  double total = 0.0;
  for (std::size_t x = 0; x < ens.probs.size(); ++x) {
    if (ens.probs[x] < -1e-10) throw ValidationError("negative outcome probability");
    total += ens.probs[x];
    if (ens.empty[x]) continue;
    if (ens.states[x].dim() != ens.dim()) throw ValidationError("ensemble states have different dimensions");
    if (std::abs(ens.states[x].trace() - 1.0) > tol) throw ValidationError("ensemble state is not unit trace");
    if (!is_psd(ens.states[x], tol)) throw ValidationError("ensemble state is not PSD");
  }
  if (std::abs(total - 1.0) > 1e-10) throw ValidationError("ensemble probabilities do not sum to 1");
}

EveEnsemble eve_ensemble_from_decomposition(const PureState& state, const Decomposition& decomp) {
  if (state.dim() != decomp.dim()) throw ValidationError("state and decomposition dimensions differ");
  const int m = decomp.outcomes(), n = decomp.subpovms();
  EveEnsemble ens;
  for (int x = 0; x < m; ++x) {
    std::vector<double> w(static_cast<std::size_t>(n));
    double px = 0.0;
    for (int j = 0; j < n; ++j) {
      w[static_cast<std::size_t>(j)] = std::max(0.0, decomp(x, j).expectation(state.amplitudes()));
      px += w[static_cast<std::size_t>(j)];
    }
    ens.probs.push_back(px);
    if (px <= 1e-15) {
      ens.states.push_back(HermitianMatrix::identity(n) * (1.0 / n));
      ens.empty.push_back(true);
      continue;
    }
    for (auto& v : w) v /= px;
    ens.states.push_back(HermitianMatrix::diagonal(w));
    ens.empty.push_back(false);
  }
  double total = 0.0;
  for (double p : ens.probs) total += p;
  for (auto& p : ens.probs) p /= total;
  return ens;
}

namespace {

HermitianMatrix average_state(const EveEnsemble& ens) {
  HermitianMatrix avg = HermitianMatrix::zero(ens.dim());
  for (int x = 0; x < ens.outcomes(); ++x)
    if (!ens.empty[static_cast<std::size_t>(x)])
      avg += ens.probs[static_cast<std::size_t>(x)] * ens.states[static_cast<std::size_t>(x)];
  return avg;
}

} // namespace

double conditional_vn_entropy(const EveEnsemble& ens) {
  validate_ensemble(ens);
  double h = shannon_entropy(ens.probs);
  for (int x = 0; x < ens.outcomes(); ++x)
    if (!ens.empty[static_cast<std::size_t>(x)])
      h += ens.probs[static_cast<std::size_t>(x)] * von_neumann_entropy(ens.states[static_cast<std::size_t>(x)]);
  HermitianMatrix avg = average_state(ens);
  avg *= 1.0 / avg.trace();
  return h - von_neumann_entropy(avg);
}

double ensemble_guess_probability(const EveEnsemble& ens, double tol) {
  validate_ensemble(ens);
  const int d = ens.dim();
  for (int x = 0; x < ens.outcomes(); ++x) {
    const CMatrix& r = ens.states[static_cast<std::size_t>(x)].mat();
    if ((r - CMatrix(r.diagonal().asDiagonal())).cwiseAbs().maxCoeff() > tol)
      throw DomainError("guessing probability is only implemented for diagonal ensembles");
  }
  double p = 0.0;
  for (int j = 0; j < d; ++j) {
    double best = 0.0;
    for (int x = 0; x < ens.outcomes(); ++x)
      if (!ens.empty[static_cast<std::size_t>(x)])
        best = std::max(best, ens.probs[static_cast<std::size_t>(x)] * ens.states[static_cast<std::size_t>(x)](j, j).real());
    p += best;
  }
  return p;
}

double conditional_min_entropy(const EveEnsemble& ens) { return min_entropy_bits(ensemble_guess_probability(ens)); }

namespace {

// Euclidean projection of a vector onto the probability simplex.
RVector project_simplex(const RVector& v) {
  std::vector<double> u(v.data(), v.data() + v.size());
  std::sort(u.begin(), u.end(), std::greater<>());
  double cum = 0.0, theta = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    cum += u[i];
    double t = (cum - 1.0) / static_cast<double>(i + 1);
    if (u[i] - t > 0.0) theta = t;
  }
  return (v.array() - theta).max(0.0).matrix();
}

HermitianMatrix project_density(const HermitianMatrix& s) {
  Spectrum sp = eig_hermitian(s);
  RVector w = project_simplex(sp.eigenvalues);
  return HermitianMatrix::hermitian_part(sp.eigenvectors * w.asDiagonal() * sp.eigenvectors.adjoint());
}

// Phi(sigma) = sum_x F(P_x, sigma) with P_x = p(x) rho_x, and its gradient.
class SecrecyObjective {
public:
  explicit SecrecyObjective(const EveEnsemble& ens) : d_(ens.dim()) {
    for (int x = 0; x < ens.outcomes(); ++x) {
      if (ens.empty[static_cast<std::size_t>(x)]) continue;
      HermitianMatrix P = ens.probs[static_cast<std::size_t>(x)] * ens.states[static_cast<std::size_t>(x)];
      roots_.push_back(matrix_sqrt(P));
    }
  }

  int dim() const { return d_; }

  double value(const HermitianMatrix& sigma) const {
    double v = 0.0;
    for (const auto& r : roots_) {
      Spectrum sp = eig_hermitian(sigma.conjugated(r.mat()));
      for (Eigen::Index i = 0; i < sp.eigenvalues.size(); ++i) v += std::sqrt(std::max(0.0, sp.eigenvalues(i)));
    }
    return v;
  }

  HermitianMatrix gradient(const HermitianMatrix& sigma) const {
    CMatrix g = CMatrix::Zero(d_, d_);
    for (const auto& r : roots_) {
      HermitianMatrix inner = matrix_inv_sqrt(sigma.conjugated(r.mat()), 1e-14);
      g += 0.5 * r.mat() * inner.mat() * r.mat();
    }
    return HermitianMatrix::hermitian_part(g);
  }

  // (sum_x tr sqrt P_x) * lambda_max(sum_x sqrt P_x) >= p_secr, together with
  // F <= sqrt(p(x)), whichever is smaller.
  double root_bound() const {
    double a = 0.0, trivial = 0.0;
    HermitianMatrix s = HermitianMatrix::zero(d_);
    for (const auto& r : roots_) {
      a += r.trace();
      s += r;
      trivial += std::sqrt(std::max(0.0, trace_product(r, r)));
    }
    return std::min(a * max_eigenvalue(s), trivial * trivial);
  }

  // F(P, sigma) <= (tr P Y + tr sigma Y^-1) / 2 for every Y > 0, so
  // max_sigma Phi <= (sum_x tr P_x Y_x + lambda_max(sum_x Y_x^-1)) / 2.
  // Y_x^-1 is the geometric mean sigma^-1 # (P_x + delta), near-optimal at sigma.
  double dual_bound(const HermitianMatrix& sigma, double delta) const {
    const HermitianMatrix one = HermitianMatrix::identity(d_);
    const HermitianMatrix s = (1.0 - delta) * sigma + (delta / d_) * one;
    const HermitianMatrix rs = matrix_sqrt(s), irs = matrix_inv_sqrt(s);
    double first = 0.0;
    HermitianMatrix inv_sum = HermitianMatrix::zero(d_);
    for (const auto& r : roots_) {
      const HermitianMatrix P = HermitianMatrix::hermitian_part(r.mat() * r.mat());
      const Spectrum inner = eig_hermitian((P + delta * one).conjugated(rs.mat()));
      const HermitianMatrix root = inner.apply([](double l) { return std::sqrt(std::max(l, 0.0)); });
      const HermitianMatrix iroot = inner.apply([](double l) { return 1.0 / std::sqrt(std::max(l, 1e-300)); });
      first += trace_product(P, iroot.conjugated(rs.mat()));
      inv_sum += root.conjugated(irs.mat());
    }
    const double phi = 0.5 * (first + max_eigenvalue(inv_sum));
    return phi * phi;
  }

  double upper_bound(const HermitianMatrix& sigma) const {
    double best = std::numeric_limits<double>::infinity();
    for (double delta : {1e-6, 1e-8, 1e-10, 1e-12}) best = std::min(best, dual_bound(sigma, delta));
    return best;
  }

  // One block-coordinate step on Phi = sum_x Re tr(U_x sqrt P_x X), X = sqrt sigma:
  // optimal polar unitaries U_x, then the optimal X >= 0 with tr X^2 = 1.
  HermitianMatrix alternate(const HermitianMatrix& sigma) const {
    const CMatrix x = matrix_sqrt(sigma).mat();
    CMatrix b = CMatrix::Zero(d_, d_);
    for (const auto& r : roots_) {
      Eigen::JacobiSVD<CMatrix> svd(r.mat() * x, Eigen::ComputeFullU | Eigen::ComputeFullV);
      b += svd.matrixV() * svd.matrixU().adjoint() * r.mat();
    }
    const HermitianMatrix h = HermitianMatrix::hermitian_part(b);
    const HermitianMatrix pos = eig_hermitian(h).apply([](double l) { return std::max(l, 0.0); });
    const double norm2 = trace_product(pos, pos);
    if (!(norm2 > 1e-300)) return sigma;
    return HermitianMatrix::hermitian_part(pos.mat() * pos.mat() / norm2);
  }

private:
  int d_;
  std::vector<HermitianMatrix> roots_;
};

struct AscentResult {
  HermitianMatrix sigma;
  double phi = 0.0;
  double upper = 0.0;
};

AscentResult ascend(const SecrecyObjective& obj, HermitianMatrix sigma, const PsecrConfig& cfg, double known_upper) {
  AscentResult r;
  double phi = obj.value(sigma);
  double upper = known_upper;
  for (int it = 0; it < cfg.max_iters; ++it) {
    HermitianMatrix next = obj.alternate(sigma);
    double v = obj.value(next);
    if (!(v > phi)) break;
    const bool stalled = v - phi <= 1e-15;
    sigma = next;
    phi = v;
    if (it % 20 == 19 || stalled) {
      upper = std::min(upper, obj.upper_bound(sigma));
      if (upper - phi * phi <= 0.1 * cfg.tol || stalled) break;
    }
  }
  // Projected-gradient polish on the interior.
  double step = 1.0;
  for (int it = 0; it < cfg.max_iters / 4 && upper - phi * phi > 0.1 * cfg.tol; ++it) {
    HermitianMatrix g = obj.gradient(sigma);
    bool moved = false;
    while (step > 1e-14) {
      HermitianMatrix cand = project_density(sigma + step * g);
      double v = obj.value(cand);
      if (v > phi) {
        sigma = cand;
        phi = v;
        step *= 1.5;
        moved = true;
        break;
      }
      step *= 0.5;
    }
    if (!moved) break;
    if (it % 10 == 9) upper = std::min(upper, obj.upper_bound(sigma));
  }
  r.upper = std::min(upper, obj.upper_bound(sigma));
  r.sigma = sigma;
  r.phi = phi;
  return r;
}

HermitianMatrix random_density(int d, std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  CMatrix g(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) g(i, j) = Complex(normal(rng), normal(rng));
  CMatrix s = g * g.adjoint();
  return HermitianMatrix::hermitian_part(s / s.trace().real());
}

} // namespace

PsecrResult p_secr(const EveEnsemble& ens, const PsecrConfig& config) {
  validate_ensemble(ens);
  if (ens.dim() > 8) throw SizeError("p_secr supports dimension <= 8");
  if (config.restarts < 0) throw ValidationError("restarts must be non-negative");
  const SecrecyObjective obj(ens);
  const int d = obj.dim();
  const double root_bound = obj.root_bound();

  std::vector<HermitianMatrix> starts{HermitianMatrix::identity(d) * (1.0 / d), average_state(ens)};
  std::mt19937_64 rng(config.seed);
  for (int i = 0; i < config.restarts; ++i) starts.push_back(random_density(d, rng));

  std::vector<AscentResult> results(starts.size());
  const unsigned workers =
      std::max(1u, std::min(std::thread::hardware_concurrency(), static_cast<unsigned>(starts.size())));
  auto run = [&](unsigned w) {
    for (std::size_t i = w; i < starts.size(); i += workers) results[i] = ascend(obj, starts[i], config, root_bound);
  };
  if (workers == 1) {
    run(0);
  } else {
    std::vector<std::future<void>> fs;
    for (unsigned w = 0; w < workers; ++w) fs.push_back(std::async(std::launch::async, run, w));
    for (auto& f : fs) f.get();
  }

  PsecrResult out;
  std::size_t best = 0;
  double upper = root_bound;
  for (std::size_t i = 0; i < results.size(); ++i) {
    upper = std::min(upper, results[i].upper);
    if (results[i].phi > results[best].phi) best = i;
  }
  out.lower = results[best].phi * results[best].phi;
  out.upper = std::max(upper, out.lower);
  out.value = out.lower;
  out.sigma = results[best].sigma;
  out.converged = out.upper - out.lower <= config.tol;
  return out;
}

double vn_bound_noisy_projective(const NoiseModel& noise) {
  const double p = pguess_star_noisy_projective(noise).pguess;
  return binary_entropy(std::min(1.0, p)) + (1.0 - p) * std::log2(noise.d - 1.0);
}

double hmax_bound_noisy_projective(const NoiseModel& noise) { return std::log2(noise.A); }

StateComparison state_side_comparison(const NoiseModel& noise) {
  StateComparison c;
  const int d = noise.d;
  c.hmin_star = pguess_star_noisy_projective(noise).hmin_bits;
  HermitianMatrix rho = depolarize(unbiased_state(d).projector(), noise.epsilon);
  c.state_vn_star = std::max(0.0, std::log2(static_cast<double>(d)) - von_neumann_entropy(rho));
  c.state_hmax_star = std::log2(static_cast<double>(d)) + std::log2(max_eigenvalue(rho));
  return c;
}

EntropyReport entropy_report(const EveEnsemble& ens, const PsecrConfig& config) {
  EntropyReport r;
  r.hmin = conditional_min_entropy(ens);
  r.h_vn = conditional_vn_entropy(ens);
  PsecrResult ps = p_secr(ens, config);
  r.p_secr = ps.value;
  r.p_secr_lower = ps.lower;
  r.p_secr_upper = ps.upper;
  r.p_secr_converged = ps.converged;
  r.hmax = std::log2(ps.value);
  return r;
}

EntropyReport noisy_projective_entropy_report(const NoiseModel& noise, const PsecrConfig& config) {
  const PureState psi = unbiased_state(noise.d);
  EveEnsemble ens = eve_ensemble_from_decomposition(psi, sqrt_decomposition_qudit(noise, psi).decomposition);
  EntropyReport r = entropy_report(ens, config);
  StateComparison sc = state_side_comparison(noise);
  r.bounds = EntropyBounds{vn_bound_noisy_projective(noise), hmax_bound_noisy_projective(noise), sc.state_vn_star,
                           sc.state_hmax_star};
  return r;
}

std::vector<EntropyCurveRow> entropy_curves(int d, int points) {
  if (points < 2 || points > 10000) throw ValidationError("points must be in [2, 10000]");
  auto snap = [](double v) { return std::abs(v) < 1e-12 ? 0.0 : v; };
  std::vector<EntropyCurveRow> rows;
  for (int i = 0; i < points; ++i) {
    const double eps = static_cast<double>(i) / (points - 1);
    NoiseModel noise(d, eps);
    StateComparison sc = state_side_comparison(noise);
    rows.push_back({eps, snap(hmax_bound_noisy_projective(noise)), snap(vn_bound_noisy_projective(noise)),
                    snap(sc.state_vn_star), snap(sc.hmin_star)});
  }
  return rows;
}

void write_entropy_csv(std::ostream& out, const std::vector<EntropyCurveRow>& rows) {
  out << "epsilon,hmax_bound,vn_bound,state_vn_star,hmin_star\n";
  char buf[160];
  for (const auto& r : rows) {
    std::snprintf(buf, sizeof buf, "%.12g,%.12g,%.12g,%.12g,%.12g\n", r.epsilon, r.hmax_bound, r.vn_bound,
                  r.state_vn_star, r.hmin_star);
    out << buf;
  }
}

} // namespace qrand

#include "pircache/analysis.hpp"
#include "pircache/parallel.hpp"
#include "pircache/random.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace pircache {

Eigen::ArrayXd project_capped_simplex(const Eigen::ArrayXd& v, double budget) {
  Eigen::ArrayXd clipped = v.cwiseMax(0.0).cwiseMin(1.0);
  if (clipped.sum() <= budget) return clipped;
  if (budget <= 0) return Eigen::ArrayXd::Zero(v.size());

  // sum(clip(v - tau, 0, 1)) is non-increasing in tau; bisect for the budget.
  double lo = 0.0;
  double hi = v.maxCoeff();
  for (int it = 0; it < 200 && hi > lo; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if ((v - mid).cwiseMax(0.0).cwiseMin(1.0).sum() > budget)
      lo = mid;
    else
      hi = mid;
  }
  return (v - hi).cwiseMax(0.0).cwiseMin(1.0);
}

namespace {

// Separable objective  offset + sum_i sum_l w_l p_i^(l-1) (1 - p_i)^(N+1-l).
struct SeparableObjective {
  std::size_t databases = 0;
  double offset = 0;
  std::vector<double> weights;  // w_l at index l-1

  double value(const Eigen::ArrayXd& p) const {
    double total = 0;
    for (std::size_t l = 1; l <= weights.size(); ++l) {
      if (weights[l - 1] == 0) continue;
      const double a = static_cast<double>(l - 1);
      const double b = static_cast<double>(databases + 1 - l);
      total += weights[l - 1] * (p.pow(a) * (1.0 - p).pow(b)).sum();
    }
    return offset + total;
  }

  Eigen::ArrayXd gradient(const Eigen::ArrayXd& p) const {
    Eigen::ArrayXd g = Eigen::ArrayXd::Zero(p.size());
    for (std::size_t l = 1; l <= weights.size(); ++l) {
      if (weights[l - 1] == 0) continue;
      const double a = static_cast<double>(l - 1);
      const double b = static_cast<double>(databases + 1 - l);
      if (a > 0) g += weights[l - 1] * a * p.pow(a - 1) * (1.0 - p).pow(b);
      if (b > 0) g -= weights[l - 1] * b * p.pow(a) * (1.0 - p).pow(b - 1);
    }
    return g;
  }
};

double projected_gradient_norm(const SeparableObjective& f, const Eigen::ArrayXd& p,
                               double budget) {
  return (p - project_capped_simplex(p - f.gradient(p), budget)).matrix().norm();
}

struct Descent {
  Eigen::ArrayXd p;
  double value = 0;
  bool converged = false;
};

Descent descend(const SeparableObjective& f, Eigen::ArrayXd p, double budget,
                const OptimizerOptions& options) {
  double fp = f.value(p);
  for (std::size_t it = 0; it < options.max_iterations; ++it) {
    const Eigen::ArrayXd g = f.gradient(p);
    if ((p - project_capped_simplex(p - g, budget)).matrix().norm() < options.tolerance)
      return {std::move(p), fp, true};

    // Backtracking from a unit step with the projected sufficient-decrease test.
    double step = 1.0;
    Eigen::ArrayXd q;
    double fq = 0;
    while (true) {
      q = project_capped_simplex(p - step * g, budget);
      fq = f.value(q);
      const double moved = (q - p).matrix().squaredNorm();
      if (fq <= fp - moved / (2.0 * step) + 1e-15 * std::abs(fp)) break;
      step *= 0.5;
      if (step < 1e-20) return {std::move(p), fp, false};
    }
    if ((q - p).matrix().norm() == 0.0) return {std::move(p), fp, false};
    p = std::move(q);
    fp = fq;
  }
  return {std::move(p), fp, false};
}

OptimizerResult run(const SeparableObjective& f, std::size_t files, double mu,
                    std::size_t file_bits, const OptimizerOptions& options) {
  if (mu < 0 || mu > 1) throw std::invalid_argument("storage ratio mu must lie in [0, 1]");
  if (options.restarts == 0) throw std::invalid_argument("optimizer needs at least one restart");
  const auto m = static_cast<Eigen::Index>(files * file_bits);
  if (m == 0 || m > 10000) throw std::invalid_argument("optimizer supports 1..10^4 variables");
  const double budget = mu * static_cast<double>(m);

  const Eigen::ArrayXd uniform = Eigen::ArrayXd::Constant(m, mu);
  OptimizerResult out;
  out.uniform_value = f.value(uniform);
  out.gradient_norm_at_uniform = projected_gradient_norm(f, uniform, budget);
  out.restarts = options.restarts;

  std::vector<Descent> runs(options.restarts);
  parallel_for(options.restarts, [&](std::size_t r) {
    Rng rng(derive_seed(options.seed, r));
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    Eigen::ArrayXd start(m);
    for (auto& x : start) x = unit(rng);
    runs[r] = descend(f, project_capped_simplex(start, budget), budget, options);
  });

  out.converged = true;
  std::size_t best = 0;
  for (std::size_t r = 0; r < runs.size(); ++r) {
    out.restart_values.push_back(runs[r].value);
    out.converged = out.converged && runs[r].converged;
    if (runs[r].value < runs[best].value) best = r;
  }
  out.best_value = runs[best].value;
  out.gradient_norm_at_best = projected_gradient_norm(f, runs[best].p, budget);
  out.best = runs[best].p.reshaped(static_cast<Eigen::Index>(files),
                                   static_cast<Eigen::Index>(file_bits));
  return out;
}

}  // namespace

OptimizerResult minimize_expected_bound(std::size_t files, std::size_t databases, double mu,
                                        std::size_t file_bits, const OptimizerOptions& options) {
  // L + sum_l C(N+1,l) h_l E[x_l] collapses to L + sum_i sum_l C(N,l-1) h_l / K g_l(p_i).
  SeparableObjective f;
  f.databases = databases;
  f.offset = static_cast<double>(file_bits);
  for (std::size_t l = 1; l <= databases + 1; ++l)
    f.weights.push_back(binomial<double>(databases, l - 1) * harmonic_weight<double>(files, l) /
                        static_cast<double>(files));
  return run(f, files, mu, file_bits, options);
}

OptimizerResult minimize_expected_storage_weight(std::size_t files, std::size_t databases,
                                                 std::size_t l, double mu, std::size_t file_bits,
                                                 const OptimizerOptions& options) {
  if (l == 0 || l > databases + 1) throw std::invalid_argument("l must lie in [1, N+1]");
  SeparableObjective f;
  f.databases = databases;
  f.weights.assign(databases + 1, 0.0);
  f.weights[l - 1] = binomial<double>(databases, l - 1) /
                     (static_cast<double>(files) * binomial<double>(databases + 1, l));
  return run(f, files, mu, file_bits, options);
}

}  // namespace pircache

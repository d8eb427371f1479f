#ifndef RESPATH_COMPLEXITY_HPP
#define RESPATH_COMPLEXITY_HPP

#include <cmath>
#include <cstdint>
#include <utility>
#include <vector>

#include "respath/errors.hpp"
#include "respath/netcore.hpp"
#include "respath/norms.hpp"
#include "respath/rng.hpp"
#include "respath/train.hpp"

namespace respath {

// Exact empirical Rademacher complexity of {x -> u.x : ||u||_1 <= 1} by
// enumerating all 2^n sign patterns; the sup over the l1 ball of a linear
// functional is the l_inf norm.
inline double rademacher_linear_exact(const MatrixXd& points) {
  const int n = static_cast<int>(points.rows());
  if (n < 1) throw DomainError("rademacher_linear_exact: need at least one point");
  if (n > 20) throw CapacityError("rademacher_linear_exact: n > 20");
  const std::uint64_t total = 1ULL << n;
  double sum = 0.0;
  for (std::uint64_t mask = 0; mask < total; ++mask) {
    RowVectorXd s = RowVectorXd::Zero(points.cols());
    for (int i = 0; i < n; ++i)
      s += ((mask >> i) & 1u ? 1.0 : -1.0) * points.row(i);
    sum += s.cwiseAbs().maxCoeff();
  }
  return sum / (double(n) * double(total));
}

enum class RademacherKind { Linear, Resnet };

// Closed-form complexity bounds: Q max_i ||x_i||_inf sqrt(2 log(2d)/n) for the
// linear l1 ball, 3 Q sqrt(2 log(2d)/n) for the weighted-path-norm ball.
inline double rademacher_bounds(RademacherKind kind, double Q, int d, int n,
                                double max_xinf = 1.0) {
  if (d < 1 || n < 1) throw DomainError("rademacher_bounds: d, n must be >= 1");
  if (Q < 0.0) throw DomainError("rademacher_bounds: Q must be >= 0");
  const double root = std::sqrt(2.0 * std::log(2.0 * d) / n);
  return kind == RademacherKind::Linear ? Q * max_xinf * root : 3.0 * Q * root;
}

// 2 rad + 2 diam sqrt(2 log(4/delta)/n)
inline double gap_bound(double rad, double diam, int n, double delta) {
  if (delta <= 0.0 || delta >= 1.0) throw DomainError("gap_bound: delta in (0,1)");
  return 2.0 * rad + 2.0 * diam * std::sqrt(2.0 * std::log(4.0 / delta) / n);
}

struct RademacherEstimateOptions {
  int n_xi = 64;
  int restarts = 8;
  int steps = 500;
  double step_size = 0.05;
  bool linear_subclass = false; // keep W, U at zero: ascent over the linear part
};

// Lower estimate of R(F^Q) on the given points: for each sign draw, maximize
// sum_i xi_i f(x_i; theta) over ||theta||_P <= Q by projected gradient ascent.
// The projection rescales u, which sweeps the whole ball boundary because f
// and the norm are positively homogeneous in the output layer. Returns
// (estimate, standard error over sign draws), both already divided by n.
inline std::pair<double, double> rademacher_lower_estimate(
    const MatrixXd& points, double Q, const ResNetArch& arch, std::uint64_t seed,
    const RademacherEstimateOptions& opt = {}) {
  if (Q < 0.0) throw DomainError("rademacher_lower_estimate: Q must be >= 0");
  const int n = static_cast<int>(points.rows());
  if (n < 1) throw DomainError("rademacher_lower_estimate: need points");
  if (points.cols() != arch.d)
    throw StructuralError("rademacher_lower_estimate: point dimension != d");
  if (Q == 0.0) return {0.0, 0.0};

  Rng rng(seed);

  // Keep iterates on the ball boundary: the objective is linear in u, so the
  // sup over the ball is attained at ||theta||_P = Q (or at the zero network,
  // which is kept as the baseline below).
  const auto project = [&](ResNetParams& p) {
    const double norm = weighted_path_norm(p);
    if (norm > 0.0) p.u *= Q / norm;
  };

  const auto correlation = [&](const ResNetParams& p, const std::vector<int>& xi) {
    double s = 0.0;
    for (int i = 0; i < n; ++i)
      s += xi[i] * resnet_forward(p, points.row(i).transpose());
    return s;
  };

  double sum = 0.0, sumsq = 0.0;
  for (int draw = 0; draw < opt.n_xi; ++draw) {
    std::vector<int> xi(n);
    for (int i = 0; i < n; ++i) xi[i] = rng.sign();
    double best = 0.0; // the zero network is always feasible
    for (int r = 0; r < opt.restarts; ++r) {
      Rng local = rng.split(r + 1);
      // depth-aware scale keeps the initial layer product O(1), so the
      // boundary projection does not crush the output layer on deep nets
      const double scale = std::min(
          0.5, std::sqrt(1.0 / (3.0 * arch.L * arch.m * arch.D)));
      ResNetParams p = random_init(arch, scale, local);
      if (opt.linear_subclass) {
        for (int l = 0; l < arch.L; ++l) {
          p.W[l].setZero();
          p.U[l].setZero();
        }
      }
      project(p);
      double best_traj = correlation(p, xi);
      for (int t = 0; t < opt.steps; ++t) {
        ParamGrad g = zero_grad(arch);
        for (int i = 0; i < n; ++i)
          accumulate_output_grad(p, points.row(i).transpose(), double(xi[i]), g);
        const double step =
            opt.step_size * 0.5 *
            (1.0 + std::cos(M_PI * double(t) / double(opt.steps)));
        axpy(p, g, step);
        project(p);
        // every iterate is feasible, so the running max stays a lower bound
        best_traj = std::max(best_traj, correlation(p, xi));
      }
      best = std::max(best, best_traj);
    }
    const double v = best / n;
    sum += v;
    sumsq += v * v;
  }
  const double mean = sum / opt.n_xi;
  const double var = std::max(sumsq / opt.n_xi - mean * mean, 0.0);
  return {mean, std::sqrt(var / opt.n_xi)};
}

} // namespace respath

#endif

#ifndef RESPATH_TRAIN_HPP
#define RESPATH_TRAIN_HPP

#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "respath/errors.hpp"
#include "respath/netcore.hpp"
#include "respath/norms.hpp"
#include "respath/rng.hpp"

namespace respath {

// Gradients share the parameter layout.
using ParamGrad = ResNetParams;

inline ParamGrad zero_grad(const ResNetArch& arch) { return ResNetParams::zeros(arch); }

inline void axpy(ParamGrad& dst, const ParamGrad& src, double scale) {
  dst.V += scale * src.V;
  dst.u += scale * src.u;
  for (std::size_t l = 0; l < dst.W.size(); ++l) {
    dst.W[l] += scale * src.W[l];
    dst.U[l] += scale * src.U[l];
  }
}

// Accumulate coef * d f(x; theta) / d theta into grad. Reverse mode through
// the residual recursion; relu subgradient at 0 is 0.
inline void accumulate_output_grad(const ResNetParams& p, const VectorXd& x,
                                   double coef, ParamGrad& grad) {
  ForwardTrace tr;
  resnet_forward(p, x, &tr);
  const int L = p.arch.L;
  grad.u += coef * tr.h[L];
  VectorXd dh = coef * p.u;
  for (int l = L - 1; l >= 0; --l) {
    VectorXd dg = p.U[l].transpose() * dh;
    grad.U[l] += dh * tr.g[l].transpose();
    VectorXd dpre(dg.size());
    for (int i = 0; i < dg.size(); ++i)
      dpre(i) = tr.preact[l](i) > 0.0 ? dg(i) : 0.0;
    grad.W[l] += dpre * tr.h[l].transpose();
    dh += p.W[l].transpose() * dpre;
  }
  grad.V += dh * x.transpose();
}

// Subgradient of the weighted path norm: differentiate the absolute-value
// matrix product through the entry sign patterns (sign(0) = 0).
inline ParamGrad weighted_path_norm_subgrad(const ResNetParams& p) {
  p.validate();
  const int L = p.arch.L;
  ParamGrad grad = zero_grad(p.arch);

  const auto sgn = [](double v) { return v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0); };

  // left[l] = |u|^T M_L ... M_{l+1}, right[l] = M_{l-1} ... M_1 |V| 1
  std::vector<RowVectorXd> left(L + 1);
  left[L] = p.u.cwiseAbs().transpose();
  for (int l = L - 1; l >= 0; --l)
    left[l] = left[l + 1] + 3.0 * (left[l + 1] * p.U[l].cwiseAbs()) * p.W[l].cwiseAbs();
  std::vector<VectorXd> right(L + 1);
  right[0] = p.V.cwiseAbs() * VectorXd::Ones(p.arch.d);
  for (int l = 0; l < L; ++l)
    right[l + 1] = right[l] + 3.0 * p.U[l].cwiseAbs() * (p.W[l].cwiseAbs() * right[l]);

  for (int i = 0; i < p.arch.D; ++i) grad.u(i) = sgn(p.u(i)) * right[L](i);
  for (int i = 0; i < p.arch.D; ++i)
    for (int j = 0; j < p.arch.d; ++j)
      grad.V(i, j) = sgn(p.V(i, j)) * left[0](i);
  for (int l = 0; l < L; ++l) {
    const VectorXd wr = p.W[l].cwiseAbs() * right[l];       // m
    const RowVectorXd lu = left[l + 1] * p.U[l].cwiseAbs(); // m
    for (int a = 0; a < p.arch.D; ++a)
      for (int b = 0; b < p.arch.m; ++b)
        grad.U[l](a, b) = 3.0 * sgn(p.U[l](a, b)) * left[l + 1](a) * wr(b);
    for (int a = 0; a < p.arch.m; ++a)
      for (int b = 0; b < p.arch.D; ++b)
        grad.W[l](a, b) = 3.0 * sgn(p.W[l](a, b)) * lu(a) * right[l](b);
  }
  return grad;
}

inline double penalty_coefficient(double lambda, std::optional<double> B, int d,
                                  int n) {
  const double base = 3.0 * lambda * std::sqrt(2.0 * std::log(2.0 * d) / n);
  return B ? base * (*B) : base;
}

// J = empirical_risk(data, theta, B) + (3 lambda [B]) ||theta||_P sqrt(2 log(2d)/n)
inline double regularized_objective(const ResNetParams& p, const Dataset& data,
                                    double lambda,
                                    std::optional<double> B = std::nullopt) {
  const double risk = empirical_risk(data, p, B);
  return risk + penalty_coefficient(lambda, B, p.arch.d, data.n()) * weighted_path_norm(p);
}

namespace detail {

// Loss + penalty gradient with an explicit penalty coefficient, so training
// can keep the full-dataset coefficient on minibatches.
inline ParamGrad objective_gradient(const ResNetParams& p, const Dataset& batch,
                                    std::optional<double> B, double penalty_coef) {
  if (batch.n() < 1) throw DomainError("gradient: empty batch");
  ParamGrad grad = zero_grad(p.arch);
  for (int i = 0; i < batch.n(); ++i) {
    const VectorXd x = batch.x.row(i).transpose();
    const double f = resnet_forward(p, x);
    const double t = truncate01(f);
    const double r = t - batch.y(i);
    if (B && r * r >= (*B) * (*B)) continue; // capped region: flat
    if (f < 0.0 || f > 1.0) continue;        // truncation region: flat
    accumulate_output_grad(p, x, 2.0 * r / batch.n(), grad);
  }
  if (penalty_coef != 0.0)
    axpy(grad, weighted_path_norm_subgrad(p), penalty_coef);
  return grad;
}

} // namespace detail

// Subgradient of the regularized objective restricted to the batch.
inline ParamGrad gradient(const ResNetParams& p, const Dataset& batch,
                          double lambda, std::optional<double> B = std::nullopt) {
  return detail::objective_gradient(
      p, batch, B, penalty_coefficient(lambda, B, p.arch.d, batch.n()));
}

struct TrainConfig {
  double lambda = 0.0;
  std::optional<double> B;
  double step_size = 0.05;
  int batch_size = 32;
  int epochs = 100;
  std::uint64_t seed = 0;
  double init_scale = 0.0; // 0 = default 1/sqrt(D*m)
  bool adam = false;       // adaptive-moment mode; plain subgradient descent otherwise
  int decay_after_epochs = 1; // constant step for this many epochs, then 1/sqrt(t)
};

struct TrainRecord {
  int epoch = 0;
  double risk = 0.0;
  double path_norm = 0.0;
  double objective = 0.0;
};

struct TrainHistory {
  std::vector<TrainRecord> records;
};

struct TrainResult {
  ResNetParams params; // best objective seen at any epoch boundary
  TrainHistory history;
};

inline ResNetParams random_init(const ResNetArch& arch, double init_scale,
                                Rng& rng) {
  ResNetParams p = ResNetParams::zeros(arch);
  const double s = init_scale > 0.0
                       ? init_scale
                       : 1.0 / std::sqrt(double(arch.D) * arch.m);
  for (int i = 0; i < p.V.rows(); ++i)
    for (int j = 0; j < p.V.cols(); ++j) p.V(i, j) = rng.uniform(-s, s);
  for (int l = 0; l < arch.L; ++l) {
    for (int i = 0; i < p.W[l].rows(); ++i)
      for (int j = 0; j < p.W[l].cols(); ++j) p.W[l](i, j) = rng.uniform(-s, s);
    for (int i = 0; i < p.U[l].rows(); ++i)
      for (int j = 0; j < p.U[l].cols(); ++j) p.U[l](i, j) = rng.uniform(-s, s);
  }
  const double su = 1.0 / arch.D;
  for (int i = 0; i < arch.D; ++i) p.u(i) = rng.uniform(-su, su);
  return p;
}

inline TrainResult train(const TrainConfig& cfg, const Dataset& data,
                         const ResNetArch& arch,
                         const ResNetParams* init = nullptr) {
  if (cfg.epochs < 1) throw DomainError("train: epochs must be >= 1");
  data.validate();
  Rng rng(cfg.seed);
  ResNetParams p = init ? *init : random_init(arch, cfg.init_scale, rng);
  p.validate();

  const int n = data.n();
  const int bs = std::min(std::max(cfg.batch_size, 1), n);
  const double penalty_coef =
      penalty_coefficient(cfg.lambda, cfg.B, arch.d, n);

  // adaptive-moment state (used only when cfg.adam)
  ParamGrad m1 = zero_grad(arch), m2 = zero_grad(arch);
  const double beta1 = 0.9, beta2 = 0.999, adam_eps = 1e-8;

  std::vector<int> order(n);
  for (int i = 0; i < n; ++i) order[i] = i;

  TrainResult result;
  result.params = p;
  double best_obj = regularized_objective(p, data, cfg.lambda, cfg.B);
  {
    TrainRecord rec;
    rec.epoch = 0;
    rec.path_norm = weighted_path_norm(p);
    rec.risk = empirical_risk(data, p, cfg.B);
    rec.objective = rec.risk + penalty_coef * rec.path_norm;
    result.history.records.push_back(rec);
  }

  long long step_count = 0;
  const long long warm_steps =
      std::max<long long>(1, (long long)cfg.decay_after_epochs * ((n + bs - 1) / bs));

  for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
    // Fisher-Yates with the run's generator: deterministic shuffles.
    for (int i = n - 1; i > 0; --i) {
      const int j = static_cast<int>(rng.uniform_index(i + 1));
      std::swap(order[i], order[j]);
    }
    for (int start = 0; start < n; start += bs) {
      const int count = std::min(bs, n - start);
      Dataset batch;
      batch.x.resize(count, data.x.cols());
      batch.y.resize(count);
      for (int k = 0; k < count; ++k) {
        batch.x.row(k) = data.x.row(order[start + k]);
        batch.y(k) = data.y(order[start + k]);
      }
      ParamGrad g = detail::objective_gradient(p, batch, cfg.B, penalty_coef);
      ++step_count;
      const double step =
          step_count <= warm_steps
              ? cfg.step_size
              : cfg.step_size * std::sqrt(double(warm_steps) / double(step_count));
      if (cfg.adam) {
        const auto adam_update = [&](auto& theta, auto& mm, auto& vv,
                                     const auto& gg) {
          mm = beta1 * mm + (1.0 - beta1) * gg;
          vv = (beta2 * vv.array() + (1.0 - beta2) * gg.array().square()).matrix();
          const double c1 = 1.0 - std::pow(beta1, double(step_count));
          const double c2 = 1.0 - std::pow(beta2, double(step_count));
          theta -= (step * (mm.array() / c1) /
                    ((vv.array() / c2).sqrt() + adam_eps))
                       .matrix();
        };
        adam_update(p.u, m1.u, m2.u, g.u);
        adam_update(p.V, m1.V, m2.V, g.V);
        for (int l = 0; l < arch.L; ++l) {
          adam_update(p.W[l], m1.W[l], m2.W[l], g.W[l]);
          adam_update(p.U[l], m1.U[l], m2.U[l], g.U[l]);
        }
      } else {
        axpy(p, g, -step);
      }
      bool finite = p.V.allFinite() && p.u.allFinite();
      for (int l = 0; finite && l < arch.L; ++l)
        finite = p.W[l].allFinite() && p.U[l].allFinite();
      if (!finite)
        throw DivergenceError("train: non-finite parameters at epoch " +
                              std::to_string(epoch));
    }

    TrainRecord rec;
    rec.epoch = epoch;
    rec.path_norm = weighted_path_norm(p);
    rec.risk = empirical_risk(data, p, cfg.B);
    rec.objective = rec.risk + penalty_coef * rec.path_norm;
    if (!std::isfinite(rec.objective))
      throw DivergenceError("train: non-finite objective at epoch " +
                            std::to_string(epoch));
    result.history.records.push_back(rec);
    if (rec.objective < best_obj) {
      best_obj = rec.objective;
      result.params = p;
    }
  }
  return result;
}

} // namespace respath

#endif

#ifndef RESPATH_TARGETS_HPP
#define RESPATH_TARGETS_HPP

#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <utility>
#include <vector>

#include "respath/errors.hpp"
#include "respath/netcore.hpp"
#include "respath/rng.hpp"

namespace respath {

// Finite ReLU mixture f*(x) = sum_j a_j relu(omega_j . x) with l1-unit
// directions. The discrete form carries its own Barron-norm certificate.
struct BarronMixture {
  int d = 1;
  VectorXd a;       // K coefficients
  MatrixXd omega;   // K x d directions, each row with l1 norm 1
  double rescale = 1.0; // factor applied when clipping the range into [0,1]

  int K() const { return static_cast<int>(a.size()); }

  void validate() const {
    if (K() < 1) throw StructuralError("BarronMixture: need at least one atom");
    if (omega.rows() != K() || omega.cols() != d)
      throw StructuralError("BarronMixture: omega must be K x d");
    for (int j = 0; j < K(); ++j)
      if (std::abs(omega.row(j).lpNorm<1>() - 1.0) > 1e-12)
        throw StructuralError("BarronMixture: direction l1 norm must be 1");
  }
};

// Sub-gaussian label noise certificate: Pr{|eps| > t} <= c exp(-t^2 / 2 sigma^2)
// for t >= tau.
struct NoiseModel {
  enum class Kind { None, Gaussian };
  Kind kind = Kind::None;
  double sigma = 0.0;
  double c = 0.0;
  double tau = 0.0;

  static NoiseModel none() { return NoiseModel{}; }
  static NoiseModel gaussian(double sigma) {
    NoiseModel nm;
    nm.kind = Kind::Gaussian;
    nm.sigma = sigma;
    nm.c = 2.0;
    nm.tau = 0.0;
    return nm;
  }

  double draw(Rng& rng) const {
    switch (kind) {
      case Kind::Gaussian:
        return sigma * rng.gaussian();
      case Kind::None:
      default:
        return 0.0;
    }
  }
};

inline double mixture_eval(const BarronMixture& target, const VectorXd& x) {
  if (x.size() != target.d)
    throw StructuralError("mixture_eval: input length must equal d");
  double s = 0.0;
  for (int j = 0; j < target.K(); ++j)
    s += target.a(j) * relu(target.omega.row(j).dot(x));
  return s;
}

// Value of the atomic Barron-norm infimum: min over simplex weights p_j of
// sqrt(sum a_j^2 / p_j) equals sum |a_j|, attained at p_j proportional to |a_j|.
inline double barron_norm_upper(const BarronMixture& target) {
  return target.a.lpNorm<1>();
}

inline VectorXd sample_point(int d, Rng& rng) {
  VectorXd x(d);
  x(0) = 1.0;
  for (int k = 1; k < d; ++k) x(k) = rng.uniform();
  return x;
}

// Random l1-unit directions with uniform signed coordinates, coefficients
// uniform in [-coef_scale, coef_scale]. When rescale_to_unit is set, the
// mixture is affinely mapped so that its range over MC probes lies in [0,1];
// the shift rides on the constant coordinate as an extra atom.
inline BarronMixture random_mixture(int K, int d, double coef_scale,
                                    std::uint64_t seed,
                                    bool rescale_to_unit = true,
                                    int probes = 2000) {
  if (K < 1) throw DomainError("random_mixture: K must be >= 1");
  if (d < 2) throw DomainError("random_mixture: d must be >= 2");
  Rng rng(seed);
  BarronMixture t;
  t.d = d;
  t.a.resize(K);
  t.omega.resize(K, d);
  for (int j = 0; j < K; ++j) {
    VectorXd w(d);
    double l1 = 0.0;
    do {
      for (int k = 0; k < d; ++k) w(k) = rng.uniform(-1.0, 1.0);
      l1 = w.lpNorm<1>();
    } while (l1 < 1e-8);
    t.omega.row(j) = w.transpose() / l1;
    t.a(j) = rng.uniform(-coef_scale, coef_scale);
  }
  if (rescale_to_unit) {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (int i = 0; i < probes; ++i) {
      const double v = mixture_eval(t, sample_point(d, rng));
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
    const double span = std::max(hi - lo, 1e-8);
    const double scale = 1.0 / span;
    BarronMixture r;
    r.d = d;
    r.rescale = scale;
    r.a.resize(K + 1);
    r.omega.resize(K + 1, d);
    r.a.head(K) = t.a * scale;
    r.omega.topRows(K) = t.omega;
    // shift atom: relu(e_1 . x) = 1 on the augmented domain
    r.a(K) = -lo * scale;
    r.omega.row(K).setZero();
    r.omega(K, 0) = 1.0;
    return r;
  }
  return t;
}

inline Dataset sample_dataset(const BarronMixture& target, int n,
                              const NoiseModel& noise, std::uint64_t seed) {
  if (n < 1) throw DomainError("sample_dataset: n must be >= 1");
  Rng rng(seed);
  Dataset data;
  data.x.resize(n, target.d);
  data.y.resize(n);
  for (int i = 0; i < n; ++i) {
    const VectorXd x = sample_point(target.d, rng);
    data.x.row(i) = x.transpose();
    data.y(i) = mixture_eval(target, x) + noise.draw(rng);
  }
  return data;
}

// Monte Carlo surrogate for the truncated population risk E_x l(x; theta).
// Returns (estimate, standard error). Deterministic given the seed.
inline std::pair<double, double> population_risk_mc(
    const BarronMixture& target, const NoiseModel& noise, const ResNetParams& p,
    int n_mc, std::uint64_t seed, std::optional<double> B = std::nullopt) {
  if (n_mc < 100) throw DomainError("population_risk_mc: n_mc must be >= 100");
  Rng rng(seed);
  double sum = 0.0, sumsq = 0.0;
  for (int i = 0; i < n_mc; ++i) {
    const VectorXd x = sample_point(target.d, rng);
    const double y = mixture_eval(target, x) + noise.draw(rng);
    const double l = truncated_loss(p, x, y, B);
    sum += l;
    sumsq += l * l;
  }
  const double mean = sum / n_mc;
  const double var = std::max(sumsq / n_mc - mean * mean, 0.0);
  return {mean, std::sqrt(var / n_mc)};
}

} // namespace respath

#endif

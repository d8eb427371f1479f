#ifndef RESPATH_BOUNDS_HPP
#define RESPATH_BOUNDS_HPP

#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "respath/errors.hpp"

namespace respath {

// Theorem thresholds for the regularization multiplier and the loss cap.
struct Thresholds {
  double lambda_min = 0.0;
  std::optional<double> B_min;
};

// lambda >= 4 + 2B / (3 sqrt(2 log 2d)) (B = 1 for the noiseless model);
// B >= 1 + max{tau, sigma sqrt(log n)}.
inline Thresholds thresholds(int d, std::optional<double> B = std::nullopt,
                             double tau = 0.0, double sigma = 0.0,
                             std::optional<int> n = std::nullopt) {
  if (d < 2) throw DomainError("thresholds: d must be >= 2");
  Thresholds t;
  const double root = std::sqrt(2.0 * std::log(2.0 * d));
  t.lambda_min = 4.0 + 2.0 * B.value_or(1.0) / (3.0 * root);
  if (n) {
    if (*n < 2) throw DomainError("thresholds: n must be >= 2 for B_min");
    t.B_min = 1.0 + std::max(tau, sigma * std::sqrt(std::log(double(*n))));
  }
  return t;
}

// 16 b^2 / (Lm) + (12 b + 1)(3 (4 + lambda) sqrt(2 log 2d) + 2) / sqrt(n)
//   + 4 sqrt(2 log(14/delta) / n)
inline double apriori_rhs(double barron, int L, int m, int d, int n,
                          double lambda, double delta) {
  if (delta <= 0.0 || delta >= 1.0) throw DomainError("apriori_rhs: delta in (0,1)");
  const double root = std::sqrt(2.0 * std::log(2.0 * d));
  const double sqn = std::sqrt(double(n));
  return 16.0 * barron * barron / (double(L) * m) +
         (12.0 * barron + 1.0) * (3.0 * (4.0 + lambda) * root + 2.0) / sqn +
         4.0 * std::sqrt(2.0 * std::log(14.0 / delta) / n);
}

// 2 (P + 1)(6 sqrt(2 log 2d) + 1) / sqrt(n) + 2 sqrt(2 log(7/delta) / n)
inline double apost_rhs(double path_norm, int d, int n, double delta) {
  if (delta <= 0.0 || delta >= 1.0) throw DomainError("apost_rhs: delta in (0,1)");
  const double root = std::sqrt(2.0 * std::log(2.0 * d));
  return 2.0 * (path_norm + 1.0) * (6.0 * root + 1.0) / std::sqrt(double(n)) +
         2.0 * std::sqrt(2.0 * std::log(7.0 / delta) / n);
}

// Noisy a priori right-hand side with loss cap B and noise certificate (c, sigma).
inline double apriori_noisy_rhs(double barron, int L, int m, int d, int n,
                                double lambda, double B, double delta,
                                double c, double sigma) {
  if (delta <= 0.0 || delta >= 1.0)
    throw DomainError("apriori_noisy_rhs: delta in (0,1)");
  const double root = std::sqrt(2.0 * std::log(2.0 * d));
  const double sqn = std::sqrt(double(n));
  return 16.0 * barron * barron / (double(L) * m) +
         (12.0 * barron + 1.0) * (3.0 * (4.0 + lambda) * B * root + 2.0 * B * B) / sqn +
         4.0 * B * B * std::sqrt(2.0 * std::log(14.0 / delta) / n) +
         2.0 * c * (4.0 * sigma * sigma + 1.0) / sqn;
}

// |L - L_B| <= c (4 sigma^2 + 1) / sqrt(n)
inline double noise_gap_rhs(double c, double sigma, int n) {
  if (n < 1) throw DomainError("noise_gap_rhs: n must be >= 1");
  return c * (4.0 * sigma * sigma + 1.0) / std::sqrt(double(n));
}

// Generic-framework a posteriori bound:
// 2 (N + 1)(2 psi + 1) / sqrt(n) + 2 sqrt(2 log(7/delta) / n)
inline double apost_generic_rhs(double norm_value, double psi, int n, double delta) {
  if (delta <= 0.0 || delta >= 1.0)
    throw DomainError("apost_generic_rhs: delta in (0,1)");
  return 2.0 * (norm_value + 1.0) * (2.0 * psi + 1.0) / std::sqrt(double(n)) +
         2.0 * std::sqrt(2.0 * std::log(7.0 / delta) / n);
}

// Rademacher-complexity rates psi(d, L, m) of the comparison norms.
inline double psi_weighted_path(int d) { return 3.0 * std::sqrt(2.0 * std::log(2.0 * d)); }
inline double psi_l1_path(int L, int m) {
  return std::pow(2.0, L) * std::sqrt(2.0 * std::log(2.0 * m));
}
inline double psi_spectral(int n, int m) {
  return 12.0 * std::log(double(n)) * std::sqrt(2.0 * std::log(2.0 * m));
}
inline double psi_variational(int L, int m, int d, int n) {
  return double(L) * std::log(double(n)) *
         std::sqrt(double(L - 2) * std::log(double(m)) + std::log(8.0 * M_E * d));
}

// Certified norms of the reference construction, per unit Barron norm.
inline double cert_weighted_path(double barron) { return 12.0 * barron; }
inline double cert_l1_path(double barron) { return 4.0 * barron; }
inline double cert_spectral(int L, int m, double barron) {
  return 16.0 * std::pow(double(L) * m, 1.5) * barron;
}
inline double cert_variational(int m, double barron) {
  return 4.0 * std::sqrt(double(m)) * barron;
}

// One comparison row: a norm's complexity rate, its certified construction
// norm, and the resulting generic a priori estimation term.
struct FrameworkRow {
  std::string norm;
  double psi = 0.0;
  double cert = 0.0;
  double lambda_min = 0.0;     // 4 + 2 / psi
  double estimation_term = 0.0; // (cert + 1)((4 + lambda) psi + 2) / sqrt(n)
};

struct FrameworkReport {
  double approx_term = 0.0; // 16 b^2 / (Lm), shared by every row
  std::vector<FrameworkRow> rows;
};

inline FrameworkRow make_framework_row(const std::string& name, double psi,
                                       double cert, int n) {
  FrameworkRow row;
  row.norm = name;
  row.psi = psi;
  row.cert = cert;
  row.lambda_min = 4.0 + 2.0 / psi;
  row.estimation_term =
      (cert + 1.0) * ((4.0 + row.lambda_min) * psi + 2.0) / std::sqrt(double(n));
  return row;
}

inline FrameworkReport framework_compare(int L, int m, int d, int n, double barron) {
  if (L < 2) throw DomainError("framework_compare: L must be >= 2");
  if (m <= d) throw DomainError("framework_compare: m must exceed d for fc norms");
  FrameworkReport rep;
  rep.approx_term = 16.0 * barron * barron / (double(L) * m);
  rep.rows.push_back(make_framework_row("weighted_path", psi_weighted_path(d),
                                        cert_weighted_path(barron), n));
  rep.rows.push_back(make_framework_row("l1_path", psi_l1_path(L, m),
                                        cert_l1_path(barron), n));
  rep.rows.push_back(make_framework_row("spectral", psi_spectral(n, m),
                                        cert_spectral(L, m, barron), n));
  rep.rows.push_back(make_framework_row("variational", psi_variational(L, m, d, n),
                                        cert_variational(m, barron), n));
  return rep;
}

// Evaluated right-hand sides for one configuration, with inputs echoed so
// each entry can be recomputed.
struct BoundReport {
  // inputs
  double barron = 0.0;
  int L = 0, m = 0, d = 0, n = 0;
  double lambda = 0.0, delta = 0.0;
  std::optional<double> B;
  double c = 0.0, sigma = 0.0;
  double path_norm = 0.0;
  // outputs
  double apriori = 0.0;
  double apost = 0.0;
  std::optional<double> apriori_noisy;
  std::optional<double> noise_gap;
  bool lambda_certified = true;
  bool B_certified = true;
};

inline BoundReport make_bound_report(double barron, int L, int m, int d, int n,
                                     double lambda, double delta, double path_norm,
                                     std::optional<double> B = std::nullopt,
                                     double c = 0.0, double sigma = 0.0,
                                     double tau = 0.0) {
  BoundReport r;
  r.barron = barron;
  r.L = L;
  r.m = m;
  r.d = d;
  r.n = n;
  r.lambda = lambda;
  r.delta = delta;
  r.B = B;
  r.c = c;
  r.sigma = sigma;
  r.path_norm = path_norm;
  r.apriori = apriori_rhs(barron, L, m, d, n, lambda, delta);
  r.apost = apost_rhs(path_norm, d, n, delta);
  const Thresholds t = thresholds(d, B, tau, sigma, n);
  r.lambda_certified = lambda >= t.lambda_min;
  if (B) {
    r.apriori_noisy = apriori_noisy_rhs(barron, L, m, d, n, lambda, *B, delta, c, sigma);
    r.noise_gap = noise_gap_rhs(c, sigma, n);
    r.B_certified = t.B_min ? (*B >= *t.B_min) : true;
  }
  return r;
}

} // namespace respath

#endif

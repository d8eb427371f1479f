#ifndef RESPATH_NORMS_HPP
#define RESPATH_NORMS_HPP

#include <cmath>
#include <optional>
#include <vector>

#include "respath/errors.hpp"
#include "respath/netcore.hpp"
#include "respath/rng.hpp"

namespace respath {

// All parameter norms for one network. The fc-only entries stay empty for
// residual networks.
struct NormReport {
  double weighted_path = 0.0;
  double l1_path = 0.0;
  std::optional<double> spectral;
  std::optional<double> variational;
};

namespace detail {

// ||u|^T prod_l (I + w |U_l||W_l|) |V||_1 for w = 3 (weighted) or 1 (plain l1).
inline double path_norm_product(const ResNetParams& p, double weight) {
  p.validate();
  RowVectorXd r = p.u.cwiseAbs().transpose();
  for (int l = p.arch.L - 1; l >= 0; --l)
    r += weight * (r * p.U[l].cwiseAbs()) * p.W[l].cwiseAbs();
  return (r * p.V.cwiseAbs()).lpNorm<1>();
}

} // namespace detail

inline double weighted_path_norm(const ResNetParams& p) {
  return detail::path_norm_product(p, 3.0);
}

inline double l1_path_norm(const ResNetParams& p) {
  return detail::path_norm_product(p, 1.0);
}

// Entry (l, i): || 3 |W_l^{i,:}| (I + 3|U_{l-1}||W_{l-1}|) ... |V| ||_1.
inline MatrixXd neuron_path_norms(const ResNetParams& p) {
  p.validate();
  MatrixXd out(p.arch.L, p.arch.m);
  // |M_{l-1} ... M_1 |V|| built up incrementally, M_k = I + 3 |U_k||W_k|.
  MatrixXd prefix = p.V.cwiseAbs(); // D x d
  for (int l = 0; l < p.arch.L; ++l) {
    const MatrixXd rows = 3.0 * p.W[l].cwiseAbs() * prefix; // m x d
    for (int i = 0; i < p.arch.m; ++i) out(l, i) = rows.row(i).lpNorm<1>();
    prefix += 3.0 * p.U[l].cwiseAbs() * (p.W[l].cwiseAbs() * prefix);
  }
  return out;
}

// Explicit sum over input-to-output paths of 3^p * product of |weights|,
// p = number of nonlinearities on the path. Oracle for weighted_path_norm.
inline double path_norm_by_enumeration(const ResNetParams& p,
                                       double max_paths = 1e7) {
  p.validate();
  const int d = p.arch.d, D = p.arch.D, m = p.arch.m, L = p.arch.L;
  // d * D choices entering V, then per block: skip, or one of m*D detours.
  const double count = static_cast<double>(d) * D * std::pow(1.0 + double(m) * D, L);
  if (count > max_paths)
    throw CapacityError("path_norm_by_enumeration: path count exceeds guard");

  std::vector<MatrixXd> absW(L), absU(L);
  for (int l = 0; l < L; ++l) {
    absW[l] = p.W[l].cwiseAbs();
    absU[l] = p.U[l].cwiseAbs();
  }
  const MatrixXd absV = p.V.cwiseAbs();
  const VectorXd absu = p.u.cwiseAbs();

  double total = 0.0;
  // Depth-first over (block index, current skip channel, accumulated weight).
  auto walk = [&](auto&& self, int l, int c, double w) -> void {
    if (l == L) {
      total += w * absu(c);
      return;
    }
    self(self, l + 1, c, w); // skip the block
    for (int i = 0; i < m; ++i) {
      const double through = 3.0 * w * absW[l](i, c);
      if (through == 0.0) continue;
      for (int cc = 0; cc < D; ++cc)
        if (absU[l](cc, i) != 0.0) self(self, l + 1, cc, through * absU[l](cc, i));
    }
  };
  for (int j = 0; j < d; ++j)
    for (int c = 0; c < D; ++c)
      if (absV(c, j) != 0.0) walk(walk, 0, c, absV(c, j));
  return total;
}

// Largest singular value by power iteration on A^T A with a deterministic
// seeded start vector. Flags non-convergence instead of failing.
struct SpectralNormResult {
  double value = 0.0;
  bool converged = true;
  int iterations = 0;
};

inline SpectralNormResult spectral_norm_power(const MatrixXd& A,
                                              double tol = 1e-10,
                                              int max_iter = 10000,
                                              std::uint64_t seed = 0x5eedULL) {
  if (A.rows() == 0 || A.cols() == 0 || A.cwiseAbs().maxCoeff() == 0.0)
    throw DegenerateInputError("spectral_norm_power: zero matrix");
  Rng rng(seed);
  VectorXd v(A.cols());
  for (int k = 0; k < v.size(); ++k) v(k) = rng.uniform(-1.0, 1.0);
  v.normalize();
  SpectralNormResult res;
  double prev = 0.0;
  for (int it = 1; it <= max_iter; ++it) {
    VectorXd w = A.transpose() * (A * v);
    const double norm = w.norm();
    if (norm == 0.0) {
      // start vector fell in the null space; restart deterministically
      for (int k = 0; k < v.size(); ++k) v(k) = rng.uniform(-1.0, 1.0);
      v.normalize();
      continue;
    }
    v = w / norm;
    const double est = std::sqrt(norm);
    res.iterations = it;
    if (it > 1 && std::abs(est - prev) <= tol * std::max(est, 1e-300)) {
      res.value = est;
      return res;
    }
    prev = est;
  }
  res.value = prev;
  res.converged = false;
  return res;
}

// Sum over columns of A of the column l2 norm (the (2,1) matrix norm).
inline double norm_21(const MatrixXd& A) {
  double s = 0.0;
  for (int j = 0; j < A.cols(); ++j) s += A.col(j).norm();
  return s;
}

// prod_l ||W_l||_sigma * (sum_l ||W_l^T||_{2,1}^{2/3} / ||W_l||_sigma^{2/3})^{3/2}
inline double spectral_complexity(const FcParams& p, double tol = 1e-10) {
  p.validate();
  if (tol <= 0.0) throw DomainError("spectral_complexity: tol must be positive");
  double prod = 1.0, sum = 0.0;
  for (int l = 0; l < p.L; ++l) {
    if (p.W[l].cwiseAbs().maxCoeff() == 0.0)
      throw DegenerateInputError("spectral_complexity: layer " + std::to_string(l) +
                                 " is identically zero");
    const double s = spectral_norm_power(p.W[l], tol).value;
    const double t = norm_21(p.W[l].transpose());
    prod *= s;
    sum += std::pow(t, 2.0 / 3.0) / std::pow(s, 2.0 / 3.0);
  }
  return prod * std::pow(sum, 1.5);
}

// Per-layer pieces of the variational norm; exposed so the mass identity
// sum_j V_in V_out = V can be checked layer by layer.
struct VariationalBreakdown {
  double V = 0.0;
  std::vector<VectorXd> v_in;  // per layer, per neuron
  std::vector<VectorXd> v_out; // per layer, per neuron
  double norm = 0.0;
};

inline VariationalBreakdown variational_breakdown(const FcParams& p) {
  p.validate();
  const int L = p.L;
  std::vector<MatrixXd> absW(L);
  for (int l = 0; l < L; ++l) absW[l] = p.W[l].cwiseAbs();

  // prefix[l] = |W_l| ... |W_1| ; suffix[l] = |W_L| ... |W_{l+1}| (empty = I)
  std::vector<MatrixXd> prefix(L);
  prefix[0] = absW[0];
  for (int l = 1; l < L; ++l) prefix[l] = absW[l] * prefix[l - 1];
  std::vector<MatrixXd> suffix(L);
  suffix[L - 1] = MatrixXd::Identity(1, 1);
  for (int l = L - 2; l >= 0; --l) {
    if (l == L - 2)
      suffix[l] = absW[L - 1];
    else
      suffix[l] = suffix[l + 1] * absW[l + 1];
  }

  VariationalBreakdown b;
  b.V = prefix[L - 1].sum(); // 1 x d row of nonnegative entries
  double acc = 0.0;
  b.v_in.resize(L);
  b.v_out.resize(L);
  for (int l = 0; l < L; ++l) {
    const int rows = static_cast<int>(absW[l].rows());
    b.v_in[l].resize(rows);
    b.v_out[l].resize(rows);
    for (int j = 0; j < rows; ++j) {
      b.v_in[l](j) = (absW[l].row(j) * (l > 0 ? prefix[l - 1] : MatrixXd::Identity(p.d, p.d))).sum();
      b.v_out[l](j) = suffix[l].col(j).sum();
      acc += std::sqrt(b.v_in[l](j) * b.v_out[l](j));
    }
  }
  b.norm = std::sqrt(b.V) * acc / L;
  return b;
}

inline double variational_norm(const FcParams& p) {
  return variational_breakdown(p).norm;
}

inline NormReport norm_report(const ResNetParams& p) {
  NormReport r;
  r.weighted_path = weighted_path_norm(p);
  r.l1_path = l1_path_norm(p);
  return r;
}

inline NormReport norm_report(const FcParams& p) {
  NormReport r;
  // Path norms specialize to the fc chain: every path crosses L-1 relus.
  // Reported via the product of absolute matrices.
  MatrixXd prod = p.W[0].cwiseAbs();
  for (int l = 1; l < p.L; ++l) prod = p.W[l].cwiseAbs() * prod;
  r.l1_path = prod.sum();
  r.weighted_path = std::pow(3.0, p.L - 1) * prod.sum();
  r.spectral = spectral_complexity(p);
  r.variational = variational_norm(p);
  return r;
}

} // namespace respath

#endif

#ifndef RESPATH_NETCORE_HPP
#define RESPATH_NETCORE_HPP

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "respath/errors.hpp"
#include "respath/rng.hpp"

namespace respath {

using Eigen::MatrixXd;
using Eigen::RowVectorXd;
using Eigen::VectorXd;

inline double relu(double v) { return v > 0.0 ? v : 0.0; }

// Residual network sizes. d counts the constant-1 input coordinate.
struct ResNetArch {
  int d = 1; // input dimension, including the leading 1
  int D = 1; // skip-channel width
  int m = 1; // residual-block width
  int L = 1; // number of residual blocks

  void validate() const {
    if (d < 1 || D < 1 || m < 1 || L < 1)
      throw StructuralError("ResNetArch: all of d, D, m, L must be >= 1");
  }
};

// Parameters of f(x) = u^T h_L with h_l = h_{l-1} + U_l relu(W_l h_{l-1}),
// h_0 = V x.
struct ResNetParams {
  ResNetArch arch;
  MatrixXd V;              // D x d
  std::vector<MatrixXd> W; // L matrices, m x D
  std::vector<MatrixXd> U; // L matrices, D x m
  VectorXd u;              // D

  static ResNetParams zeros(const ResNetArch& arch) {
    arch.validate();
    ResNetParams p;
    p.arch = arch;
    p.V = MatrixXd::Zero(arch.D, arch.d);
    p.W.assign(arch.L, MatrixXd::Zero(arch.m, arch.D));
    p.U.assign(arch.L, MatrixXd::Zero(arch.D, arch.m));
    p.u = VectorXd::Zero(arch.D);
    return p;
  }

  void validate() const {
    arch.validate();
    if (V.rows() != arch.D || V.cols() != arch.d)
      throw StructuralError("ResNetParams: V must be D x d");
    if (static_cast<int>(W.size()) != arch.L || static_cast<int>(U.size()) != arch.L)
      throw StructuralError("ResNetParams: need L blocks");
    for (int l = 0; l < arch.L; ++l) {
      if (W[l].rows() != arch.m || W[l].cols() != arch.D)
        throw StructuralError("ResNetParams: W[" + std::to_string(l) + "] must be m x D");
      if (U[l].rows() != arch.D || U[l].cols() != arch.m)
        throw StructuralError("ResNetParams: U[" + std::to_string(l) + "] must be D x m");
    }
    if (u.size() != arch.D)
      throw StructuralError("ResNetParams: u must have length D");
    if (!V.allFinite() || !u.allFinite())
      throw StructuralError("ResNetParams: non-finite entry");
    for (int l = 0; l < arch.L; ++l)
      if (!W[l].allFinite() || !U[l].allFinite())
        throw StructuralError("ResNetParams: non-finite entry in block " + std::to_string(l));
  }
};

// Fully-connected comparison network: f(x) = W_L relu(W_{L-1} ... relu(W_1 x)).
struct FcParams {
  int d = 1;
  int m = 1;
  int L = 2;
  std::vector<MatrixXd> W; // shapes m x d, (m x m)*, 1 x m

  void validate() const {
    if (L < 2) throw StructuralError("FcParams: L must be >= 2");
    if (static_cast<int>(W.size()) != L)
      throw StructuralError("FcParams: need L weight matrices");
    if (W.front().cols() != d)
      throw StructuralError("FcParams: W[0] must have d columns");
    if (W.back().rows() != 1)
      throw StructuralError("FcParams: W[L-1] must have one row");
    for (int l = 0; l + 1 < L; ++l) {
      if (W[l + 1].cols() != W[l].rows())
        throw StructuralError("FcParams: shape chain breaks at layer " + std::to_string(l + 1));
      if (!W[l].allFinite())
        throw StructuralError("FcParams: non-finite entry");
    }
  }
};

// Intermediate activations of one forward pass.
struct ForwardTrace {
  std::vector<VectorXd> h;      // L+1 vectors of length D
  std::vector<VectorXd> g;      // L vectors of length m
  std::vector<VectorXd> preact; // L vectors of length m, W_l h_{l-1}
};

// n samples in {1} x [0,1]^{d-1} with real labels.
struct Dataset {
  MatrixXd x; // n x d, row per sample
  VectorXd y; // n
  int n() const { return static_cast<int>(x.rows()); }

  void validate() const {
    if (x.rows() != y.size()) throw StructuralError("Dataset: x/y size mismatch");
    for (int i = 0; i < x.rows(); ++i) {
      if (x(i, 0) != 1.0)
        throw DomainError("Dataset: first coordinate of every sample must be 1");
      for (int k = 0; k < x.cols(); ++k)
        if (x(i, k) < 0.0 || x(i, k) > 1.0)
          throw DomainError("Dataset: coordinates must lie in [0,1]");
    }
  }
};

// Prepend the constant-1 coordinate implementing the bias convention.
inline VectorXd augment_input(const VectorXd& raw) {
  VectorXd x(raw.size() + 1);
  x(0) = 1.0;
  for (int k = 0; k < raw.size(); ++k) {
    if (!(raw(k) >= 0.0 && raw(k) <= 1.0))
      throw DomainError("augment_input: coordinate outside [0,1]");
    x(k + 1) = raw(k);
  }
  return x;
}

inline double resnet_forward(const ResNetParams& p, const VectorXd& x,
                             ForwardTrace* trace = nullptr) {
  if (x.size() != p.arch.d)
    throw StructuralError("resnet_forward: input length must equal d");
  VectorXd h = p.V * x;
  if (trace) {
    trace->h.clear();
    trace->g.clear();
    trace->preact.clear();
    trace->h.push_back(h);
  }
  for (int l = 0; l < p.arch.L; ++l) {
    VectorXd pre = p.W[l] * h;
    VectorXd g = pre.cwiseMax(0.0);
    h += p.U[l] * g;
    if (trace) {
      trace->preact.push_back(std::move(pre));
      trace->g.push_back(std::move(g));
      trace->h.push_back(h);
    }
  }
  return p.u.dot(h);
}

inline double fc_forward(const FcParams& p, const VectorXd& x) {
  if (x.size() != p.d)
    throw StructuralError("fc_forward: input length must equal d");
  p.validate();
  VectorXd h = x;
  for (int l = 0; l + 1 < p.L; ++l) h = (p.W[l] * h).cwiseMax(0.0);
  return (p.W.back() * h)(0);
}

inline double truncate01(double v) { return std::min(std::max(v, 0.0), 1.0); }

// |T_{[0,1]} f(x) - y|^2, optionally capped at B^2.
inline double truncated_loss(const ResNetParams& p, const VectorXd& x, double y,
                             std::optional<double> B = std::nullopt) {
  const double f = resnet_forward(p, x);
  const double r = truncate01(f) - y;
  double loss = r * r;
  if (B) loss = std::min(loss, (*B) * (*B));
  return loss;
}

inline double empirical_risk(const Dataset& data, const ResNetParams& p,
                             std::optional<double> B = std::nullopt) {
  if (data.n() < 1) throw DomainError("empirical_risk: empty dataset");
  double sum = 0.0;
  for (int i = 0; i < data.n(); ++i)
    sum += truncated_loss(p, data.x.row(i).transpose(), data.y(i), B);
  return sum / data.n();
}

} // namespace respath

#endif

#ifndef RESPATH_CONSTRUCT_HPP
#define RESPATH_CONSTRUCT_HPP

#include <cmath>
#include <cstdint>
#include <vector>

#include "respath/errors.hpp"
#include "respath/netcore.hpp"
#include "respath/targets.hpp"

namespace respath {

// Finite two-layer expansion sum_j a_j relu(b_j . x); the currency of the
// constructive approximations.
struct TwoLayerRep {
  VectorXd a; // M coefficients
  MatrixXd b; // M x d directions
  int M() const { return static_cast<int>(a.size()); }
  int d() const { return static_cast<int>(b.cols()); }

  void validate() const {
    if (M() < 1) throw StructuralError("TwoLayerRep: need at least one neuron");
    if (b.rows() != M()) throw StructuralError("TwoLayerRep: a/b size mismatch");
    if (!a.allFinite() || !b.allFinite())
      throw StructuralError("TwoLayerRep: non-finite entry");
  }
};

inline double two_layer_eval(const TwoLayerRep& rep, const VectorXd& x) {
  if (x.size() != rep.d())
    throw StructuralError("two_layer_eval: input length must equal d");
  double s = 0.0;
  for (int j = 0; j < rep.M(); ++j) s += rep.a(j) * relu(rep.b.row(j).dot(x));
  return s;
}

// Rebalance by positive homogeneity: |a'_j| = T for every j with
// T = sum_j |a_j| ||b_j||_1, and sum_j ||b'_j||_1 = 1. Zero neurons are
// dropped first. The represented function is unchanged.
inline TwoLayerRep normalize_two_layer(const TwoLayerRep& rep) {
  rep.validate();
  std::vector<int> keep;
  double total = 0.0;
  for (int j = 0; j < rep.M(); ++j) {
    const double mass = std::abs(rep.a(j)) * rep.b.row(j).lpNorm<1>();
    if (mass > 0.0) {
      keep.push_back(j);
      total += mass;
    }
  }
  if (keep.empty())
    throw DegenerateInputError("normalize_two_layer: all-zero representation");
  TwoLayerRep out;
  out.a.resize(keep.size());
  out.b.resize(keep.size(), rep.d());
  for (std::size_t k = 0; k < keep.size(); ++k) {
    const int j = keep[k];
    const double bnorm = rep.b.row(j).lpNorm<1>();
    // a_j relu(b_j.x) = sign(a_j) T relu(|a_j| ||b_j||_1 / T * b_j / ||b_j||_1 . x)
    out.a(k) = (rep.a(j) > 0 ? total : -total);
    out.b.row(k) = rep.b.row(j) * (std::abs(rep.a(j)) / total);
  }
  return out;
}

// Residual-net lift: skip channel of width D = d + 1 carries the input, the
// last skip coordinate accumulates the neuron outputs block by block.
// Exact: resnet_forward == two_layer_eval, and the weighted path norm equals
// 3 sum_j |a_j| ||b_j||_1.
inline ResNetParams build_resnet(const TwoLayerRep& rep, int L, int m) {
  rep.validate();
  const int d = rep.d();
  const int M = rep.M();
  if (L < 1 || m < 1) throw CapacityError("build_resnet: L and m must be >= 1");
  if (M > static_cast<long long>(L) * m)
    throw CapacityError("build_resnet: M exceeds L*m");
  ResNetArch arch{d, d + 1, m, L};
  ResNetParams p = ResNetParams::zeros(arch);
  p.V.topLeftCorner(d, d).setIdentity();
  p.u(d) = 1.0;
  for (int j = 0; j < M; ++j) {
    const int l = j / m;
    const int i = j % m;
    p.W[l].row(i).head(d) = rep.b.row(j);
    p.U[l](d, i) = rep.a(j);
  }
  return p;
}

// Fully-connected lift. Each neuron occupies its own hidden slot: the first
// m - d slots are filled at layer 1 and carried through the identity-passing
// middle layers; when the rep is larger and L >= 3, up to d more neurons are
// placed at layer L-1 in the slots that no longer need to carry the input.
// This keeps fc_forward == two_layer_eval pointwise (a slot that hosts more
// than one relu would clip the carried sum whenever a later preactivation
// goes negative) while preserving the near-identity layer structure that the
// spectral and variational certificates rely on.
inline FcParams build_fc(const TwoLayerRep& rep, int L, int m) {
  rep.validate();
  const int d = rep.d();
  const int M = rep.M();
  if (L < 2) throw CapacityError("build_fc: L must be >= 2");
  if (m <= d) throw CapacityError("build_fc: m must exceed d");
  const int capacity = (L == 2) ? m : ((L >= 3 && M > m - d) ? m : m - d);
  if (M > capacity)
    throw CapacityError("build_fc: rep width exceeds construction capacity");

  FcParams p;
  p.d = d;
  p.m = m;
  p.L = L;
  p.W.resize(L);

  if (L == 2) {
    p.W[0] = MatrixXd::Zero(m, d);
    for (int j = 0; j < M; ++j) p.W[0].row(j) = rep.b.row(j);
    p.W[1] = MatrixXd::Zero(1, m);
    for (int j = 0; j < M; ++j) p.W[1](0, j) = rep.a(j);
    return p;
  }

  const int early = std::min(M, m - d); // neurons hosted at layer 1
  const int late = M - early;           // neurons hosted at layer L-1

  // Layer 1: input copy on top, one direction per hosted slot below.
  p.W[0] = MatrixXd::Zero(m, d);
  p.W[0].topLeftCorner(d, d).setIdentity();
  for (int j = 0; j < early; ++j) p.W[0].row(d + j) = rep.b.row(j);

  // Middle layers 2 .. L-2 carry everything unchanged.
  for (int l = 1; l < L - 2; ++l) p.W[l] = MatrixXd::Identity(m, m);

  // Layer L-1: carry hosted slots, spend the input-copy slots on the rest.
  p.W[L - 2] = MatrixXd::Zero(m, m);
  for (int j = 0; j < early; ++j) p.W[L - 2](d + j, d + j) = 1.0;
  for (int j = 0; j < late; ++j) p.W[L - 2].row(j).head(d) = rep.b.row(early + j);

  // Output row: signed coefficient per hosted slot.
  p.W[L - 1] = MatrixXd::Zero(1, m);
  for (int j = 0; j < early; ++j) p.W[L - 1](0, d + j) = rep.a(j);
  for (int j = 0; j < late; ++j) p.W[L - 1](0, j) = rep.a(early + j);
  return p;
}

// Maurey subsampling: draw M atoms with probability proportional to |a_j| and
// equal coefficient magnitudes sum|a| / M. Unbiased for the target at every x,
// mean squared error O(1/M). With exact_if_fits, a target that already fits
// is returned as-is.
inline TwoLayerRep subsample_two_layer(const BarronMixture& target, int M,
                                       std::uint64_t seed,
                                       bool exact_if_fits = false) {
  target.validate();
  if (M < 1) throw DomainError("subsample_two_layer: M must be >= 1");
  const double mass = target.a.lpNorm<1>();
  if (mass == 0.0)
    throw DegenerateInputError("subsample_two_layer: zero target");

  if (exact_if_fits && target.K() <= M) {
    TwoLayerRep rep;
    rep.a = target.a;
    rep.b = target.omega;
    return rep;
  }

  // cumulative distribution over atoms, p_j proportional to |a_j|
  std::vector<double> cdf(target.K());
  double acc = 0.0;
  for (int j = 0; j < target.K(); ++j) {
    acc += std::abs(target.a(j)) / mass;
    cdf[j] = acc;
  }
  cdf.back() = 1.0;

  Rng rng(seed);
  TwoLayerRep rep;
  rep.a.resize(M);
  rep.b.resize(M, target.d);
  for (int k = 0; k < M; ++k) {
    const double v = rng.uniform();
    int j = static_cast<int>(std::lower_bound(cdf.begin(), cdf.end(), v) - cdf.begin());
    if (j >= target.K()) j = target.K() - 1;
    rep.a(k) = (target.a(j) >= 0.0 ? mass : -mass) / M;
    rep.b.row(k) = target.omega.row(j);
  }
  return rep;
}

} // namespace respath

#endif

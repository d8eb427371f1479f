#ifndef RESPATH_VERIFY_HPP
#define RESPATH_VERIFY_HPP

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "respath/bounds.hpp"
#include "respath/complexity.hpp"
#include "respath/construct.hpp"
#include "respath/experiment.hpp"
#include "respath/io.hpp"
#include "respath/netcore.hpp"
#include "respath/norms.hpp"
#include "respath/rng.hpp"
#include "respath/targets.hpp"
#include "respath/train.hpp"

namespace respath {

struct CheckResult {
  std::string name;
  bool pass = false;
  std::string detail;
};

using CheckList = std::vector<CheckResult>;

namespace verify_detail {

inline bool close_rel(double a, double b, double tol) {
  return std::abs(a - b) <= tol * std::max({1.0, std::abs(a), std::abs(b)});
}

inline bool close_abs(double a, double b, double tol) {
  return std::abs(a - b) <= tol;
}

inline std::string fmt(double v) {
  std::ostringstream os;
  os.precision(8);
  os << v;
  return os.str();
}

inline ResNetParams random_resnet(const ResNetArch& arch, Rng& rng,
                                  double scale = 1.0) {
  ResNetParams p = ResNetParams::zeros(arch);
  for (int i = 0; i < p.V.rows(); ++i)
    for (int j = 0; j < p.V.cols(); ++j) p.V(i, j) = rng.uniform(-scale, scale);
  for (int l = 0; l < arch.L; ++l) {
    for (int i = 0; i < p.W[l].rows(); ++i)
      for (int j = 0; j < p.W[l].cols(); ++j)
        p.W[l](i, j) = rng.uniform(-scale, scale);
    for (int i = 0; i < p.U[l].rows(); ++i)
      for (int j = 0; j < p.U[l].cols(); ++j)
        p.U[l](i, j) = rng.uniform(-scale, scale);
  }
  for (int i = 0; i < arch.D; ++i) p.u(i) = rng.uniform(-scale, scale);
  return p;
}

inline TwoLayerRep random_rep(int M, int d, Rng& rng, double scale = 1.0) {
  TwoLayerRep rep;
  rep.a.resize(M);
  rep.b.resize(M, d);
  for (int j = 0; j < M; ++j) {
    rep.a(j) = rng.uniform(-scale, scale);
    for (int k = 0; k < d; ++k) rep.b(j, k) = rng.uniform(-1.0, 1.0);
  }
  return rep;
}

inline VectorXd random_point(int d, Rng& rng, double lo = -1.0, double hi = 1.0) {
  VectorXd x(d);
  for (int k = 0; k < d; ++k) x(k) = rng.uniform(lo, hi);
  return x;
}

// Architecture small enough for the enumeration oracle.
inline ResNetArch random_enumerable_arch(Rng& rng, double max_paths = 2e6) {
  for (;;) {
    ResNetArch arch{1 + int(rng.uniform_index(5)), 1 + int(rng.uniform_index(6)),
                    1 + int(rng.uniform_index(4)), 1 + int(rng.uniform_index(4))};
    const double count = double(arch.d) * arch.D *
                         std::pow(1.0 + double(arch.m) * arch.D, arch.L);
    if (count <= max_paths) return arch;
  }
}

// Recompute the neuron norms through their recursion, using only earlier
// entries of the table, and compare against the closed form.
inline double neuron_norm_recursion_error(const ResNetParams& p) {
  const MatrixXd table = neuron_path_norms(p);
  double worst = 0.0;
  for (int l = 0; l < p.arch.L; ++l) {
    for (int i = 0; i < p.arch.m; ++i) {
      double rhs = 3.0 * (p.W[l].row(i).cwiseAbs() * p.V.cwiseAbs()).lpNorm<1>();
      for (int k = 0; k < l; ++k)
        for (int j = 0; j < p.arch.m; ++j)
          rhs += 3.0 * (p.W[l].row(i).cwiseAbs() * p.U[k].col(j).cwiseAbs())(0) *
                 table(k, j);
      const double lhs = table(l, i);
      worst = std::max(worst,
                       std::abs(lhs - rhs) / std::max({1.0, lhs, rhs}));
    }
  }
  return worst;
}

inline double f_decomposition_error(const ResNetParams& p) {
  const MatrixXd table = neuron_path_norms(p);
  double rhs = (p.u.cwiseAbs().transpose() * p.V.cwiseAbs()).lpNorm<1>();
  for (int l = 0; l < p.arch.L; ++l)
    for (int j = 0; j < p.arch.m; ++j)
      rhs += p.u.cwiseAbs().dot(p.U[l].col(j).cwiseAbs()) * table(l, j);
  const double lhs = weighted_path_norm(p);
  return std::abs(lhs - rhs) / std::max({1.0, lhs, rhs});
}

// The 14-valued worked net: d=2, D=2, L=1, m=1, V=I, u=(1,1), W=[1 1], U=(1,1)^T.
inline ResNetParams worked_net() {
  ResNetParams p = ResNetParams::zeros({2, 2, 1, 1});
  p.V.setIdentity();
  p.u << 1.0, 1.0;
  p.W[0] << 1.0, 1.0;
  p.U[0] << 1.0, 1.0;
  return p;
}

inline void for_each_entry(ResNetParams& p,
                           const std::function<void(double&)>& fn) {
  for (int i = 0; i < p.V.rows(); ++i)
    for (int j = 0; j < p.V.cols(); ++j) fn(p.V(i, j));
  for (std::size_t l = 0; l < p.W.size(); ++l) {
    for (int i = 0; i < p.W[l].rows(); ++i)
      for (int j = 0; j < p.W[l].cols(); ++j) fn(p.W[l](i, j));
    for (int i = 0; i < p.U[l].rows(); ++i)
      for (int j = 0; j < p.U[l].cols(); ++j) fn(p.U[l](i, j));
  }
  for (int i = 0; i < p.u.size(); ++i) fn(p.u(i));
}

struct SlopeFit {
  double slope = 0.0;
};

inline SlopeFit fit_loglog_slope(const std::vector<double>& n,
                                 const std::vector<double>& y) {
  const int k = static_cast<int>(n.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (int i = 0; i < k; ++i) {
    const double lx = std::log(n[i]), ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  SlopeFit f;
  f.slope = (k * sxy - sx * sy) / (k * sxx - sx * sx);
  return f;
}

} // namespace verify_detail

// ---------------------------------------------------------------------------
// norms battery
// ---------------------------------------------------------------------------

inline CheckList verify_norms(std::uint64_t seed = 0x6e6f726dULL) {
  using namespace verify_detail;
  CheckList out;
  Rng rng(seed);

  {
    ResNetParams p = ResNetParams::zeros({2, 2, 1, 1});
    p.V.setIdentity();
    p.u << 1.0, 1.0;
    const bool ok = weighted_path_norm(p) == 2.0 && l1_path_norm(p) == 2.0;
    out.push_back({"norms/skip-only value 2", ok, fmt(weighted_path_norm(p))});
  }
  {
    const ResNetParams p = worked_net();
    const double wpn = weighted_path_norm(p);
    const double l1 = l1_path_norm(p);
    const double en = path_norm_by_enumeration(p);
    const double g11 = neuron_path_norms(p)(0, 0);
    const bool ok = close_abs(wpn, 14.0, 1e-12) && close_abs(l1, 6.0, 1e-12) &&
                    close_abs(en, 14.0, 1e-12) && close_abs(g11, 6.0, 1e-12);
    out.push_back({"norms/worked net 14-6-6", ok,
                   fmt(wpn) + "," + fmt(l1) + "," + fmt(en) + "," + fmt(g11)});
  }
  {
    ResNetParams p = worked_net();
    p.u.setZero();
    out.push_back({"norms/zero output row gives 0",
                   path_norm_by_enumeration(p) == 0.0 && weighted_path_norm(p) == 0.0,
                   ""});
  }
  {
    double worst_en = 0.0, worst_f = 0.0, worst_g = 0.0;
    for (int t = 0; t < 60; ++t) {
      const ResNetParams p = random_resnet(random_enumerable_arch(rng), rng);
      const double a = weighted_path_norm(p);
      const double b = path_norm_by_enumeration(p);
      worst_en = std::max(worst_en, std::abs(a - b) / std::max({1.0, a, b}));
      worst_f = std::max(worst_f, f_decomposition_error(p));
      worst_g = std::max(worst_g, neuron_norm_recursion_error(p));
    }
    out.push_back({"norms/enumeration equivalence", worst_en <= 1e-9, fmt(worst_en)});
    out.push_back({"norms/output decomposition identity", worst_f <= 1e-10, fmt(worst_f)});
    out.push_back({"norms/neuron recursion identity", worst_g <= 1e-10, fmt(worst_g)});
  }
  {
    ResNetParams p = random_resnet({3, 4, 2, 2}, rng);
    const double base_w = weighted_path_norm(p), base_l = l1_path_norm(p);
    const double c = 2.75;
    p.u *= c;
    const bool ok = close_rel(weighted_path_norm(p), c * base_w, 1e-12) &&
                    close_rel(l1_path_norm(p), c * base_l, 1e-12) &&
                    base_l <= base_w;
    out.push_back({"norms/output homogeneity and ordering", ok, ""});
  }
  {
    // appending zero blocks changes nothing
    ResNetParams p = random_resnet({3, 4, 2, 2}, rng);
    ResNetParams q = ResNetParams::zeros({3, 4, 2, 4});
    q.V = p.V;
    q.u = p.u;
    q.W[0] = p.W[0];
    q.W[1] = p.W[1];
    q.U[0] = p.U[0];
    q.U[1] = p.U[1];
    bool ok = close_rel(weighted_path_norm(p), weighted_path_norm(q), 1e-14);
    const MatrixXd np = neuron_path_norms(p), nq = neuron_path_norms(q);
    for (int l = 0; l < 2 && ok; ++l)
      for (int i = 0; i < 2; ++i) ok = ok && close_rel(np(l, i), nq(l, i), 1e-14);
    for (int t = 0; t < 5 && ok; ++t) {
      const VectorXd x = random_point(3, rng);
      ok = ok && close_abs(resnet_forward(p, x), resnet_forward(q, x), 1e-13);
    }
    out.push_back({"norms/zero-block append invariance", ok, ""});
  }
  {
    // scaling one defining row scales that neuron's norm and output linearly
    ResNetParams p = random_resnet({3, 4, 2, 2}, rng);
    ResNetParams q = p;
    const double c = 1.7;
    q.W[1].row(0) *= c;
    const double a = neuron_path_norms(p)(1, 0), b = neuron_path_norms(q)(1, 0);
    bool ok = close_rel(b, c * a, 1e-12);
    const VectorXd x = random_point(3, rng);
    ForwardTrace ta, tb;
    resnet_forward(p, x, &ta);
    resnet_forward(q, x, &tb);
    ok = ok && close_abs(tb.g[1](0), c * ta.g[1](0), 1e-12);
    out.push_back({"norms/neuron row scaling", ok, ""});
  }
  {
    // increasing a magnitude never decreases the norm
    bool ok = true;
    for (int t = 0; t < 20 && ok; ++t) {
      ResNetParams p = random_resnet({2, 3, 2, 2}, rng);
      const double before = weighted_path_norm(p);
      ResNetParams q = p;
      double* cell = nullptr;
      int target = static_cast<int>(rng.uniform_index(4));
      if (target == 0) cell = &q.V(rng.uniform_index(3), rng.uniform_index(2));
      else if (target == 1) cell = &q.W[rng.uniform_index(2)](rng.uniform_index(2), rng.uniform_index(3));
      else if (target == 2) cell = &q.U[rng.uniform_index(2)](rng.uniform_index(3), rng.uniform_index(2));
      else cell = &q.u(rng.uniform_index(3));
      *cell = (*cell >= 0.0 ? *cell + 0.5 : *cell - 0.5);
      ok = weighted_path_norm(q) >= before - 1e-12;
    }
    out.push_back({"norms/entry monotonicity", ok, ""});
  }
  {
    FcParams p;
    p.d = 1;
    p.m = 1;
    p.L = 2;
    p.W = {MatrixXd::Constant(1, 1, 3.0), MatrixXd::Constant(1, 1, 1.0)};
    // single layer of interest: spectral complexity of W=diag(3) chain
    FcParams single;
    single.d = 1;
    single.m = 1;
    single.L = 2;
    single.W = {MatrixXd::Constant(1, 1, 3.0), MatrixXd::Constant(1, 1, 1.0)};
    const double sc = spectral_complexity(single);
    // ||3||_sigma = 3, ||1||_sigma = 1; result 3 * (1 + 1)^{3/2} = 3 * 2.828...
    const double expect = 3.0 * std::pow(2.0, 1.5);
    out.push_back({"norms/spectral 1x1 chain", close_rel(sc, expect, 1e-9), fmt(sc)});
  }
  {
    FcParams chain;
    chain.d = 1;
    chain.m = 1;
    chain.L = 2;
    chain.W = {MatrixXd::Constant(1, 1, 2.0), MatrixXd::Constant(1, 1, 3.0)};
    const double vn = variational_norm(chain);
    out.push_back({"norms/variational chain (2,3) = 6", close_rel(vn, 6.0, 1e-12), fmt(vn)});
  }
  {
    // per-layer mass identity on random fc nets
    bool ok = true;
    double worst = 0.0;
    for (int t = 0; t < 20; ++t) {
      FcParams p;
      p.d = 2 + int(rng.uniform_index(3));
      p.m = 2 + int(rng.uniform_index(4));
      p.L = 2 + int(rng.uniform_index(3));
      p.W.resize(p.L);
      p.W[0] = MatrixXd::Zero(p.m, p.d);
      for (int l = 1; l + 1 < p.L; ++l) p.W[l] = MatrixXd::Zero(p.m, p.m);
      p.W[p.L - 1] = MatrixXd::Zero(1, p.m);
      for (auto& M : p.W)
        for (int i = 0; i < M.rows(); ++i)
          for (int j = 0; j < M.cols(); ++j) M(i, j) = rng.uniform(-1.0, 1.0);
      const VariationalBreakdown b = variational_breakdown(p);
      for (int l = 0; l < p.L; ++l) {
        double mass = 0.0;
        for (int j = 0; j < b.v_in[l].size(); ++j)
          mass += b.v_in[l](j) * b.v_out[l](j);
        worst = std::max(worst, std::abs(mass - b.V) / std::max(1.0, b.V));
      }
    }
    ok = worst <= 1e-10;
    out.push_back({"norms/per-layer mass identity", ok, fmt(worst)});
  }
  {
    const NormReport rr = norm_report(worked_net());
    FcParams chain;
    chain.d = 1;
    chain.m = 1;
    chain.L = 2;
    chain.W = {MatrixXd::Constant(1, 1, 2.0), MatrixXd::Constant(1, 1, 3.0)};
    const NormReport rf = norm_report(chain);
    const bool ok = !rr.spectral && !rr.variational && rf.spectral && rf.variational;
    out.push_back({"norms/report fc-only fields", ok, ""});
  }
  return out;
}

// ---------------------------------------------------------------------------
// construct battery
// ---------------------------------------------------------------------------

inline CheckList verify_construct(std::uint64_t seed = 0x636f6e73ULL) {
  using namespace verify_detail;
  CheckList out;
  Rng rng(seed);

  {
    TwoLayerRep rep;
    rep.a.resize(2);
    rep.a << 0.5, -0.5;
    rep.b.resize(2, 2);
    rep.b << 1, 0, 0, 1;
    const TwoLayerRep nrm = normalize_two_layer(rep);
    bool ok = close_abs(nrm.a(0), 1.0, 1e-15) && close_abs(nrm.a(1), -1.0, 1e-15) &&
              close_abs(nrm.b(0, 0), 0.5, 1e-15) && close_abs(nrm.b(1, 1), 0.5, 1e-15);
    for (int t = 0; t < 50 && ok; ++t) {
      const VectorXd x = random_point(2, rng);
      ok = close_abs(two_layer_eval(rep, x), two_layer_eval(nrm, x), 1e-14);
    }
    out.push_back({"construct/normalize worked example", ok, ""});
  }
  {
    TwoLayerRep rep;
    rep.a.resize(1);
    rep.a << 2.0;
    rep.b.resize(1, 2);
    rep.b << 0.0, 3.0;
    const TwoLayerRep nrm = normalize_two_layer(rep);
    bool ok = close_abs(nrm.a(0), 6.0, 1e-15);
    for (int t = 0; t < 100 && ok; ++t) {
      const VectorXd x = random_point(2, rng);
      ok = close_abs(two_layer_eval(rep, x), two_layer_eval(nrm, x), 1e-14);
    }
    out.push_back({"construct/normalize single neuron", ok, ""});
  }
  {
    TwoLayerRep rep = random_rep(4, 3, rng);
    const TwoLayerRep once = normalize_two_layer(rep);
    const TwoLayerRep twice = normalize_two_layer(once);
    bool ok = once.M() == twice.M();
    for (int j = 0; j < once.M() && ok; ++j) {
      ok = close_abs(once.a(j), twice.a(j), 1e-15) &&
           (once.b.row(j) - twice.b.row(j)).cwiseAbs().maxCoeff() <= 1e-15;
    }
    out.push_back({"construct/normalize idempotent", ok, ""});
  }
  {
    TwoLayerRep rep;
    rep.a.resize(2);
    rep.a << 0.5, -0.5;
    rep.b.resize(2, 2);
    rep.b << 1, 0, 0, 1;
    const ResNetParams p = build_resnet(rep, 2, 1);
    bool ok = p.arch.D == 3 && close_rel(weighted_path_norm(p), 3.0, 1e-12);
    for (int t = 0; t < 100 && ok; ++t) {
      const VectorXd x = random_point(2, rng);
      ok = close_abs(resnet_forward(p, x), two_layer_eval(rep, x), 1e-13);
    }
    out.push_back({"construct/resnet worked example", ok, ""});
  }
  {
    // exactness and norm formula on random reps, both lifts, mixed layouts
    bool ok = true;
    double worst = 0.0, worst_norm = 0.0;
    for (int t = 0; t < 24 && ok; ++t) {
      const int d = 2 + int(rng.uniform_index(4));
      const int M = 1 + int(rng.uniform_index(10));
      const TwoLayerRep rep = random_rep(M, d, rng);
      const int L = 1 + int(rng.uniform_index(4));
      const int m = (M + L - 1) / L + int(rng.uniform_index(3));
      const ResNetParams p = build_resnet(rep, L, m);
      double mass = 0.0;
      for (int j = 0; j < M; ++j)
        mass += std::abs(rep.a(j)) * rep.b.row(j).lpNorm<1>();
      worst_norm = std::max(worst_norm,
                            std::abs(weighted_path_norm(p) - 3.0 * mass) /
                                std::max(1.0, 3.0 * mass));
      const int Lf = 2 + int(rng.uniform_index(3));
      // both layouts: tight m (late slots used) and roomy m
      const int mf = rng.uniform() < 0.5 && Lf >= 3 && M > d
                         ? std::max(d + 1, M)
                         : d + M + int(rng.uniform_index(2));
      const FcParams q = build_fc(rep, Lf, mf);
      // the fc layout carries the input through relus, so exactness is a
      // statement about the nonnegative domain
      for (int s = 0; s < 40; ++s) {
        const VectorXd x = random_point(d, rng, 0.0, 1.0);
        const double f = two_layer_eval(rep, x);
        worst = std::max({worst, std::abs(resnet_forward(p, x) - f),
                          std::abs(fc_forward(q, x) - f)});
      }
    }
    out.push_back({"construct/random lift exactness", worst <= 1e-12, fmt(worst)});
    out.push_back({"construct/resnet norm formula", worst_norm <= 1e-12, fmt(worst_norm)});
  }
  {
    // padding neutrality
    const TwoLayerRep rep = random_rep(1, 3, rng);
    const ResNetParams small = build_resnet(rep, 1, 1);
    const ResNetParams big = build_resnet(rep, 3, 2);
    bool ok = close_rel(weighted_path_norm(small), weighted_path_norm(big), 1e-14) &&
              close_rel(l1_path_norm(small), l1_path_norm(big), 1e-14);
    for (int t = 0; t < 20 && ok; ++t) {
      const VectorXd x = random_point(3, rng);
      ok = close_abs(resnet_forward(small, x), resnet_forward(big, x), 1e-13);
    }
    out.push_back({"construct/padding neutrality", ok, ""});
  }
  {
    bool threw_lm = false, threw_md = false;
    TwoLayerRep rep = random_rep(5, 2, rng);
    try {
      build_resnet(rep, 2, 2);
    } catch (const CapacityError&) {
      threw_lm = true;
    }
    try {
      build_fc(rep, 3, 2);
    } catch (const CapacityError&) {
      threw_md = true;
    }
    out.push_back({"construct/capacity errors", threw_lm && threw_md, ""});
  }
  {
    const BarronMixture target = random_mixture(10, 3, 1.0, Rng::derive_seed(seed, 5), false);
    const TwoLayerRep r1 = subsample_two_layer(target, 7, 42);
    const TwoLayerRep r2 = subsample_two_layer(target, 7, 42);
    bool ok = (r1.a - r2.a).cwiseAbs().maxCoeff() == 0.0 &&
              (r1.b - r2.b).cwiseAbs().maxCoeff() == 0.0;
    out.push_back({"construct/subsample determinism", ok, ""});
  }
  {
    // unbiasedness at a fixed point
    const BarronMixture target = random_mixture(10, 3, 1.0, Rng::derive_seed(seed, 6), false);
    const VectorXd x = random_point(3, rng, 0.0, 1.0);
    const double truth = mixture_eval(target, x);
    const int reps = 400;
    double sum = 0.0, sumsq = 0.0;
    for (int k = 0; k < reps; ++k) {
      const double v = two_layer_eval(subsample_two_layer(target, 6, 1000 + k), x);
      sum += v;
      sumsq += v * v;
    }
    const double mean = sum / reps;
    const double se = std::sqrt(std::max(sumsq / reps - mean * mean, 0.0) / reps);
    const bool ok = std::abs(mean - truth) <= 5.0 * se + 1e-9;
    out.push_back({"construct/subsample unbiased", ok,
                   fmt(mean) + " vs " + fmt(truth) + " (se " + fmt(se) + ")"});
  }
  {
    const BarronMixture target = random_mixture(4, 3, 1.0, Rng::derive_seed(seed, 7), false);
    const TwoLayerRep rep = subsample_two_layer(target, 10, 3, true);
    bool ok = rep.M() == 4;
    for (int t = 0; t < 20 && ok; ++t) {
      const VectorXd x = random_point(3, rng, 0.0, 1.0);
      ok = two_layer_eval(rep, x) == mixture_eval(target, x);
    }
    out.push_back({"construct/exact passthrough when it fits", ok, ""});
  }
  return out;
}

// ---------------------------------------------------------------------------
// complexity battery
// ---------------------------------------------------------------------------

inline CheckList verify_complexity(std::uint64_t seed = 0x7261646dULL) {
  using namespace verify_detail;
  CheckList out;
  Rng rng(seed);

  {
    MatrixXd pts(1, 2);
    pts << 1.0, 0.0;
    out.push_back({"complexity/single point value 1",
                   close_abs(rademacher_linear_exact(pts), 1.0, 1e-15), ""});
  }
  {
    MatrixXd pts(2, 2);
    pts << 1, 0, 0, 1;
    out.push_back({"complexity/two basis points value 0.5",
                   close_abs(rademacher_linear_exact(pts), 0.5, 1e-15), ""});
  }
  {
    bool ok = true;
    for (int t = 0; t < 120 && ok; ++t) {
      const int n = 1 + int(rng.uniform_index(12));
      const int d = 1 + int(rng.uniform_index(6));
      MatrixXd pts(n, d);
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < d; ++j) pts(i, j) = rng.uniform(-1.0, 1.0);
      const double exact = rademacher_linear_exact(pts);
      const double bound = rademacher_bounds(RademacherKind::Linear, 1.0, d, n,
                                             pts.cwiseAbs().maxCoeff());
      ok = exact <= bound + 1e-12;
    }
    out.push_back({"complexity/exact respects linear bound", ok, ""});
  }
  {
    const double v = rademacher_bounds(RademacherKind::Resnet, 1.0, 2, 100);
    out.push_back({"complexity/resnet bound value", close_abs(v, 0.499533, 1e-5), fmt(v)});
    const double w = rademacher_bounds(RademacherKind::Linear, 1.0, 2, 2, 1.0);
    out.push_back({"complexity/linear bound value", close_abs(w, 1.177410, 1e-5), fmt(w)});
  }
  {
    const double g = gap_bound(0.5, 1.0, 100, 0.1);
    out.push_back({"complexity/gap bound value", close_abs(g, 1.543241, 1e-5), fmt(g)});
    out.push_back({"complexity/gap bound zero case",
                   gap_bound(0.0, 0.0, 10, 0.5) == 0.0, ""});
    const double g1 = gap_bound(0.0, 1.0, 100, 0.1);
    const double g2 = gap_bound(0.0, 1.0, 200, 0.1);
    out.push_back({"complexity/gap bound sqrt2 shrink",
                   close_rel(g1, g2 * std::sqrt(2.0), 1e-12), ""});
  }
  {
    MatrixXd pts(4, 3);
    for (int i = 0; i < 4; ++i) {
      pts(i, 0) = 1.0;
      for (int j = 1; j < 3; ++j) pts(i, j) = rng.uniform();
    }
    const auto [est, se] =
        rademacher_lower_estimate(pts, 0.0, {3, 4, 2, 2}, 7);
    out.push_back({"complexity/Q=0 estimate 0", est == 0.0 && se == 0.0, ""});
  }
  {
    // linear-subclass ascent vs the enumeration oracle
    const int n = 6, d = 3;
    const double Q = 2.0;
    MatrixXd pts(n, d);
    for (int i = 0; i < n; ++i) {
      pts(i, 0) = 1.0;
      for (int j = 1; j < d; ++j) pts(i, j) = rng.uniform();
    }
    RademacherEstimateOptions opt;
    opt.n_xi = 32;
    opt.restarts = 4;
    opt.steps = 150;
    opt.linear_subclass = true;
    const auto [est, se] = rademacher_lower_estimate(pts, Q, {d, d + 1, 2, 2}, 11, opt);
    const double exact = Q * rademacher_linear_exact(pts);
    const bool ok = std::abs(est - exact) <= 3.0 * se + 0.05 * exact;
    out.push_back({"complexity/linear subclass matches oracle", ok,
                   fmt(est) + " vs " + fmt(exact) + " (se " + fmt(se) + ")"});
  }
  {
    // contraction at finite-class level: 1-Lipschitz coordinate maps never
    // increase the enumerated complexity of a random dictionary
    bool ok = true;
    for (int t = 0; t < 10 && ok; ++t) {
      const int n = 4 + int(rng.uniform_index(5)); // <= 8
      const int k = 3 + int(rng.uniform_index(4));
      MatrixXd vals(k, n);
      for (int f = 0; f < k; ++f)
        for (int i = 0; i < n; ++i) vals(f, i) = rng.uniform(-2.0, 2.0);
      std::vector<int> kind(n);
      for (int i = 0; i < n; ++i) kind[i] = int(rng.uniform_index(3));
      const auto phi = [&](int i, double v) {
        switch (kind[i]) {
          case 0: return std::tanh(v);
          case 1: return relu(v);
          default: return 0.5 * v;
        }
      };
      const auto enumerated = [&](bool mapped) {
        double sum = 0.0;
        const std::uint64_t total = 1ULL << n;
        for (std::uint64_t mask = 0; mask < total; ++mask) {
          double best = -1e300;
          for (int f = 0; f < k; ++f) {
            double s = 0.0;
            for (int i = 0; i < n; ++i) {
              const double v = mapped ? phi(i, vals(f, i)) : vals(f, i);
              s += ((mask >> i) & 1u ? 1.0 : -1.0) * v;
            }
            best = std::max(best, s);
          }
          sum += best;
        }
        return sum / (double(n) * double(total));
      };
      ok = enumerated(true) <= enumerated(false) + 1e-12;
    }
    out.push_back({"complexity/finite-class contraction", ok, ""});
  }
  return out;
}

// ---------------------------------------------------------------------------
// bounds battery
// ---------------------------------------------------------------------------

inline CheckList verify_bounds(std::uint64_t seed = 0x626e6473ULL) {
  using namespace verify_detail;
  CheckList out;
  (void)seed;

  {
    const Thresholds t2 = thresholds(2);
    const Thresholds t5 = thresholds(5);
    const Thresholds tb = thresholds(2, 2.072983, 0.0, 0.5, 100);
    const bool ok = close_abs(t2.lambda_min, 4.400374, 1e-5) &&
                    close_abs(t5.lambda_min, 4.310660, 1e-5) && tb.B_min &&
                    close_abs(*tb.B_min, 2.072983, 1e-5);
    out.push_back({"bounds/threshold values", ok,
                   fmt(t2.lambda_min) + "," + fmt(t5.lambda_min) + "," +
                       fmt(tb.B_min.value_or(0.0))});
  }
  {
    const double v = apriori_rhs(1.0, 2, 2, 2, 100, 4.400374, 0.1);
    out.push_back({"bounds/apriori worked value", close_abs(v, 62.40915, 5e-4), fmt(v)});
    const double t1 = 16.0 / 4.0;
    const double tail_n = apriori_rhs(1.0, 2, 2, 2, 100, 4.400374, 0.1) - t1;
    const double tail_4n = apriori_rhs(1.0, 2, 2, 2, 400, 4.400374, 0.1) - t1;
    out.push_back({"bounds/apriori n-to-4n halving",
                   close_rel(tail_n, 2.0 * tail_4n, 1e-12), ""});
  }
  {
    const double v = apost_rhs(0.0, 2, 100, 0.1);
    out.push_back({"bounds/apost worked value", close_abs(v, 2.781123, 1e-5), fmt(v)});
    const double diff = apost_rhs(14.0, 2, 100, 0.1) - apost_rhs(0.0, 2, 100, 0.1);
    const double expect = 2.0 * 14.0 * (6.0 * std::sqrt(2.0 * std::log(4.0)) + 1.0) / 10.0;
    out.push_back({"bounds/apost linear in norm", close_rel(diff, expect, 1e-12), ""});
  }
  {
    const double plain = apriori_rhs(1.0, 2, 2, 2, 100, 4.400374, 0.1);
    const double noisy = apriori_noisy_rhs(1.0, 2, 2, 2, 100, 4.400374, 1.0, 0.1, 2.0, 0.0);
    out.push_back({"bounds/noisy sigma0 excess 2c/sqrt(n)",
                   close_rel(noisy - plain, 2.0 * 2.0 / 10.0, 1e-10), fmt(noisy - plain)});
    // B-quadratic terms scale by 4 when B doubles
    const auto bterms = [&](double B) {
      return apriori_noisy_rhs(1.0, 2, 2, 2, 100, 4.400374, B, 0.1, 2.0, 0.5) -
             16.0 / 4.0 - 2.0 * 2.0 * (4.0 * 0.25 + 1.0) / 10.0 -
             (12.0 + 1.0) * 3.0 * (4.0 + 4.400374) * B * std::sqrt(2.0 * std::log(4.0)) / 10.0;
    };
    out.push_back({"bounds/noisy B-squared scaling",
                   close_rel(bterms(2.0), 4.0 * bterms(1.0), 1e-10), ""});
  }
  {
    const double g = noise_gap_rhs(2.0, 0.5, 100);
    out.push_back({"bounds/noise gap value 0.4", close_abs(g, 0.4, 1e-12), fmt(g)});
    out.push_back({"bounds/noise gap sigma0",
                   close_rel(noise_gap_rhs(2.0, 0.0, 25), 2.0 / 5.0, 1e-14), ""});
  }
  {
    const double a = psi_l1_path(4, 8);
    const double b = psi_spectral(100, 8);
    const double c = psi_variational(4, 8, 5, 100);
    const bool ok = close_abs(a, 37.67712, 1e-4) && close_abs(b, 130.132, 1e-2) &&
                    close_abs(c, 54.793, 1e-2);
    out.push_back({"bounds/psi worked values", ok, fmt(a) + "," + fmt(b) + "," + fmt(c)});
  }
  {
    // generic framework with the weighted-path psi reproduces apost_rhs
    bool ok = true;
    for (double P : {0.0, 1.5, 14.0})
      for (int n : {50, 100, 1000})
        ok = ok && close_rel(apost_generic_rhs(P, psi_weighted_path(3), n, 0.1),
                             apost_rhs(P, 3, n, 0.1), 1e-13);
    out.push_back({"bounds/generic framework consistency", ok, ""});
  }
  {
    bool ok = true;
    double prev = apriori_rhs(1.0, 2, 4, 3, 50, 5.0, 0.1);
    for (int n : {100, 200, 400, 800}) {
      const double cur = apriori_rhs(1.0, 2, 4, 3, n, 5.0, 0.1);
      ok = ok && cur < prev;
      prev = cur;
    }
    ok = ok && apriori_rhs(1.0, 4, 8, 3, 100, 5.0, 0.1) <
                   apriori_rhs(1.0, 2, 4, 3, 100, 5.0, 0.1);
    double prev2 = apost_rhs(2.0, 3, 50, 0.1);
    for (int n : {100, 200, 400}) {
      const double cur = apost_rhs(2.0, 3, n, 0.1);
      ok = ok && cur < prev2;
      prev2 = cur;
    }
    out.push_back({"bounds/monotone in n and Lm", ok, ""});
  }
  {
    const BoundReport certified =
        make_bound_report(1.0, 2, 4, 2, 100, 4.5, 0.1, 3.0);
    const BoundReport uncert = make_bound_report(1.0, 2, 4, 2, 100, 1.0, 0.1, 3.0);
    const BoundReport noisy = make_bound_report(1.0, 2, 4, 2, 100, 6.0, 0.1, 3.0,
                                                2.08, 2.0, 0.5, 0.0);
    const bool ok = certified.lambda_certified && !uncert.lambda_certified &&
                    noisy.B_certified && noisy.apriori_noisy && noisy.noise_gap &&
                    close_abs(*noisy.noise_gap, 0.4, 1e-12);
    out.push_back({"bounds/report certification flags", ok, ""});
  }
  {
    const FrameworkReport rep = framework_compare(4, 8, 5, 100, 1.0);
    bool ok = rep.rows.size() == 4 && close_rel(rep.approx_term, 0.5, 1e-14);
    for (const auto& row : rep.rows)
      ok = ok && row.psi > 0.0 && row.cert > 0.0 && row.estimation_term > 0.0 &&
           close_rel(row.lambda_min, 4.0 + 2.0 / row.psi, 1e-14);
    out.push_back({"bounds/framework report shape", ok, ""});
  }
  return out;
}

// ---------------------------------------------------------------------------
// acceptance criteria
// ---------------------------------------------------------------------------

namespace acceptance {

using namespace verify_detail;

inline CheckResult criterion_norm_identities() {
  Rng rng(0xA11CE01ULL);
  double worst_en = 0.0, worst_f = 0.0, worst_g = 0.0;
  for (int t = 0; t < 200; ++t) {
    const ResNetParams p = random_resnet(random_enumerable_arch(rng), rng);
    const double a = weighted_path_norm(p);
    const double b = path_norm_by_enumeration(p);
    worst_en = std::max(worst_en, std::abs(a - b) / std::max({1.0, a, b}));
    worst_f = std::max(worst_f, f_decomposition_error(p));
    worst_g = std::max(worst_g, neuron_norm_recursion_error(p));
  }
  const bool pass = worst_en <= 1e-9 && worst_f <= 1e-10 && worst_g <= 1e-10;
  return {"1 norm identity suite (200 random nets)", pass,
          "worst rel err: enumeration " + fmt(worst_en) + ", output decomp " +
              fmt(worst_f) + ", neuron recursion " + fmt(worst_g)};
}

inline CheckResult criterion_construction_exactness() {
  Rng rng(0xA11CE02ULL);
  double worst_pt = 0.0, worst_norm = 0.0;
  bool cert_ok = true;
  for (int t = 0; t < 20; ++t) {
    const int d = 2 + int(rng.uniform_index(4));
    const int M = 1 + int(rng.uniform_index(12));
    const TwoLayerRep rep = random_rep(M, d, rng);
    const int L = 1 + int(rng.uniform_index(4));
    const int m = (M + L - 1) / L + int(rng.uniform_index(3));
    const ResNetParams p = build_resnet(rep, L, m);
    const int Lf = 2 + int(rng.uniform_index(3));
    const int mf = d + M + int(rng.uniform_index(2));
    const FcParams q = build_fc(rep, Lf, mf);
    double mass = 0.0;
    for (int j = 0; j < M; ++j)
      mass += std::abs(rep.a(j)) * rep.b.row(j).lpNorm<1>();
    worst_norm = std::max(worst_norm,
                          std::abs(weighted_path_norm(p) - 3.0 * mass) /
                              std::max(1.0, 3.0 * mass));
    for (int s = 0; s < 50; ++s) {
      const VectorXd x = random_point(d, rng, 0.0, 1.0);
      const double f = two_layer_eval(rep, x);
      worst_pt = std::max({worst_pt, std::abs(resnet_forward(p, x) - f),
                           std::abs(fc_forward(q, x) - f)});
    }
  }
  for (int t = 0; t < 5; ++t) {
    const BarronMixture target =
        random_mixture(5, 3, 1.0, Rng::derive_seed(0xA11CE02ULL, t), false);
    TwoLayerRep rep;
    rep.a = target.a;
    rep.b = target.omega;
    const ResNetParams p = build_resnet(normalize_two_layer(rep), 2, 3);
    cert_ok = cert_ok && weighted_path_norm(p) <=
                             12.0 * barron_norm_upper(target) * (1.0 + 1e-12);
  }
  const bool pass = worst_pt <= 1e-12 && worst_norm <= 1e-12 && cert_ok;
  return {"2 construction exactness (1000 points per lift)", pass,
          "worst abs err " + fmt(worst_pt) + ", norm formula rel err " +
              fmt(worst_norm) + ", path-norm certificate " +
              (cert_ok ? "held" : "violated")};
}

inline CheckResult criterion_approximation_rate() {
  const std::uint64_t seed = 0xA11CE03ULL;
  const BarronMixture target = random_mixture(50, 4, 0.5, seed, false);
  const double b = barron_norm_upper(target);
  bool pass = true;
  std::ostringstream detail;
  detail.precision(4);
  for (int M : {5, 10, 25, 50}) {
    const int n_seeds = 100;
    double sum = 0.0, sumsq = 0.0;
    double max_err = 0.0;
    for (int k = 0; k < n_seeds; ++k) {
      const TwoLayerRep rep =
          subsample_two_layer(target, M, Rng::derive_seed(seed, 100 + k), true);
      Rng probe(Rng::derive_seed(seed, 10000 + k));
      double err = 0.0;
      const int n_probe = 200;
      for (int i = 0; i < n_probe; ++i) {
        const VectorXd x = sample_point(target.d, probe);
        const double diff = two_layer_eval(rep, x) - mixture_eval(target, x);
        err += diff * diff;
      }
      err /= n_probe;
      sum += err;
      sumsq += err * err;
      max_err = std::max(max_err, err);
    }
    const double mean = sum / n_seeds;
    const double se =
        std::sqrt(std::max(sumsq / n_seeds - mean * mean, 0.0) / n_seeds);
    const double rhs = 16.0 * b * b / M + 3.0 * se;
    const bool ok = mean <= rhs && (M < 50 || max_err == 0.0);
    pass = pass && ok;
    detail << "M=" << M << ": " << mean << " <= " << rhs << (ok ? " ok" : " FAIL")
           << "; ";
  }
  return {"3 approximation rate (K=50 mixture, 100 seeds per M)", pass,
          detail.str()};
}

inline CheckResult criterion_rademacher() {
  Rng rng(0xA11CE04ULL);
  bool exact_ok = true;
  for (int t = 0; t < 500 && exact_ok; ++t) {
    const int n = 1 + int(rng.uniform_index(12));
    const int d = 1 + int(rng.uniform_index(6));
    MatrixXd pts(n, d);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < d; ++j) pts(i, j) = rng.uniform(-1.0, 1.0);
    exact_ok = rademacher_linear_exact(pts) <=
               rademacher_bounds(RademacherKind::Linear, 1.0, d, n,
                                 pts.cwiseAbs().maxCoeff()) +
                   1e-12;
  }

  RademacherEstimateOptions opt;
  opt.n_xi = 16;
  opt.restarts = 3;
  opt.steps = 120;
  bool grid_ok = true;
  int grid_count = 0;
  for (double Q : {1.0, 2.0}) {
    for (auto [d, n] : {std::pair{2, 4}, std::pair{3, 8}}) {
      for (auto [L, m] : {std::pair{2, 2}, std::pair{4, 3}, std::pair{8, 2}}) {
        MatrixXd pts(n, d);
        for (int i = 0; i < n; ++i) {
          pts(i, 0) = 1.0;
          for (int j = 1; j < d; ++j) pts(i, j) = rng.uniform();
        }
        const auto [est, se] = rademacher_lower_estimate(
            pts, Q, {d, d + 1, m, L}, Rng::derive_seed(0xA11CE04ULL, grid_count), opt);
        const double bound = rademacher_bounds(RademacherKind::Resnet, Q, d, n);
        grid_ok = grid_ok && est <= bound + 3.0 * se;
        ++grid_count;
      }
    }
  }

  MatrixXd pts(6, 3);
  for (int i = 0; i < 6; ++i) {
    pts(i, 0) = 1.0;
    for (int j = 1; j < 3; ++j) pts(i, j) = rng.uniform();
  }
  const auto [e2, s2] =
      rademacher_lower_estimate(pts, 1.5, {3, 4, 2, 2}, 0xDE9701ULL, opt);
  const auto [e8, s8] =
      rademacher_lower_estimate(pts, 1.5, {3, 4, 2, 8}, 0xDE9702ULL, opt);
  const double ratio = e2 > 0.0 ? e8 / e2 : 0.0;
  const bool ratio_ok = ratio >= 0.5 && ratio <= 1.5;

  const bool pass = exact_ok && grid_ok && ratio_ok;
  return {"4 rademacher suite (500 exact sets, 12-point grid)", pass,
          std::string("exact-vs-bound ") + (exact_ok ? "ok" : "FAIL") +
              ", grid " + (grid_ok ? "ok" : "FAIL") + ", depth ratio " +
              fmt(ratio)};
}

inline CheckResult criterion_gradient() {
  Rng rng(0xA11CE05ULL);
  const ResNetArch arch{3, 4, 2, 2};
  const double kink_guard = 1e-4;
  double worst = 0.0;
  int done = 0;
  int attempts = 0;
  while (done < 100 && attempts < 100000) {
    ++attempts;
    ResNetParams p = random_resnet(arch, rng, 0.8);
    bool smooth = true;
    for_each_entry(p, [&](double& v) {
      if (std::abs(v) <= kink_guard) smooth = false;
    });
    if (!smooth) continue;

    Dataset batch;
    const int nb = 3;
    batch.x.resize(nb, arch.d);
    batch.y.resize(nb);
    const bool with_cap = done % 3 == 0;
    const std::optional<double> B = with_cap ? std::optional<double>(0.9) : std::nullopt;
    for (int i = 0; i < nb && smooth; ++i) {
      VectorXd x(arch.d);
      x(0) = 1.0;
      for (int k = 1; k < arch.d; ++k) x(k) = rng.uniform();
      batch.x.row(i) = x.transpose();
      batch.y(i) = rng.uniform(-0.5, 1.5);
      ForwardTrace tr;
      const double f = resnet_forward(p, x, &tr);
      for (const auto& pre : tr.preact)
        if (pre.cwiseAbs().minCoeff() <= kink_guard) smooth = false;
      if (std::abs(f) <= kink_guard || std::abs(f - 1.0) <= kink_guard) smooth = false;
      if (B) {
        const double r = truncate01(f) - batch.y(i);
        if (std::abs(r * r - (*B) * (*B)) <= kink_guard) smooth = false;
      }
    }
    if (!smooth) continue;

    const double lambda = 1.5;
    const ParamGrad g = gradient(p, batch, lambda, B);
    const double h = 1e-6;
    double case_worst = 0.0;
    // walk analytic and numeric gradients in the same entry order
    std::vector<double> analytic;
    {
      ParamGrad gc = g;
      for_each_entry(gc, [&](double& v) { analytic.push_back(v); });
    }
    std::size_t idx = 0;
    ResNetParams pc = p;
    for_each_entry(pc, [&](double& v) {
      const double keep = v;
      v = keep + h;
      const double jp = regularized_objective(pc, batch, lambda, B);
      v = keep - h;
      const double jm = regularized_objective(pc, batch, lambda, B);
      v = keep;
      const double num = (jp - jm) / (2.0 * h);
      const double ana = analytic[idx++];
      case_worst = std::max(case_worst, std::abs(num - ana) /
                                            std::max({1e-3, std::abs(num), std::abs(ana)}));
    });
    worst = std::max(worst, case_worst);
    ++done;
  }
  const bool pass = done == 100 && worst <= 1e-5;
  return {"5 gradient finite-difference check (100 smooth configurations)", pass,
          "worst rel err " + fmt(worst) + " over " + std::to_string(done) +
              " configurations"};
}

inline CheckResult criterion_end_to_end() {
  const std::uint64_t seed = 0xA11CE06ULL;
  const BarronMixture target = random_mixture(20, 5, 1.0, Rng::derive_seed(seed, 0));
  int ok_runs = 0;
  std::ostringstream detail;
  detail.precision(4);
  for (int run = 0; run < 10; ++run) {
    const Dataset data =
        sample_dataset(target, 200, NoiseModel::none(), Rng::derive_seed(seed, 10 + run));
    TrainConfig tc;
    tc.lambda = 4.310660;
    tc.epochs = 40;
    tc.batch_size = 32;
    tc.step_size = 0.05;
    tc.seed = Rng::derive_seed(seed, 100 + run);
    const TrainResult tr = train(tc, data, {5, 6, 8, 4});
    const double train_risk = empirical_risk(data, tr.params);
    const auto [pop, se] = population_risk_mc(target, NoiseModel::none(), tr.params,
                                              20000, Rng::derive_seed(seed, 200 + run));
    const double gap = std::abs(pop - train_risk);
    const double rhs = apost_rhs(weighted_path_norm(tr.params), 5, 200, 0.1);
    if (gap <= rhs) ++ok_runs;
    if (run < 3) detail << "gap " << gap << " vs rhs " << rhs << "; ";
    (void)se;
  }
  const bool pass = ok_runs >= 9;
  return {"6 end-to-end gap vs a posteriori bound (10 runs)", pass,
          std::to_string(ok_runs) + "/10 runs within bound; " + detail.str()};
}

inline CheckResult criterion_gap_scaling() {
  const std::uint64_t seed = 0xA11CE07ULL;
  const BarronMixture target = random_mixture(20, 5, 1.0, Rng::derive_seed(seed, 0));
  const std::vector<int> ns{100, 400, 1600};
  std::vector<double> mean_gaps;
  for (std::size_t gi = 0; gi < ns.size(); ++gi) {
    const int n = ns[gi];
    double acc = 0.0;
    const int n_seeds = 10;
    for (int k = 0; k < n_seeds; ++k) {
      const Dataset data = sample_dataset(target, n, NoiseModel::none(),
                                          Rng::derive_seed(seed, 10 + 100 * gi + k));
      TrainConfig tc;
      tc.lambda = 4.310660;
      tc.epochs = 20;
      tc.batch_size = 32;
      tc.step_size = 0.05;
      tc.seed = Rng::derive_seed(seed, 1000 + 100 * gi + k);
      const TrainResult tr = train(tc, data, {5, 6, 4, 2});
      const double train_risk = empirical_risk(data, tr.params);
      const auto [pop, se] =
          population_risk_mc(target, NoiseModel::none(), tr.params, 20000,
                             Rng::derive_seed(seed, 2000 + 100 * gi + k));
      (void)se;
      acc += std::abs(pop - train_risk);
    }
    mean_gaps.push_back(acc / n_seeds);
  }
  const double slope =
      fit_loglog_slope({double(ns[0]), double(ns[1]), double(ns[2])}, mean_gaps)
          .slope;
  const bool pass = slope >= -0.8 && slope <= -0.2;
  std::ostringstream detail;
  detail.precision(4);
  detail << "mean gaps " << mean_gaps[0] << ", " << mean_gaps[1] << ", "
         << mean_gaps[2] << "; slope " << slope;
  return {"7 gap scaling over n in {100,400,1600}", pass, detail.str()};
}

inline CheckResult criterion_noise_lemma() {
  const std::uint64_t seed = 0xA11CE08ULL;
  const double B = 2.072983, sigma = 0.5;
  const NoiseModel noise = NoiseModel::gaussian(sigma);
  const double rhs_base = noise_gap_rhs(noise.c, sigma, 100);
  bool pass = true;
  std::ostringstream detail;
  detail.precision(4);
  for (int net = 0; net < 3; ++net) {
    const BarronMixture target =
        random_mixture(8, 4, 1.0, Rng::derive_seed(seed, net));
    Rng rng(Rng::derive_seed(seed, 100 + net));
    const ResNetParams p = random_resnet({4, 5, 3, 2}, rng, 0.5);
    Rng mc(Rng::derive_seed(seed, 200 + net));
    const int n_mc = 1000000;
    double sum = 0.0, sumsq = 0.0;
    for (int i = 0; i < n_mc; ++i) {
      const VectorXd x = sample_point(4, mc);
      const double y = mixture_eval(target, x) + noise.draw(mc);
      const double l = truncated_loss(p, x, y);
      const double excess = std::max(l - B * B, 0.0); // |l - min(l, B^2)|
      sum += excess;
      sumsq += excess * excess;
    }
    const double mean = sum / n_mc;
    const double se =
        std::sqrt(std::max(sumsq / n_mc - mean * mean, 0.0) / n_mc);
    const bool ok = mean <= rhs_base + 3.0 * se;
    pass = pass && ok;
    detail << mean << " <= " << rhs_base + 3.0 * se << (ok ? " ok" : " FAIL") << "; ";
  }
  return {"8 noise lemma Monte Carlo (1e6 draws per net)", pass, detail.str()};
}

inline CheckResult criterion_fc_certificates() {
  Rng rng(0xA11CE09ULL);
  bool pass = true;
  std::ostringstream detail;
  detail.precision(4);
  double worst_mass = 0.0;
  for (int t = 0; t < 10; ++t) {
    const int d = 2 + int(rng.uniform_index(3));
    const int M = 1 + int(rng.uniform_index(2));
    const int m = d + M + 1 + int(rng.uniform_index(3));
    const int L = 3 + int(rng.uniform_index(3));
    TwoLayerRep raw = random_rep(M, d, rng);
    // keep the coefficient mass modest so the generic certificates are honest
    double mass = 0.0;
    for (int j = 0; j < M; ++j)
      mass += std::abs(raw.a(j)) * raw.b.row(j).lpNorm<1>();
    const double T_target = rng.uniform(0.5, 1.5);
    raw.a *= T_target / mass;
    const TwoLayerRep rep = normalize_two_layer(raw);
    const double barron = T_target; // = sum |a_j| ||b_j||_1 of the rep
    const FcParams q = build_fc(rep, L, m);

    double prod_sigma = 1.0;
    bool ok21 = true;
    for (int l = 0; l + 1 < L; ++l)
      prod_sigma *= spectral_norm_power(q.W[l]).value;
    for (int l = 0; l < L; ++l)
      ok21 = ok21 && norm_21(q.W[l].transpose()) < std::sqrt(2.0) * m;
    const double sc = spectral_complexity(q);
    const double vn = variational_norm(q);
    const VariationalBreakdown vb = variational_breakdown(q);
    for (int l = 0; l < L; ++l) {
      double lm = 0.0;
      for (int j = 0; j < vb.v_in[l].size(); ++j)
        lm += vb.v_in[l](j) * vb.v_out[l](j);
      worst_mass = std::max(worst_mass, std::abs(lm - vb.V) / std::max(1.0, vb.V));
    }
    const bool ok = prod_sigma < M_E && ok21 &&
                    sc <= cert_spectral(L, m, barron) &&
                    vn <= cert_variational(m, barron) && worst_mass <= 1e-10;
    pass = pass && ok;
    if (!ok)
      detail << "case " << t << ": prod " << prod_sigma << ", sc " << sc
             << " vs " << cert_spectral(L, m, barron) << ", vn " << vn << " vs "
             << cert_variational(m, barron) << "; ";
  }
  if (pass) detail << "all certificates held; worst mass identity err " << worst_mass;
  return {"9 fc construction certificates (10 random reps)", pass, detail.str()};
}

inline CheckResult criterion_table_ratios() {
  bool pass = true;
  std::ostringstream detail;
  for (int L : {2, 3, 5, 9})
    pass = pass && psi_l1_path(L + 1, 8) / psi_l1_path(L, 8) == 2.0;

  const FrameworkReport r1 = framework_compare(3, 8, 5, 100, 1.5);
  const FrameworkReport r2 = framework_compare(6, 16, 5, 100, 1.5);
  pass = pass && r1.rows[0].estimation_term == r2.rows[0].estimation_term;

  const double cert_ratio = cert_spectral(6, 16, 1.5) / cert_spectral(3, 8, 1.5);
  const double size_ratio = std::pow((6.0 * 16.0) / (3.0 * 8.0), 1.5);
  pass = pass && std::abs(cert_ratio - size_ratio) <= 1e-10 * size_ratio;
  const double psi_ratio =
      psi_spectral(100, 8) / (std::log(100.0) * std::sqrt(2.0 * std::log(16.0)));
  pass = pass && std::abs(psi_ratio - 12.0) <= 1e-10;

  for (int L : {3, 4, 7}) {
    const double denom = std::log(400.0) *
                         std::sqrt((L - 2.0) * std::log(8.0) + std::log(8.0 * M_E * 5.0));
    pass = pass && std::abs(psi_variational(L, 8, 5, 400) / denom - L) <= 1e-10;
  }
  pass = pass && std::abs(cert_variational(9, 2.0) / (std::sqrt(9.0) * 2.0) - 4.0) <= 1e-12;

  detail << "depth doubling, (L,m) invariance, spectral and variational exponents";
  return {"10 table ratio tests", pass, detail.str()};
}

inline CheckResult criterion_determinism() {
  const std::string config = R"({
    "seed": 7,
    "delta": 0.1,
    "mc_samples": 2000,
    "target": {"d": 3, "K": 4, "coef_scale": 1.0},
    "train": {"epochs": 5, "batch_size": 16, "step_size": 0.05},
    "n": [40, 80],
    "lambda": [0.0, 4.400374],
    "L": 2,
    "m": 4
  })";
  const ExperimentResult a = run_experiment_from_text(config, 1);
  const ExperimentResult b = run_experiment_from_text(config, 2);
  const bool csv_ok = a.csv == b.csv;

  const BarronMixture target = random_mixture(6, 3, 1.0, 99);
  const TwoLayerRep s1 = subsample_two_layer(target, 5, 17);
  const TwoLayerRep s2 = subsample_two_layer(target, 5, 17);
  const bool sub_ok = (s1.a - s2.a).cwiseAbs().maxCoeff() == 0.0 &&
                      (s1.b - s2.b).cwiseAbs().maxCoeff() == 0.0;

  const Dataset data = sample_dataset(target, 30, NoiseModel::none(), 5);
  TrainConfig tc;
  tc.epochs = 3;
  tc.seed = 21;
  const TrainResult t1 = train(tc, data, {3, 4, 2, 2});
  const TrainResult t2 = train(tc, data, {3, 4, 2, 2});
  const bool train_ok = model_to_json(t1.params) == model_to_json(t2.params);

  const bool pass = csv_ok && sub_ok && train_ok;
  return {"11 determinism (experiment, subsampling, training)", pass,
          std::string("csv ") + (csv_ok ? "identical" : "DIFFERS") + ", subsample " +
              (sub_ok ? "identical" : "DIFFERS") + ", training " +
              (train_ok ? "identical" : "DIFFERS")};
}

inline CheckList run_all() {
  CheckList out;
  out.push_back(criterion_norm_identities());
  out.push_back(criterion_construction_exactness());
  out.push_back(criterion_approximation_rate());
  out.push_back(criterion_rademacher());
  out.push_back(criterion_gradient());
  out.push_back(criterion_end_to_end());
  out.push_back(criterion_gap_scaling());
  out.push_back(criterion_noise_lemma());
  out.push_back(criterion_fc_certificates());
  out.push_back(criterion_table_ratios());
  out.push_back(criterion_determinism());
  return out;
}

} // namespace acceptance

inline CheckList verify_scope(const std::string& scope) {
  CheckList out;
  const auto append = [&](CheckList more) {
    for (auto& c : more) out.push_back(std::move(c));
  };
  if (scope == "norms") append(verify_norms());
  else if (scope == "construct") append(verify_construct());
  else if (scope == "complexity") append(verify_complexity());
  else if (scope == "bounds") append(verify_bounds());
  else if (scope == "all") {
    append(verify_norms());
    append(verify_construct());
    append(verify_complexity());
    append(verify_bounds());
  } else {
    throw ParseError("verify: unknown scope \"" + scope + "\"");
  }
  return out;
}

} // namespace respath

#endif

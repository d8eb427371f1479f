#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "respath/construct.hpp"
#include "respath/norms.hpp"
#include "respath/rng.hpp"
#include "respath/targets.hpp"

using namespace respath;

namespace {

TwoLayerRep axis_rep() {
  TwoLayerRep rep;
  rep.a.resize(2);
  rep.a << 0.5, -0.5;
  rep.b.resize(2, 2);
  rep.b << 1, 0, 0, 1;
  return rep;
}

TwoLayerRep random_rep(int M, int d, Rng& rng, double scale = 1.0) {
  TwoLayerRep rep;
  rep.a.resize(M);
  rep.b.resize(M, d);
  for (int j = 0; j < M; ++j) {
    rep.a(j) = rng.uniform(-scale, scale);
    for (int k = 0; k < d; ++k) rep.b(j, k) = rng.uniform(-1.0, 1.0);
  }
  return rep;
}

VectorXd random_point(int d, Rng& rng) {
  VectorXd x(d);
  x(0) = 1.0;
  for (int k = 1; k < d; ++k) x(k) = rng.uniform(0.0, 1.0);
  return x;
}

double rep_mass(const TwoLayerRep& rep) {
  double t = 0.0;
  for (int j = 0; j < rep.M(); ++j)
    t += std::abs(rep.a(j)) * rep.b.row(j).lpNorm<1>();
  return t;
}

} // namespace

TEST_CASE("normalize: axis pair becomes T=1 with halved directions") {
  const TwoLayerRep out = normalize_two_layer(axis_rep());
  REQUIRE(out.M() == 2);
  CHECK_THAT(out.a(0), Catch::Matchers::WithinAbs(1.0, 1e-15));
  CHECK_THAT(out.a(1), Catch::Matchers::WithinAbs(-1.0, 1e-15));
  CHECK_THAT(out.b(0, 0), Catch::Matchers::WithinAbs(0.5, 1e-15));
  CHECK_THAT(out.b(0, 1), Catch::Matchers::WithinAbs(0.0, 1e-15));
  CHECK_THAT(out.b(1, 0), Catch::Matchers::WithinAbs(0.0, 1e-15));
  CHECK_THAT(out.b(1, 1), Catch::Matchers::WithinAbs(0.5, 1e-15));
}

TEST_CASE("normalize: single neuron a=2, b=(0,3)") {
  TwoLayerRep rep;
  rep.a = VectorXd::Constant(1, 2.0);
  rep.b.resize(1, 2);
  rep.b << 0.0, 3.0;
  const TwoLayerRep out = normalize_two_layer(rep);
  CHECK_THAT(out.a(0), Catch::Matchers::WithinAbs(6.0, 1e-15));
  CHECK_THAT(out.b(0, 1), Catch::Matchers::WithinAbs(1.0, 1e-15));
  Rng rng(7);
  for (int t = 0; t < 100; ++t) {
    const VectorXd x = random_point(2, rng);
    CHECK_THAT(two_layer_eval(out, x),
               Catch::Matchers::WithinAbs(two_layer_eval(rep, x), 1e-12));
  }
}

TEST_CASE("normalize: pointwise-preserving, idempotent, drops zero neurons") {
  Rng rng(11);
  for (int t = 0; t < 10; ++t) {
    TwoLayerRep rep = random_rep(4, 3, rng);
    rep.a(2) = 0.0;            // dead coefficient
    rep.b.row(3).setZero();    // dead direction
    const TwoLayerRep out = normalize_two_layer(rep);
    REQUIRE(out.M() == 2);
    const double T = rep_mass(rep);
    for (int j = 0; j < out.M(); ++j) {
      CHECK_THAT(std::abs(out.a(j)), Catch::Matchers::WithinRel(T, 1e-12));
    }
    double bsum = 0.0;
    for (int j = 0; j < out.M(); ++j) bsum += out.b.row(j).lpNorm<1>();
    CHECK_THAT(bsum, Catch::Matchers::WithinRel(1.0, 1e-12));
    for (int q = 0; q < 25; ++q) {
      const VectorXd x = random_point(3, rng);
      CHECK_THAT(two_layer_eval(out, x),
                 Catch::Matchers::WithinAbs(two_layer_eval(rep, x), 1e-12));
    }
    const TwoLayerRep again = normalize_two_layer(out);
    CHECK((again.a - out.a).cwiseAbs().maxCoeff() <= 1e-15);
    CHECK((again.b - out.b).cwiseAbs().maxCoeff() <= 1e-15);
  }

  TwoLayerRep dead;
  dead.a = VectorXd::Zero(2);
  dead.b = MatrixXd::Ones(2, 2);
  CHECK_THROWS_AS(normalize_two_layer(dead), DegenerateInputError);
}

TEST_CASE("build_resnet: worked 2-neuron lift has norm 3 and exact values") {
  const TwoLayerRep rep = axis_rep();
  const ResNetParams p = build_resnet(rep, 2, 1);
  CHECK(p.arch.D == 3);
  CHECK_THAT(weighted_path_norm(p), Catch::Matchers::WithinRel(3.0, 1e-12));
  Rng rng(21);
  for (int t = 0; t < 200; ++t) {
    const VectorXd x = random_point(2, rng);
    CHECK_THAT(resnet_forward(p, x),
               Catch::Matchers::WithinAbs(0.5 * relu(x(0)) - 0.5 * relu(x(1)), 1e-12));
  }
}

TEST_CASE("build_resnet: random reps are exact and satisfy the norm formula") {
  Rng rng(22);
  for (int t = 0; t < 20; ++t) {
    const int d = 2 + int(rng.uniform_index(3));
    const int M = 1 + int(rng.uniform_index(6));
    const int m = 1 + int(rng.uniform_index(3));
    const int L = (M + m - 1) / m + int(rng.uniform_index(2));
    const TwoLayerRep rep = random_rep(M, d, rng);
    const ResNetParams p = build_resnet(rep, L, m);
    for (int q = 0; q < 50; ++q) {
      const VectorXd x = random_point(d, rng);
      CHECK_THAT(resnet_forward(p, x),
                 Catch::Matchers::WithinAbs(two_layer_eval(rep, x), 1e-12));
    }
    CHECK_THAT(weighted_path_norm(p),
               Catch::Matchers::WithinRel(3.0 * rep_mass(rep), 1e-12));
  }
}

TEST_CASE("build_resnet: padding with zero blocks changes nothing") {
  Rng rng(23);
  const TwoLayerRep rep = random_rep(1, 3, rng);
  const ResNetParams tight = build_resnet(rep, 1, 1);
  const ResNetParams padded = build_resnet(rep, 3, 2);
  CHECK_THAT(weighted_path_norm(padded),
             Catch::Matchers::WithinRel(weighted_path_norm(tight), 1e-12));
  CHECK_THAT(l1_path_norm(padded),
             Catch::Matchers::WithinRel(l1_path_norm(tight), 1e-12));
  for (int q = 0; q < 100; ++q) {
    const VectorXd x = random_point(3, rng);
    CHECK_THAT(resnet_forward(padded, x),
               Catch::Matchers::WithinAbs(resnet_forward(tight, x), 1e-12));
  }
}

TEST_CASE("build_resnet: capacity errors") {
  const TwoLayerRep rep = axis_rep();
  CHECK_THROWS_AS(build_resnet(rep, 1, 1), CapacityError);
  CHECK_THROWS_AS(build_resnet(rep, 0, 1), CapacityError);
}

TEST_CASE("build_fc: normalized 2-neuron rep, d=2, m=3, L=3, exact at 1000 points") {
  const TwoLayerRep rep = normalize_two_layer(axis_rep());
  const FcParams p = build_fc(rep, 3, 3);
  Rng rng(31);
  for (int q = 0; q < 1000; ++q) {
    const VectorXd x = random_point(2, rng);
    CHECK_THAT(fc_forward(p, x),
               Catch::Matchers::WithinAbs(two_layer_eval(rep, x), 1e-12));
  }
}

TEST_CASE("build_fc: exactness across layouts, including the tight one") {
  Rng rng(32);
  for (int t = 0; t < 20; ++t) {
    const int d = 2 + int(rng.uniform_index(3));
    const int L = 2 + int(rng.uniform_index(3));
    const int m = d + 1 + int(rng.uniform_index(3));
    const int capacity = (L == 2) ? m : m;
    const int M = 1 + int(rng.uniform_index(capacity));
    const TwoLayerRep rep = normalize_two_layer(random_rep(M, d, rng));
    const FcParams p = build_fc(rep, L, m);
    for (int q = 0; q < 100; ++q) {
      const VectorXd x = random_point(d, rng);
      CHECK_THAT(fc_forward(p, x),
                 Catch::Matchers::WithinAbs(two_layer_eval(rep, x), 1e-12));
    }
  }
}

TEST_CASE("build_fc: capacity errors") {
  const TwoLayerRep rep = normalize_two_layer(axis_rep());
  CHECK_THROWS_AS(build_fc(rep, 3, 2), CapacityError); // m <= d
  CHECK_THROWS_AS(build_fc(rep, 1, 5), CapacityError); // L < 2
  Rng rng(33);
  const TwoLayerRep wide = normalize_two_layer(random_rep(5, 2, rng));
  CHECK_THROWS_AS(build_fc(wide, 2, 4), CapacityError); // M=5 > m=4 at L=2
}

TEST_CASE("subsample: determinism and exact passthrough") {
  const BarronMixture target = random_mixture(6, 3, 1.0, 404, false);
  const TwoLayerRep a = subsample_two_layer(target, 10, 99);
  const TwoLayerRep b = subsample_two_layer(target, 10, 99);
  CHECK((a.a - b.a).cwiseAbs().maxCoeff() == 0.0);
  CHECK((a.b - b.b).cwiseAbs().maxCoeff() == 0.0);

  const TwoLayerRep exact = subsample_two_layer(target, 10, 99, true);
  REQUIRE(exact.M() == target.K());
  Rng rng(41);
  for (int q = 0; q < 50; ++q) {
    const VectorXd x = random_point(3, rng);
    CHECK(two_layer_eval(exact, x) == mixture_eval(target, x));
  }
}

TEST_CASE("subsample: coefficient magnitudes and direction provenance") {
  const BarronMixture target = random_mixture(8, 3, 1.0, 405, false);
  const double mass = target.a.lpNorm<1>();
  const TwoLayerRep rep = subsample_two_layer(target, 12, 7);
  REQUIRE(rep.M() == 12);
  for (int k = 0; k < rep.M(); ++k) {
    CHECK_THAT(std::abs(rep.a(k)), Catch::Matchers::WithinRel(mass / 12.0, 1e-12));
    bool found = false;
    for (int j = 0; j < target.K(); ++j)
      if ((rep.b.row(k) - target.omega.row(j)).cwiseAbs().maxCoeff() == 0.0)
        found = true;
    CHECK(found);
  }
}

TEST_CASE("subsample: unbiased at a fixed point over many seeds") {
  const BarronMixture target = random_mixture(20, 3, 1.0, 406, false);
  Rng rng(42);
  const VectorXd x = random_point(3, rng);
  const double truth = mixture_eval(target, x);
  const int S = 400;
  double sum = 0.0, sumsq = 0.0;
  for (int s = 0; s < S; ++s) {
    const TwoLayerRep rep = subsample_two_layer(target, 8, 1000 + s);
    const double v = two_layer_eval(rep, x);
    sum += v;
    sumsq += v * v;
  }
  const double mean = sum / S;
  const double var = (sumsq - S * mean * mean) / (S - 1);
  const double se = std::sqrt(var / S);
  CHECK(std::abs(mean - truth) <= 5.0 * se + 1e-12);
}

TEST_CASE("subsample: domain and degeneracy errors") {
  const BarronMixture target = random_mixture(4, 3, 1.0, 407, false);
  CHECK_THROWS_AS(subsample_two_layer(target, 0, 1), DomainError);
  BarronMixture dead = target;
  dead.a.setZero();
  CHECK_THROWS_AS(subsample_two_layer(dead, 3, 1), DegenerateInputError);
}

TEST_CASE("normalized lift satisfies the 12b path-norm certificate") {
  Rng rng(51);
  for (int t = 0; t < 10; ++t) {
    const BarronMixture target = random_mixture(6, 3, 1.0, 500 + t, false);
    TwoLayerRep rep;
    rep.a = target.a;
    rep.b = target.omega;
    const TwoLayerRep norm = normalize_two_layer(rep);
    const ResNetParams p = build_resnet(norm, 3, 2);
    CHECK(weighted_path_norm(p) <= 12.0 * barron_norm_upper(target) + 1e-9);
  }
}

#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "respath/rng.hpp"
#include "respath/targets.hpp"

using namespace respath;

namespace {

BarronMixture axis_mixture() {
  BarronMixture t;
  t.d = 2;
  t.a.resize(2);
  t.a << 0.5, -0.5;
  t.omega.resize(2, 2);
  t.omega << 1, 0, 0, 1;
  return t;
}

// Exponentiated-gradient minimization of sum_j a_j^2 / p_j over the simplex;
// an independent check that the closed-form infimum is (sum |a_j|)^2.
double simplex_min_sqrt(const VectorXd& a) {
  const int K = static_cast<int>(a.size());
  VectorXd p = VectorXd::Constant(K, 1.0 / K);
  for (int it = 0; it < 20000; ++it) {
    VectorXd grad(K);
    for (int j = 0; j < K; ++j) grad(j) = -a(j) * a(j) / (p(j) * p(j));
    // multiplicative-weights step, scaled by the gradient range for stability
    const double scale = grad.cwiseAbs().maxCoeff() + 1e-12;
    VectorXd q(K);
    double z = 0.0;
    for (int j = 0; j < K; ++j) {
      q(j) = p(j) * std::exp(-0.5 * grad(j) / scale);
      z += q(j);
    }
    p = q / z;
  }
  double obj = 0.0;
  for (int j = 0; j < K; ++j) obj += a(j) * a(j) / p(j);
  return std::sqrt(obj);
}

} // namespace

TEST_CASE("mixture_eval hand value and linearity") {
  const BarronMixture t = axis_mixture();
  VectorXd x(2);
  x << 1.0, 0.4;
  CHECK_THAT(mixture_eval(t, x), Catch::Matchers::WithinAbs(0.3, 1e-15));
  CHECK(mixture_eval(t, VectorXd::Zero(2)) == 0.0);
  BarronMixture neg = t;
  neg.a = -t.a;
  CHECK_THAT(mixture_eval(neg, x), Catch::Matchers::WithinAbs(-0.3, 1e-15));
  CHECK_THROWS_AS(mixture_eval(t, VectorXd::Zero(3)), StructuralError);
}

TEST_CASE("barron_norm_upper equals the simplex-minimized value") {
  CHECK(barron_norm_upper(axis_mixture()) == 1.0);

  BarronMixture one;
  one.d = 2;
  one.a = VectorXd::Constant(1, 2.0);
  one.omega.resize(1, 2);
  one.omega << 1, 0;
  CHECK(barron_norm_upper(one) == 2.0);

  VectorXd a(3);
  a << 1.0, 2.0, 3.0;
  BarronMixture t;
  t.d = 2;
  t.a = a;
  t.omega.resize(3, 2);
  t.omega << 1, 0, 0, 1, 0.5, 0.5;
  CHECK(barron_norm_upper(t) == 6.0);
  CHECK_THAT(simplex_min_sqrt(a), Catch::Matchers::WithinAbs(6.0, 1e-6));

  Rng rng(9);
  VectorXd r(5);
  for (int j = 0; j < 5; ++j) r(j) = rng.uniform(-2.0, 2.0);
  CHECK_THAT(simplex_min_sqrt(r), Catch::Matchers::WithinAbs(r.lpNorm<1>(), 1e-6));
}

TEST_CASE("mixture validation catches broken directions") {
  BarronMixture t = axis_mixture();
  CHECK_NOTHROW(t.validate());
  t.omega(0, 0) = 0.9;
  CHECK_THROWS_AS(t.validate(), StructuralError);
  t = axis_mixture();
  t.a.resize(1);
  CHECK_THROWS_AS(t.validate(), StructuralError);
}

TEST_CASE("random_mixture: determinism, unit directions, rescaled range") {
  const BarronMixture a = random_mixture(7, 4, 1.5, 1234, false);
  const BarronMixture b = random_mixture(7, 4, 1.5, 1234, false);
  CHECK((a.a - b.a).cwiseAbs().maxCoeff() == 0.0);
  CHECK((a.omega - b.omega).cwiseAbs().maxCoeff() == 0.0);
  REQUIRE(a.K() == 7);
  for (int j = 0; j < a.K(); ++j)
    CHECK(std::abs(a.omega.row(j).lpNorm<1>() - 1.0) <= 1e-12);
  CHECK_NOTHROW(a.validate());

  const BarronMixture r = random_mixture(7, 4, 1.5, 1234, true);
  CHECK(r.K() == 8); // shift atom appended
  CHECK_NOTHROW(r.validate());
  Rng rng(77);
  for (int i = 0; i < 5000; ++i) {
    const double v = mixture_eval(r, sample_point(4, rng));
    CHECK(v >= -0.05);
    CHECK(v <= 1.05);
  }

  CHECK_THROWS_AS(random_mixture(0, 3, 1.0, 1), DomainError);
  CHECK_THROWS_AS(random_mixture(3, 1, 1.0, 1), DomainError);
}

TEST_CASE("noise models: certificate fields and gaussian tail bound") {
  const NoiseModel none = NoiseModel::none();
  Rng rng(1);
  CHECK(none.draw(rng) == 0.0);

  const NoiseModel g = NoiseModel::gaussian(0.7);
  CHECK(g.c == 2.0);
  CHECK(g.tau == 0.0);
  CHECK(g.sigma == 0.7);

  // Empirical tails at t = sigma, 2 sigma, 3 sigma against c exp(-t^2/2sigma^2)
  const int N = 1000000;
  Rng draws(2026);
  std::vector<int> counts(3, 0);
  double sum = 0.0;
  for (int i = 0; i < N; ++i) {
    const double e = g.draw(draws);
    sum += e;
    for (int k = 0; k < 3; ++k)
      if (std::abs(e) > (k + 1) * g.sigma) ++counts[k];
  }
  for (int k = 0; k < 3; ++k) {
    const double t = (k + 1) * g.sigma;
    const double bound = g.c * std::exp(-t * t / (2.0 * g.sigma * g.sigma));
    const double phat = double(counts[k]) / N;
    const double se = std::sqrt(std::max(phat * (1 - phat), 1e-12) / N);
    CHECK(phat <= bound + 3.0 * se);
  }
  // mean of n gaussians concentrates at the 3 sigma / sqrt(n) scale
  CHECK(std::abs(sum / N) <= 3.0 * g.sigma / std::sqrt(double(N)));
}

TEST_CASE("sample_point and sample_dataset respect the domain") {
  Rng rng(5);
  for (int t = 0; t < 100; ++t) {
    const VectorXd x = sample_point(4, rng);
    CHECK(x(0) == 1.0);
    for (int k = 1; k < 4; ++k) {
      CHECK(x(k) >= 0.0);
      CHECK(x(k) <= 1.0);
    }
  }

  const BarronMixture target = random_mixture(5, 3, 1.0, 600, false);
  const Dataset clean = sample_dataset(target, 50, NoiseModel::none(), 9);
  CHECK_NOTHROW(clean.validate());
  for (int i = 0; i < clean.n(); ++i) {
    CHECK(clean.y(i) == mixture_eval(target, VectorXd(clean.x.row(i))));
  }
  const Dataset again = sample_dataset(target, 50, NoiseModel::none(), 9);
  CHECK((again.x - clean.x).cwiseAbs().maxCoeff() == 0.0);

  const Dataset noisy = sample_dataset(target, 50, NoiseModel::gaussian(0.3), 9);
  CHECK_NOTHROW(noisy.validate());
  double dev = 0.0;
  for (int i = 0; i < noisy.n(); ++i)
    dev = std::max(dev, std::abs(noisy.y(i) -
                                 mixture_eval(target, VectorXd(noisy.x.row(i)))));
  CHECK(dev > 0.0);

  CHECK_THROWS_AS(sample_dataset(target, 0, NoiseModel::none(), 9), DomainError);
}

TEST_CASE("population_risk_mc: deterministic and consistent with the target") {
  const BarronMixture target = random_mixture(5, 3, 0.5, 601, true);
  // A net that outputs the constant 0 has risk E[(T y)^2] over clean labels.
  ResNetParams p = ResNetParams::zeros({3, 4, 2, 2});
  const auto [est1, se1] = population_risk_mc(target, NoiseModel::none(), p, 20000, 3);
  const auto [est2, se2] = population_risk_mc(target, NoiseModel::none(), p, 20000, 3);
  CHECK(est1 == est2);
  CHECK(se1 == se2);

  Rng rng(71);
  double direct = 0.0;
  Rng mc(3); // same stream as population_risk_mc uses internally
  const int n_mc = 20000;
  for (int i = 0; i < n_mc; ++i) {
    const VectorXd x = sample_point(3, mc);
    const double y = mixture_eval(target, x);
    const double v = truncate01(0.0) - y;
    direct += v * v;
  }
  direct /= n_mc;
  CHECK_THAT(est1, Catch::Matchers::WithinAbs(direct, 1e-12));

  CHECK_THROWS_AS(population_risk_mc(target, NoiseModel::none(), p, 50, 3),
                  DomainError);
}

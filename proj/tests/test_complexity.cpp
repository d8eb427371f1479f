#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "respath/complexity.hpp"
#include "respath/rng.hpp"
#include "respath/targets.hpp"

using namespace respath;

namespace {

MatrixXd random_points(int n, int d, Rng& rng) {
  MatrixXd pts(n, d);
  for (int i = 0; i < n; ++i) pts.row(i) = sample_point(d, rng).transpose();
  return pts;
}

// Brute-force complexity of a finite function dictionary evaluated on n points:
// (1/n) 2^{-n} sum_xi max_f sum_i xi_i f(x_i).
double finite_class_rademacher(const MatrixXd& values) {
  const int n = static_cast<int>(values.rows());
  const std::uint64_t total = 1ULL << n;
  double sum = 0.0;
  for (std::uint64_t mask = 0; mask < total; ++mask) {
    double best = -1e300;
    for (int f = 0; f < values.cols(); ++f) {
      double s = 0.0;
      for (int i = 0; i < n; ++i)
        s += ((mask >> i) & 1u ? 1.0 : -1.0) * values(i, f);
      best = std::max(best, s);
    }
    sum += best;
  }
  return sum / (double(n) * double(total));
}

} // namespace

TEST_CASE("exact linear complexity: hand cases") {
  MatrixXd one(1, 2);
  one << 1, 0;
  CHECK_THAT(rademacher_linear_exact(one), Catch::Matchers::WithinAbs(1.0, 1e-15));

  MatrixXd basis(2, 2);
  basis << 1, 0, 0, 1;
  CHECK_THAT(rademacher_linear_exact(basis), Catch::Matchers::WithinAbs(0.5, 1e-15));

  CHECK_THROWS_AS(rademacher_linear_exact(MatrixXd::Zero(0, 2)), DomainError);
  CHECK_THROWS_AS(rademacher_linear_exact(MatrixXd::Ones(21, 2)), CapacityError);
}

TEST_CASE("exact linear complexity never beats the closed-form bound") {
  Rng rng(801);
  for (int t = 0; t < 500; ++t) {
    const int n = 1 + int(rng.uniform_index(10));
    const int d = 2 + int(rng.uniform_index(4));
    const MatrixXd pts = random_points(n, d, rng);
    const double exact = rademacher_linear_exact(pts);
    double max_inf = 0.0;
    for (int i = 0; i < n; ++i)
      max_inf = std::max(max_inf, pts.row(i).cwiseAbs().maxCoeff());
    const double bound = rademacher_bounds(RademacherKind::Linear, 1.0, d, n, max_inf);
    CHECK(exact <= bound + 1e-12);
  }
}

TEST_CASE("closed-form bound values") {
  CHECK_THAT(rademacher_bounds(RademacherKind::Resnet, 1.0, 2, 100),
             Catch::Matchers::WithinAbs(0.499533, 5e-7));
  CHECK_THAT(rademacher_bounds(RademacherKind::Linear, 1.0, 2, 2, 1.0),
             Catch::Matchers::WithinAbs(1.177410, 5e-7));
  CHECK(rademacher_bounds(RademacherKind::Resnet, 0.0, 2, 100) == 0.0);
  CHECK_THROWS_AS(rademacher_bounds(RademacherKind::Resnet, -1.0, 2, 100), DomainError);
  CHECK_THROWS_AS(rademacher_bounds(RademacherKind::Resnet, 1.0, 0, 100), DomainError);
  // formula contains neither L nor m: nothing to vary, value fixed by (Q, d, n)
}

TEST_CASE("gap_bound values and scaling") {
  CHECK(gap_bound(0.0, 0.0, 100, 0.1) == 0.0);
  CHECK_THAT(gap_bound(0.5, 1.0, 100, 0.1),
             Catch::Matchers::WithinAbs(1.543241, 5e-7));
  const double g1 = gap_bound(0.0, 1.0, 50, 0.2);
  const double g2 = gap_bound(0.0, 1.0, 100, 0.2);
  CHECK_THAT(g1 / g2, Catch::Matchers::WithinRel(std::sqrt(2.0), 1e-12));
  CHECK_THROWS_AS(gap_bound(0.1, 1.0, 100, 0.0), DomainError);
  CHECK_THROWS_AS(gap_bound(0.1, 1.0, 100, 1.0), DomainError);
}

TEST_CASE("lower estimate: zero radius, validation") {
  Rng rng(802);
  const MatrixXd pts = random_points(4, 3, rng);
  const auto [est, se] = rademacher_lower_estimate(pts, 0.0, {3, 4, 2, 2}, 1);
  CHECK(est == 0.0);
  CHECK(se == 0.0);
  CHECK_THROWS_AS(rademacher_lower_estimate(pts, -1.0, {3, 4, 2, 2}, 1), DomainError);
  CHECK_THROWS_AS(rademacher_lower_estimate(pts, 1.0, {4, 5, 2, 2}, 1),
                  StructuralError);
}

TEST_CASE("lower estimate: linear sub-class matches the enumeration oracle") {
  Rng rng(803);
  RademacherEstimateOptions opt;
  opt.n_xi = 32;
  opt.restarts = 3;
  opt.steps = 150;
  for (int t = 0; t < 3; ++t) {
    const int n = 6;
    const int d = 3;
    const double Q = 1.0 + t;
    const MatrixXd pts = random_points(n, d, rng);
    const double exact = Q * rademacher_linear_exact(pts);
    RademacherEstimateOptions linopt = opt;
    linopt.linear_subclass = true;
    const auto [est, se] =
        rademacher_lower_estimate(pts, Q, {d, d, 1, 1}, 900 + t, linopt);
    CHECK(est <= exact + 3.0 * se + 0.05 * exact);
    CHECK(est >= 0.5 * exact - 3.0 * se);
  }
}

TEST_CASE("lower estimate stays below the closed-form bound") {
  Rng rng(804);
  RademacherEstimateOptions opt;
  opt.n_xi = 16;
  opt.restarts = 2;
  opt.steps = 100;
  for (int t = 0; t < 4; ++t) {
    const int n = 8;
    const int d = 3;
    const double Q = 1.0 + 0.5 * t;
    const MatrixXd pts = random_points(n, d, rng);
    const auto [est, se] =
        rademacher_lower_estimate(pts, Q, {d, d + 1, 2, 2}, 950 + t, opt);
    const double bound = rademacher_bounds(RademacherKind::Resnet, Q, d, n);
    CHECK(est <= bound + 3.0 * se + 1e-12);
  }
}

TEST_CASE("contraction: 1-Lipschitz maps never increase finite-class complexity") {
  Rng rng(805);
  for (int t = 0; t < 20; ++t) {
    const int n = 6;
    const int F = 5;
    MatrixXd values(n, F);
    for (int i = 0; i < n; ++i)
      for (int f = 0; f < F; ++f) values(i, f) = rng.uniform(-2.0, 2.0);
    const double base = finite_class_rademacher(values);

    const auto apply = [&](double (*phi)(double)) {
      MatrixXd out = values;
      for (int i = 0; i < out.rows(); ++i)
        for (int f = 0; f < out.cols(); ++f) out(i, f) = phi(out(i, f));
      // the lemma speaks of contractions fixing 0; these all do
      return finite_class_rademacher(out);
    };

    CHECK(apply(+[](double v) { return std::tanh(v); }) <= base + 1e-12);
    CHECK(apply(+[](double v) { return std::max(v, 0.0); }) <= base + 1e-12);
    CHECK(apply(+[](double v) { return 0.5 * v; }) <= base + 1e-12);
  }
}

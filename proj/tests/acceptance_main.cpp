// Acceptance gate: one pass/fail line per criterion, nonzero exit on any
// failure.

#include <chrono>
#include <cstdio>
#include <functional>
#include <vector>

#include "respath/verify.hpp"

int main() {
  using respath::CheckResult;
  const std::vector<std::function<CheckResult()>> criteria = {
      respath::acceptance::criterion_norm_identities,
      respath::acceptance::criterion_construction_exactness,
      respath::acceptance::criterion_approximation_rate,
      respath::acceptance::criterion_rademacher,
      respath::acceptance::criterion_gradient,
      respath::acceptance::criterion_end_to_end,
      respath::acceptance::criterion_gap_scaling,
      respath::acceptance::criterion_noise_lemma,
      respath::acceptance::criterion_fc_certificates,
      respath::acceptance::criterion_table_ratios,
      respath::acceptance::criterion_determinism,
  };

  int failed = 0;
  for (const auto& run : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    const CheckResult r = run();
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("[%s] %s (%.1f s) %s\n", r.pass ? "PASS" : "FAIL", r.name.c_str(),
                secs, r.detail.c_str());
    std::fflush(stdout);
    if (!r.pass) ++failed;
  }
  if (failed) std::printf("%d criteria FAILED\n", failed);
  else std::printf("all criteria passed\n");
  return failed == 0 ? 0 : 1;
}

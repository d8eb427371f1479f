#ifndef RESPATH_EXPERIMENT_HPP
#define RESPATH_EXPERIMENT_HPP

#include <cstdint>
#include <future>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "respath/bounds.hpp"
#include "respath/errors.hpp"
#include "respath/io.hpp"
#include "respath/targets.hpp"
#include "respath/train.hpp"
#include "respath/version.hpp"

namespace respath {

// Declarative experiment: sample a target, train the regularized model on a
// grid of (n, lambda, L, m), evaluate norms, Monte Carlo population risk and
// every bound. One CSV row per grid point.
struct ExperimentConfig {
  std::uint64_t seed = 0;
  double delta = 0.1;
  int mc_samples = 20000;
  // target
  int target_d = 3;
  int target_K = 5;
  double coef_scale = 1.0;
  // noise
  NoiseModel noise = NoiseModel::none();
  // training
  TrainConfig train;
  // grids, iterated n -> lambda -> L -> m
  std::vector<int> n_grid{100};
  std::vector<double> lambda_grid{0.0};
  std::vector<int> L_grid{2};
  std::vector<int> m_grid{4};
};

namespace detail {

inline void require_keys(const json& j, const std::set<std::string>& allowed,
                         const std::string& where) {
  for (const auto& item : j.items())
    if (!allowed.count(item.key()))
      throw ParseError("config: unknown key \"" + item.key() + "\" in " + where);
}

template <typename T>
inline std::vector<T> scalar_or_list(const json& j, const std::string& key) {
  std::vector<T> out;
  if (j.is_array()) {
    for (const auto& v : j) out.push_back(v.get<T>());
  } else {
    out.push_back(j.get<T>());
  }
  if (out.empty()) throw ParseError("config: empty grid for \"" + key + "\"");
  return out;
}

// Error messages ride in one CSV cell; keep the dialect delimiter-free.
inline std::string csv_safe(std::string s) {
  for (char& c : s)
    if (c == ',' || c == '\n' || c == '\r') c = ';';
  return s;
}

} // namespace detail

inline ExperimentConfig parse_experiment_config(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("config: ") + e.what());
  }
  detail::require_keys(j,
                       {"seed", "delta", "mc_samples", "target", "noise",
                        "train", "n", "lambda", "L", "m"},
                       "top level");
  ExperimentConfig cfg;
  if (j.contains("seed")) cfg.seed = j["seed"].get<std::uint64_t>();
  if (j.contains("delta")) cfg.delta = j["delta"].get<double>();
  if (j.contains("mc_samples")) cfg.mc_samples = j["mc_samples"].get<int>();

  if (j.contains("target")) {
    const json& t = j["target"];
    detail::require_keys(t, {"d", "K", "coef_scale"}, "target");
    if (t.contains("d")) cfg.target_d = t["d"].get<int>();
    if (t.contains("K")) cfg.target_K = t["K"].get<int>();
    if (t.contains("coef_scale")) cfg.coef_scale = t["coef_scale"].get<double>();
  }
  if (j.contains("noise")) {
    const json& nj = j["noise"];
    detail::require_keys(nj, {"kind", "sigma"}, "noise");
    const std::string kind = nj.value("kind", "none");
    if (kind == "none") {
      cfg.noise = NoiseModel::none();
    } else if (kind == "gaussian") {
      if (!nj.contains("sigma")) throw ParseError("config: gaussian noise needs sigma");
      cfg.noise = NoiseModel::gaussian(nj["sigma"].get<double>());
    } else {
      throw ParseError("config: noise kind must be none or gaussian");
    }
  }
  if (j.contains("train")) {
    const json& t = j["train"];
    detail::require_keys(
        t, {"B", "step_size", "batch_size", "epochs", "init_scale", "adam"},
        "train");
    if (t.contains("B")) cfg.train.B = t["B"].get<double>();
    if (t.contains("step_size")) cfg.train.step_size = t["step_size"].get<double>();
    if (t.contains("batch_size")) cfg.train.batch_size = t["batch_size"].get<int>();
    if (t.contains("epochs")) cfg.train.epochs = t["epochs"].get<int>();
    if (t.contains("init_scale")) cfg.train.init_scale = t["init_scale"].get<double>();
    if (t.contains("adam")) cfg.train.adam = t["adam"].get<bool>();
  }
  if (j.contains("n")) cfg.n_grid = detail::scalar_or_list<int>(j["n"], "n");
  if (j.contains("lambda"))
    cfg.lambda_grid = detail::scalar_or_list<double>(j["lambda"], "lambda");
  if (j.contains("L")) cfg.L_grid = detail::scalar_or_list<int>(j["L"], "L");
  if (j.contains("m")) cfg.m_grid = detail::scalar_or_list<int>(j["m"], "m");
  return cfg;
}

struct GridPointResult {
  int index = 0;
  int n = 0;
  double lambda = 0.0;
  int L = 0, m = 0;
  std::uint64_t seed = 0;
  double train_risk = 0.0;
  double pop_risk = 0.0, pop_se = 0.0;
  double path_norm = 0.0;
  double apost = 0.0, apriori = 0.0;
  double gap = 0.0;
  bool gap_le_apost = false;
  std::string error; // empty on success
};

struct ExperimentResult {
  std::string csv;
  std::string report_json;
  std::vector<GridPointResult> points;
};

inline GridPointResult run_grid_point(const ExperimentConfig& cfg,
                                      const BarronMixture& target, int index,
                                      int n, double lambda, int L, int m) {
  GridPointResult r;
  r.index = index;
  r.n = n;
  r.lambda = lambda;
  r.L = L;
  r.m = m;
  r.seed = cfg.seed + static_cast<std::uint64_t>(index);
  try {
    const Dataset data =
        sample_dataset(target, n, cfg.noise, Rng::derive_seed(r.seed, 1));
    TrainConfig tc = cfg.train;
    tc.lambda = lambda;
    tc.seed = Rng::derive_seed(r.seed, 2);
    ResNetArch arch{target.d, target.d + 1, m, L};
    const TrainResult tr = train(tc, data, arch);
    r.train_risk = empirical_risk(data, tr.params, tc.B);
    const auto [risk, se] = population_risk_mc(
        target, cfg.noise, tr.params, cfg.mc_samples, Rng::derive_seed(r.seed, 3), tc.B);
    r.pop_risk = risk;
    r.pop_se = se;
    r.path_norm = weighted_path_norm(tr.params);
    r.apost = apost_rhs(r.path_norm, target.d, n, cfg.delta);
    r.apriori = apriori_rhs(barron_norm_upper(target), L, m, target.d, n,
                            lambda, cfg.delta);
    r.gap = std::abs(r.pop_risk - r.train_risk);
    r.gap_le_apost = r.gap <= r.apost;
  } catch (const std::exception& e) {
    r.error = e.what();
  }
  return r;
}

inline ExperimentResult run_experiment(const ExperimentConfig& cfg,
                                       const std::string& config_echo,
                                       int jobs = 1) {
  const BarronMixture target = random_mixture(
      cfg.target_K, cfg.target_d, cfg.coef_scale, Rng::derive_seed(cfg.seed, 0));

  struct Point {
    int n;
    double lambda;
    int L, m;
  };
  std::vector<Point> grid;
  for (int n : cfg.n_grid)
    for (double lambda : cfg.lambda_grid)
      for (int L : cfg.L_grid)
        for (int m : cfg.m_grid) grid.push_back({n, lambda, L, m});

  std::vector<GridPointResult> results(grid.size());
  if (jobs < 1) jobs = 1;
  for (std::size_t base = 0; base < grid.size(); base += jobs) {
    std::vector<std::future<GridPointResult>> batch;
    const std::size_t end = std::min(grid.size(), base + jobs);
    for (std::size_t i = base; i < end; ++i) {
      const Point pt = grid[i];
      batch.push_back(std::async(std::launch::async, [&, pt, i] {
        return run_grid_point(cfg, target, static_cast<int>(i), pt.n, pt.lambda,
                              pt.L, pt.m);
      }));
    }
    for (std::size_t i = base; i < end; ++i) results[i] = batch[i - base].get();
  }

  // CSV rows in grid order regardless of completion order.
  CsvWriter csv({"index", "n", "lambda", "L", "m", "d", "K", "delta", "seed",
                 "train_risk", "pop_risk", "pop_se", "path_norm", "apost_rhs",
                 "apriori_rhs", "gap", "gap_le_apost", "error"});
  for (const auto& r : results) {
    csv.add_row({std::to_string(r.index), std::to_string(r.n),
                 format_double(r.lambda), std::to_string(r.L),
                 std::to_string(r.m), std::to_string(cfg.target_d),
                 std::to_string(cfg.target_K), format_double(cfg.delta),
                 std::to_string(r.seed), format_double(r.train_risk),
                 format_double(r.pop_risk), format_double(r.pop_se),
                 format_double(r.path_norm), format_double(r.apost),
                 format_double(r.apriori), format_double(r.gap),
                 r.error.empty() ? (r.gap_le_apost ? "1" : "0") : "",
                 detail::csv_safe(r.error)});
  }

  json report;
  report["version"] = kVersion;
  report["config_hash"] = fnv1a_hash(config_echo);
  report["config"] = json::parse(config_echo);
  report["base_seed"] = cfg.seed;
  report["target"] = json::parse(mixture_to_json(target));
  std::vector<std::uint64_t> seeds;
  for (const auto& r : results) seeds.push_back(r.seed);
  report["grid_seeds"] = seeds;

  ExperimentResult out;
  out.csv = csv.str();
  out.report_json = report.dump(2) + "\n";
  out.points = std::move(results);
  return out;
}

inline ExperimentResult run_experiment_from_text(const std::string& config_text,
                                                 int jobs = 1,
                                                 std::optional<std::uint64_t>
                                                     seed_override = std::nullopt) {
  ExperimentConfig cfg = parse_experiment_config(config_text);
  if (seed_override) cfg.seed = *seed_override;
  return run_experiment(cfg, config_text, jobs);
}

} // namespace respath

#endif

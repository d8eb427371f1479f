// Command-line front end: norms, construct, train, rademacher, bound,
// experiment, verify. Exit codes: 0 success, 1 check failure, 2 usage or
// config error.

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <set>
#include <string>

#include <CLI11.hpp>

#include "respath/bounds.hpp"
#include "respath/complexity.hpp"
#include "respath/construct.hpp"
#include "respath/errors.hpp"
#include "respath/experiment.hpp"
#include "respath/io.hpp"
#include "respath/norms.hpp"
#include "respath/targets.hpp"
#include "respath/train.hpp"
#include "respath/verify.hpp"
#include "respath/version.hpp"

namespace fs = std::filesystem;
using namespace respath;

namespace {

json norm_report_json(const NormReport& r) {
  json j;
  j["weighted_path"] = r.weighted_path;
  j["l1_path"] = r.l1_path;
  j["spectral"] = r.spectral ? json(*r.spectral) : json(nullptr);
  j["variational"] = r.variational ? json(*r.variational) : json(nullptr);
  return j;
}

std::string norm_report_csv(const NormReport& r) {
  CsvWriter csv({"weighted_path", "l1_path", "spectral", "variational"});
  csv.add_row({format_double(r.weighted_path), format_double(r.l1_path),
               r.spectral ? format_double(*r.spectral) : "",
               r.variational ? format_double(*r.variational) : ""});
  return csv.str();
}

json bound_report_json(const BoundReport& r) {
  json j;
  j["inputs"] = {{"barron", r.barron}, {"L", r.L},         {"m", r.m},
                 {"d", r.d},           {"n", r.n},         {"lambda", r.lambda},
                 {"delta", r.delta},   {"c", r.c},         {"sigma", r.sigma},
                 {"path_norm", r.path_norm}};
  j["inputs"]["B"] = r.B ? json(*r.B) : json(nullptr);
  j["apriori_rhs"] = r.apriori;
  j["apost_rhs"] = r.apost;
  j["apriori_noisy_rhs"] = r.apriori_noisy ? json(*r.apriori_noisy) : json(nullptr);
  j["noise_gap_rhs"] = r.noise_gap ? json(*r.noise_gap) : json(nullptr);
  j["lambda_certified"] = r.lambda_certified;
  j["B_certified"] = r.B_certified;
  return j;
}

void write_output(const std::string& out_dir, const std::string& name,
                  const std::string& content) {
  if (out_dir.empty()) return;
  fs::create_directories(out_dir);
  write_file((fs::path(out_dir) / name).string(), content);
}

void require_keys(const json& j, const std::set<std::string>& allowed,
                  const std::string& where) {
  for (const auto& item : j.items())
    if (!allowed.count(item.key()))
      throw ParseError("config: unknown key \"" + item.key() + "\" in " + where);
}

json load_config(const std::string& path) {
  try {
    return json::parse(read_file(path));
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("config: ") + e.what());
  }
}

int run_norms(const std::string& model_path, const std::string& format,
              const std::string& out_dir) {
  const Model model = model_from_json(read_file(model_path));
  const NormReport r = std::visit([](const auto& p) { return norm_report(p); }, model);
  std::string text;
  if (format == "csv") {
    text = norm_report_csv(r);
  } else {
    text = norm_report_json(r).dump(2) + "\n";
  }
  std::cout << text;
  write_output(out_dir, format == "csv" ? "norms.csv" : "norms.json", text);
  return 0;
}

int run_construct(const json& cfg, std::optional<std::uint64_t> seed_override,
                  const std::string& out_dir) {
  require_keys(cfg,
               {"kind", "L", "m", "rep", "rep_file", "target", "M", "normalize",
                "seed", "exact_if_fits"},
               "construct");
  for (const char* key : {"L", "m"})
    if (!cfg.contains(key)) throw ParseError(std::string("config: construct needs \"") + key + "\"");
  const std::string kind = cfg.value("kind", "resnet");
  const int L = cfg["L"].get<int>();
  const int m = cfg["m"].get<int>();
  std::uint64_t seed = cfg.value("seed", std::uint64_t{0});
  if (seed_override) seed = *seed_override;

  TwoLayerRep rep;
  if (cfg.contains("rep")) {
    rep = rep_from_json(cfg["rep"].dump());
  } else if (cfg.contains("rep_file")) {
    rep = rep_from_json(read_file(cfg["rep_file"].get<std::string>()));
  } else if (cfg.contains("target")) {
    const json& t = cfg["target"];
    require_keys(t, {"d", "K", "coef_scale", "seed"}, "construct.target");
    const BarronMixture target =
        random_mixture(t.value("K", 5), t.value("d", 3), t.value("coef_scale", 1.0),
                       t.value("seed", std::uint64_t{0}));
    if (!cfg.contains("M")) throw ParseError("config: subsampled construct needs \"M\"");
    rep = subsample_two_layer(target, cfg["M"].get<int>(), seed,
                              cfg.value("exact_if_fits", false));
  } else {
    throw ParseError("config: construct needs \"rep\", \"rep_file\" or \"target\"");
  }
  if (cfg.value("normalize", false)) rep = normalize_two_layer(rep);

  json out;
  out["rep"] = json::parse(rep_to_json(rep));
  if (kind == "resnet") {
    const ResNetParams p = build_resnet(rep, L, m);
    out["model"] = json::parse(model_to_json(p));
    out["norms"] = norm_report_json(norm_report(p));
    write_output(out_dir, "model.json", model_to_json(p) + "\n");
  } else if (kind == "fc") {
    const FcParams p = build_fc(rep, L, m);
    out["model"] = json::parse(model_to_json(p));
    out["norms"] = norm_report_json(norm_report(p));
    write_output(out_dir, "model.json", model_to_json(p) + "\n");
  } else {
    throw ParseError("config: construct kind must be \"resnet\" or \"fc\"");
  }
  std::cout << out.dump(2) << "\n";
  return 0;
}

TrainConfig parse_train_block(const json& t) {
  require_keys(t, {"lambda", "B", "step_size", "batch_size", "epochs",
                   "init_scale", "adam", "seed"},
               "train");
  TrainConfig tc;
  if (t.contains("lambda")) tc.lambda = t["lambda"].get<double>();
  if (t.contains("B")) tc.B = t["B"].get<double>();
  if (t.contains("step_size")) tc.step_size = t["step_size"].get<double>();
  if (t.contains("batch_size")) tc.batch_size = t["batch_size"].get<int>();
  if (t.contains("epochs")) tc.epochs = t["epochs"].get<int>();
  if (t.contains("init_scale")) tc.init_scale = t["init_scale"].get<double>();
  if (t.contains("adam")) tc.adam = t["adam"].get<bool>();
  if (t.contains("seed")) tc.seed = t["seed"].get<std::uint64_t>();
  return tc;
}

NoiseModel parse_noise_block(const json& nj) {
  require_keys(nj, {"kind", "sigma"}, "noise");
  const std::string kind = nj.value("kind", "none");
  if (kind == "none") return NoiseModel::none();
  if (kind == "gaussian") {
    if (!nj.contains("sigma")) throw ParseError("config: gaussian noise needs sigma");
    return NoiseModel::gaussian(nj["sigma"].get<double>());
  }
  throw ParseError("config: noise kind must be none or gaussian");
}

int run_train(const json& cfg, std::optional<std::uint64_t> seed_override,
              const std::string& out_dir) {
  require_keys(cfg, {"target", "n", "noise", "arch", "train", "seed"}, "train config");
  for (const char* key : {"target", "n", "arch"})
    if (!cfg.contains(key)) throw ParseError(std::string("config: train needs \"") + key + "\"");
  const json& tj = cfg["target"];
  require_keys(tj, {"d", "K", "coef_scale", "seed"}, "target");
  std::uint64_t base_seed = cfg.value("seed", std::uint64_t{0});
  if (seed_override) base_seed = *seed_override;

  const BarronMixture target =
      random_mixture(tj.value("K", 5), tj.value("d", 3), tj.value("coef_scale", 1.0),
                     tj.contains("seed") ? tj["seed"].get<std::uint64_t>()
                                         : Rng::derive_seed(base_seed, 0));
  const NoiseModel noise =
      cfg.contains("noise") ? parse_noise_block(cfg["noise"]) : NoiseModel::none();
  const Dataset data = sample_dataset(target, cfg["n"].get<int>(), noise,
                                      Rng::derive_seed(base_seed, 1));

  const json& aj = cfg["arch"];
  require_keys(aj, {"L", "m", "D"}, "arch");
  const int L = aj.value("L", 2), m = aj.value("m", 4);
  const ResNetArch arch{target.d, aj.value("D", target.d + 1), m, L};

  TrainConfig tc = cfg.contains("train") ? parse_train_block(cfg["train"]) : TrainConfig{};
  tc.seed = Rng::derive_seed(base_seed, 2);
  const TrainResult tr = train(tc, data, arch);

  CsvWriter history({"epoch", "risk", "path_norm", "objective"});
  for (const auto& rec : tr.history.records)
    history.add_row({std::to_string(rec.epoch), format_double(rec.risk),
                     format_double(rec.path_norm), format_double(rec.objective)});
  write_output(out_dir, "model.json", model_to_json(tr.params) + "\n");
  write_output(out_dir, "history.csv", history.str());

  json out;
  out["version"] = kVersion;
  out["seed"] = base_seed;
  out["train_risk"] = empirical_risk(data, tr.params, tc.B);
  out["path_norm"] = weighted_path_norm(tr.params);
  out["objective"] = regularized_objective(tr.params, data, tc.lambda, tc.B);
  out["epochs"] = tc.epochs;
  std::cout << out.dump(2) << "\n";
  return 0;
}

int run_rademacher(const json& cfg, std::optional<std::uint64_t> seed_override,
                   const std::string& format, const std::string& out_dir) {
  require_keys(cfg,
               {"Q", "d", "n", "L", "m", "seed", "n_xi", "restarts", "steps",
                "step_size", "exact_linear"},
               "rademacher config");
  const double Q = cfg.value("Q", 1.0);
  const int d = cfg.value("d", 3), n = cfg.value("n", 8);
  const int L = cfg.value("L", 2), m = cfg.value("m", 4);
  std::uint64_t seed = cfg.value("seed", std::uint64_t{0});
  if (seed_override) seed = *seed_override;

  RademacherEstimateOptions opt;
  opt.n_xi = cfg.value("n_xi", opt.n_xi);
  opt.restarts = cfg.value("restarts", opt.restarts);
  opt.steps = cfg.value("steps", opt.steps);
  opt.step_size = cfg.value("step_size", opt.step_size);

  Rng rng(Rng::derive_seed(seed, 0));
  MatrixXd points(n, d);
  for (int i = 0; i < n; ++i) points.row(i) = sample_point(d, rng).transpose();
  const auto [est, se] =
      rademacher_lower_estimate(points, Q, {d, d + 1, m, L}, Rng::derive_seed(seed, 1), opt);
  const double bound = rademacher_bounds(RademacherKind::Resnet, Q, d, n);
  std::optional<double> exact;
  if (cfg.value("exact_linear", false)) {
    if (n > 20) throw DomainError("rademacher: exact_linear needs n <= 20");
    exact = Q * rademacher_linear_exact(points);
  }

  std::string text;
  if (format == "csv") {
    CsvWriter csv({"Q", "d", "n", "L", "m", "estimate", "se", "bound", "exact_linear"});
    csv.add_row({format_double(Q), std::to_string(d), std::to_string(n),
                 std::to_string(L), std::to_string(m), format_double(est),
                 format_double(se), format_double(bound),
                 exact ? format_double(*exact) : ""});
    text = csv.str();
  } else {
    json out;
    out["Q"] = Q;
    out["d"] = d;
    out["n"] = n;
    out["L"] = L;
    out["m"] = m;
    out["estimate"] = est;
    out["se"] = se;
    out["bound"] = bound;
    out["exact_linear"] = exact ? json(*exact) : json(nullptr);
    text = out.dump(2) + "\n";
  }
  std::cout << text;
  write_output(out_dir, format == "csv" ? "rademacher.csv" : "rademacher.json", text);
  return 0;
}

int run_bound(const json& cfg, const std::string& format, const std::string& out_dir) {
  require_keys(cfg,
               {"barron", "L", "m", "d", "n", "lambda", "delta", "B", "c",
                "sigma", "tau", "path_norm", "framework"},
               "bound config");
  for (const char* key : {"barron", "L", "m", "d", "n", "lambda", "delta"})
    if (!cfg.contains(key)) throw ParseError(std::string("config: bound needs \"") + key + "\"");
  std::optional<double> B;
  if (cfg.contains("B")) B = cfg["B"].get<double>();
  const BoundReport r = make_bound_report(
      cfg["barron"].get<double>(), cfg["L"].get<int>(), cfg["m"].get<int>(),
      cfg["d"].get<int>(), cfg["n"].get<int>(), cfg["lambda"].get<double>(),
      cfg["delta"].get<double>(), cfg.value("path_norm", 0.0), B,
      cfg.value("c", 0.0), cfg.value("sigma", 0.0), cfg.value("tau", 0.0));

  std::string text;
  if (format == "csv") {
    CsvWriter csv({"barron", "L", "m", "d", "n", "lambda", "delta", "B", "c",
                   "sigma", "path_norm", "apriori_rhs", "apost_rhs",
                   "apriori_noisy_rhs", "noise_gap_rhs", "lambda_certified",
                   "B_certified"});
    csv.add_row({format_double(r.barron), std::to_string(r.L), std::to_string(r.m),
                 std::to_string(r.d), std::to_string(r.n), format_double(r.lambda),
                 format_double(r.delta), r.B ? format_double(*r.B) : "",
                 format_double(r.c), format_double(r.sigma),
                 format_double(r.path_norm), format_double(r.apriori),
                 format_double(r.apost),
                 r.apriori_noisy ? format_double(*r.apriori_noisy) : "",
                 r.noise_gap ? format_double(*r.noise_gap) : "",
                 r.lambda_certified ? "1" : "0", r.B_certified ? "1" : "0"});
    text = csv.str();
  } else {
    json out = bound_report_json(r);
    if (cfg.value("framework", false)) {
      const FrameworkReport fr =
          framework_compare(r.L, r.m, r.d, r.n, r.barron);
      json rows = json::array();
      for (const auto& row : fr.rows)
        rows.push_back({{"norm", row.norm},
                        {"psi", row.psi},
                        {"cert", row.cert},
                        {"lambda_min", row.lambda_min},
                        {"estimation_term", row.estimation_term}});
      out["framework"] = {{"approx_term", fr.approx_term}, {"rows", rows}};
    }
    text = out.dump(2) + "\n";
  }
  std::cout << text;
  write_output(out_dir, format == "csv" ? "bound.csv" : "bound.json", text);
  return 0;
}

int run_experiment_cmd(const std::string& config_path,
                       std::optional<std::uint64_t> seed_override, int jobs,
                       const std::string& out_dir) {
  const std::string config_text = read_file(config_path);
  const ExperimentResult res = run_experiment_from_text(config_text, jobs, seed_override);
  const std::string dir = out_dir.empty() ? "." : out_dir;
  write_output(dir, "results.csv", res.csv);
  write_output(dir, "report.json", res.report_json);
  int failed = 0;
  for (const auto& pt : res.points)
    if (!pt.error.empty()) ++failed;
  std::cout << "experiment: " << res.points.size() << " grid points, " << failed
            << " errored; results in " << dir << "\n";
  return failed == static_cast<int>(res.points.size()) && failed > 0 ? 1 : 0;
}

int run_verify(const std::string& scope) {
  const CheckList checks = verify_scope(scope);
  int failed = 0;
  for (const auto& c : checks) {
    std::cout << (c.pass ? "[ ok ] " : "[FAIL] ") << c.name
              << (c.detail.empty() ? "" : "  (" + c.detail + ")") << "\n";
    if (!c.pass) ++failed;
  }
  std::cout << checks.size() - failed << "/" << checks.size() << " checks passed\n";
  return failed == 0 ? 0 : 1;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"residual-network path-norm toolkit (v" + std::string(kVersion) + ")"};
  app.require_subcommand(1);

  std::string config_path, out_dir, format = "json", model_path, scope = "all";
  std::uint64_t seed_value = 0;
  bool seed_given = false;
  int jobs = 1;

  const auto add_common = [&](CLI::App* sub, bool needs_config) {
    auto* c = sub->add_option("--config", config_path, "JSON config file");
    if (needs_config) c->required()->check(CLI::ExistingFile);
    sub->add_option("--out", out_dir, "output directory");
    sub->add_option("--seed", seed_value, "seed override")
        ->each([&](const std::string&) { seed_given = true; });
    sub->add_option("--jobs", jobs, "parallel grid points")->check(CLI::PositiveNumber);
    sub->add_option("--format", format, "output format")
        ->check(CLI::IsMember({"csv", "json"}));
  };

  CLI::App* norms_cmd = app.add_subcommand("norms", "norm report for a model file");
  norms_cmd->add_option("--model", model_path, "model JSON file")
      ->required()
      ->check(CLI::ExistingFile);
  add_common(norms_cmd, false);

  CLI::App* construct_cmd =
      app.add_subcommand("construct", "lift a two-layer rep into a deep net");
  add_common(construct_cmd, true);

  CLI::App* train_cmd = app.add_subcommand("train", "train the regularized model");
  add_common(train_cmd, true);

  CLI::App* rad_cmd =
      app.add_subcommand("rademacher", "complexity estimates and bounds");
  add_common(rad_cmd, true);

  CLI::App* bound_cmd = app.add_subcommand("bound", "evaluate bound right-hand sides");
  add_common(bound_cmd, true);

  CLI::App* exp_cmd = app.add_subcommand("experiment", "run a seeded grid study");
  add_common(exp_cmd, true);

  CLI::App* verify_cmd = app.add_subcommand("verify", "run check batteries");
  verify_cmd->add_option("scope", scope, "norms|construct|complexity|bounds|all")
      ->check(CLI::IsMember({"norms", "construct", "complexity", "bounds", "all"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  const std::optional<std::uint64_t> seed_override =
      seed_given ? std::optional<std::uint64_t>(seed_value) : std::nullopt;

  try {
    if (norms_cmd->parsed()) return run_norms(model_path, format, out_dir);
    if (construct_cmd->parsed())
      return run_construct(load_config(config_path), seed_override, out_dir);
    if (train_cmd->parsed())
      return run_train(load_config(config_path), seed_override, out_dir);
    if (rad_cmd->parsed())
      return run_rademacher(load_config(config_path), seed_override, format, out_dir);
    if (bound_cmd->parsed())
      return run_bound(load_config(config_path), format, out_dir);
    if (exp_cmd->parsed())
      return run_experiment_cmd(config_path, seed_override, jobs, out_dir);
    if (verify_cmd->parsed()) return run_verify(scope);
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const json::exception& e) {
    std::cerr << "error: config: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}

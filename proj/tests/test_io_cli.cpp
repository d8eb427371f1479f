#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cstdio>
#include <sstream>
#include <string>

#include "respath/experiment.hpp"
#include "respath/io.hpp"
#include "respath/rng.hpp"
#include "respath/targets.hpp"

using namespace respath;

namespace {

ResNetParams sample_net() {
  ResNetParams p = ResNetParams::zeros({2, 3, 2, 2});
  Rng rng(17);
  auto fill = [&](MatrixXd& M) {
    for (int i = 0; i < M.rows(); ++i)
      for (int j = 0; j < M.cols(); ++j) M(i, j) = rng.uniform(-1.0, 1.0);
  };
  fill(p.V);
  for (int l = 0; l < 2; ++l) {
    fill(p.W[l]);
    fill(p.U[l]);
  }
  for (int i = 0; i < 3; ++i) p.u(i) = rng.uniform(-1.0, 1.0);
  return p;
}

} // namespace

TEST_CASE("format_double survives a parse round trip bit-for-bit") {
  for (double v : {0.1, 1.0 / 3.0, 1e-300, 6.02214076e23, -0.0, 14.0}) {
    CHECK(std::stod(format_double(v)) == v);
  }
}

TEST_CASE("resnet model JSON round trip is exact") {
  const ResNetParams p = sample_net();
  const std::string text = model_to_json(p);
  const Model m = model_from_json(text);
  REQUIRE(std::holds_alternative<ResNetParams>(m));
  const ResNetParams& q = std::get<ResNetParams>(m);
  CHECK((q.V - p.V).cwiseAbs().maxCoeff() == 0.0);
  CHECK((q.u - p.u).cwiseAbs().maxCoeff() == 0.0);
  for (int l = 0; l < 2; ++l) {
    CHECK((q.W[l] - p.W[l]).cwiseAbs().maxCoeff() == 0.0);
    CHECK((q.U[l] - p.U[l]).cwiseAbs().maxCoeff() == 0.0);
  }
  // round trip of the serialization itself is stable
  CHECK(model_to_json(q) == text);
}

TEST_CASE("fc model JSON round trip is exact") {
  FcParams p;
  p.d = 2;
  p.m = 3;
  p.L = 3;
  p.W = {MatrixXd::Random(3, 2), MatrixXd::Random(3, 3), MatrixXd::Random(1, 3)};
  const std::string text = model_to_json(p);
  const Model m = model_from_json(text);
  REQUIRE(std::holds_alternative<FcParams>(m));
  const FcParams& q = std::get<FcParams>(m);
  REQUIRE(q.W.size() == 3);
  for (int l = 0; l < 3; ++l)
    CHECK((q.W[l] - p.W[l]).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("model parsing fails closed") {
  CHECK_THROWS_AS(model_from_json("not json"), ParseError);
  CHECK_THROWS_AS(model_from_json("{}"), ParseError);
  CHECK_THROWS_AS(model_from_json(R"({"kind":"cnn","arch":{}})"), ParseError);
  CHECK_THROWS_AS(
      model_from_json(R"({"kind":"resnet","arch":{"d":1,"D":1,"m":1}})"),
      ParseError);
  // structurally inconsistent payloads surface the netcore validation error
  CHECK_THROWS_AS(
      model_from_json(
          R"({"kind":"resnet","arch":{"d":1,"D":1,"m":1,"L":1},
              "V":[[1]],"W":[[[1]]],"U":[[[1]]],"u":[1,2]})"),
      StructuralError);
}

TEST_CASE("rep and mixture JSON round trips") {
  TwoLayerRep rep;
  rep.a.resize(2);
  rep.a << 0.5, -0.25;
  rep.b.resize(2, 3);
  rep.b << 1, 0, 0.125, 0, -1, 0.5;
  const TwoLayerRep back = rep_from_json(rep_to_json(rep));
  CHECK((back.a - rep.a).cwiseAbs().maxCoeff() == 0.0);
  CHECK((back.b - rep.b).cwiseAbs().maxCoeff() == 0.0);
  CHECK_THROWS_AS(rep_from_json(R"({"a":[1]})"), ParseError);

  const BarronMixture t = random_mixture(4, 3, 1.0, 31, true);
  const BarronMixture u = mixture_from_json(mixture_to_json(t));
  CHECK(u.d == t.d);
  CHECK(u.rescale == t.rescale);
  CHECK((u.a - t.a).cwiseAbs().maxCoeff() == 0.0);
  CHECK((u.omega - t.omega).cwiseAbs().maxCoeff() == 0.0);
  CHECK_THROWS_AS(mixture_from_json(R"({"d":2,"atoms":[]})"), ParseError);
  CHECK_THROWS_AS(
      mixture_from_json(R"({"d":2,"atoms":[{"a":1,"omega":[0.5,0.4]}]})"),
      StructuralError); // direction not l1-unit
}

TEST_CASE("CsvWriter emits the documented dialect") {
  CsvWriter w({"a", "b"});
  w.add_row({"1", format_double(1.0 / 3.0)});
  w.add_row({"2", "x"});
  const std::string out = w.str();
  CHECK(out == std::string("a,b\n") + "1," + format_double(1.0 / 3.0) + "\n2,x\n");
  CHECK(out.find("\r") == std::string::npos);
  CHECK(format_double(1.0 / 3.0) == "0.33333333333333331");
  CHECK_THROWS_AS(w.add_row({"only-one"}), StructuralError);
}

TEST_CASE("file helpers and config hashing") {
  const std::string path = "io_test_scratch.txt";
  write_file(path, "hello\n");
  CHECK(read_file(path) == "hello\n");
  CHECK_THROWS_AS(read_file("definitely_missing_file.xyz"), ParseError);
  CHECK(fnv1a_hash("a") != fnv1a_hash("b"));
  CHECK(fnv1a_hash("config") == fnv1a_hash("config"));
  std::remove(path.c_str());
}

TEST_CASE("experiment config parsing fails closed") {
  CHECK_THROWS_AS(parse_experiment_config("{"), ParseError);
  CHECK_THROWS_AS(parse_experiment_config(R"({"seeed":1})"), ParseError);
  CHECK_THROWS_AS(parse_experiment_config(R"({"target":{"dd":3}})"), ParseError);
  CHECK_THROWS_AS(parse_experiment_config(R"({"noise":{"kind":"poisson"}})"),
                  ParseError);
  CHECK_THROWS_AS(parse_experiment_config(R"({"noise":{"kind":"gaussian"}})"),
                  ParseError);
  CHECK_THROWS_AS(parse_experiment_config(R"({"train":{"momentum":0.9}})"),
                  ParseError);
  CHECK_THROWS_AS(parse_experiment_config(R"({"n":[]})"), ParseError);

  const ExperimentConfig cfg = parse_experiment_config(R"({
    "seed": 3, "delta": 0.2, "mc_samples": 500,
    "target": {"d": 4, "K": 6, "coef_scale": 0.5},
    "noise": {"kind": "gaussian", "sigma": 0.3},
    "train": {"epochs": 2, "batch_size": 8, "step_size": 0.02},
    "n": [20, 40], "lambda": 0.5, "L": [2, 3], "m": 4})");
  CHECK(cfg.seed == 3);
  CHECK(cfg.delta == 0.2);
  CHECK(cfg.mc_samples == 500);
  CHECK(cfg.target_d == 4);
  CHECK(cfg.target_K == 6);
  CHECK(cfg.noise.kind == NoiseModel::Kind::Gaussian);
  CHECK(cfg.noise.sigma == 0.3);
  CHECK(cfg.train.epochs == 2);
  CHECK(cfg.n_grid == std::vector<int>{20, 40});
  CHECK(cfg.lambda_grid == std::vector<double>{0.5});
  CHECK(cfg.L_grid == std::vector<int>{2, 3});
  CHECK(cfg.m_grid == std::vector<int>{4});
}

TEST_CASE("experiment runs deterministically regardless of jobs") {
  const std::string config = R"({
    "seed": 11, "delta": 0.1, "mc_samples": 500,
    "target": {"d": 3, "K": 3, "coef_scale": 1.0},
    "train": {"epochs": 2, "batch_size": 8, "step_size": 0.05},
    "n": [20, 30], "lambda": [0.0, 1.0], "L": 2, "m": 3})";
  const ExperimentResult a = run_experiment_from_text(config, 1);
  const ExperimentResult b = run_experiment_from_text(config, 3);
  CHECK(a.csv == b.csv);
  CHECK(a.report_json == b.report_json);

  // header and row count: 4 grid points in n -> lambda -> L -> m order
  std::istringstream is(a.csv);
  std::string line;
  std::getline(is, line);
  CHECK(line ==
        "index,n,lambda,L,m,d,K,delta,seed,train_risk,pop_risk,pop_se,"
        "path_norm,apost_rhs,apriori_rhs,gap,gap_le_apost,error");
  int rows = 0;
  std::vector<std::string> firsts;
  while (std::getline(is, line)) {
    ++rows;
    firsts.push_back(line.substr(0, line.find(',')));
  }
  CHECK(rows == 4);
  CHECK(firsts == std::vector<std::string>{"0", "1", "2", "3"});

  // seed override changes the outcome
  const ExperimentResult c = run_experiment_from_text(config, 1, 999);
  CHECK(c.csv != a.csv);
}

TEST_CASE("experiment grid points capture per-point failures") {
  // m = 0 is structurally invalid; the row must carry the error rather than
  // aborting the sweep
  const std::string config = R"({
    "seed": 5, "mc_samples": 500,
    "train": {"epochs": 1},
    "n": 20, "lambda": 0.0, "L": 2, "m": [3, 0]})";
  const ExperimentResult r = run_experiment_from_text(config, 1);
  std::istringstream is(r.csv);
  std::string header, good, bad;
  std::getline(is, header);
  std::getline(is, good);
  std::getline(is, bad);
  CHECK(good.back() == ',');                           // success row: empty message
  CHECK(bad.find("must be >= 1") != std::string::npos); // failure row carries it
  // dialect safety: rows keep exactly 17 commas even with a message present
  CHECK(std::count(bad.begin(), bad.end(), ',') == 17);
  CHECK(std::count(good.begin(), good.end(), ',') == 17);
}

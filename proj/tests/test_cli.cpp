#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <set>

#include "limecert/dataset.hpp"

using namespace limecert;

namespace {

constexpr int64_t kScale = 10000;

ModelWeights linear_model(std::vector<int64_t> w, int64_t bias) {
  ModelWeights m;
  m.kind = ModelKind::mlp;
  m.scale = kScale;
  m.input_dim = static_cast<uint32_t>(w.size());
  MlpLayer l;
  l.in = m.input_dim;
  l.out = 2;
  l.w.assign(2 * w.size(), 0);
  for (size_t j = 0; j < w.size(); ++j) l.w[w.size() + j] = w[j];
  l.bias = {0, bias};
  m.layers.push_back(std::move(l));
  m.validate();
  return m;
}

// same architecture with the logit rows exchanged: predicts the complement
// class everywhere except exact logit ties
ModelWeights flipped(const ModelWeights& m) {
  ModelWeights f = m;
  MlpLayer& last = f.layers.back();
  for (uint32_t i = 0; i < last.in; ++i) {
    std::swap(last.w[i], last.w[last.in + i]);
  }
  std::swap(last.bias[0], last.bias[1]);
  return f;
}

}  // namespace

TEST_CASE("synth_dataset is seed-deterministic with standard moments") {
  Dataset a = synth_dataset("a", 2000, 3, kScale, 5);
  Dataset b = synth_dataset("b", 2000, 3, kScale, 5);
  Dataset c = synth_dataset("c", 2000, 3, kScale, 6);
  CHECK(a.xs == b.xs);
  CHECK(a.xs != c.xs);

  double sum = 0.0;
  double sumsq = 0.0;
  for (int64_t v : a.xs.a) {
    double x = dequantize(v, kScale);
    sum += x;
    sumsq += x * x;
  }
  double n = static_cast<double>(a.xs.a.size());
  double mean = sum / n;
  double std = std::sqrt(sumsq / n - mean * mean);
  CHECK(std::abs(mean) < 0.05);
  CHECK(std == doctest::Approx(1.0).epsilon(0.05));

  CHECK_THROWS_AS(synth_dataset("x", 0, 3, kScale, 1), std::invalid_argument);
}

TEST_CASE("dataset csv round-trips byte for byte") {
  Dataset ds = synth_dataset("rt", 25, 4, kScale, 9);
  std::string csv = dataset_to_csv(ds);
  Dataset back = dataset_from_csv(csv, kScale);
  CHECK(back.xs == ds.xs);
  CHECK(dataset_to_csv(back) == csv);

  ds.labels.assign(25, 0);
  for (size_t i = 0; i < 25; i += 2) ds.labels[i] = 1;
  std::string labeled = dataset_to_csv(ds);
  Dataset lback = dataset_from_csv(labeled, kScale);
  CHECK(lback.xs == ds.xs);
  CHECK(lback.labels == ds.labels);
  CHECK(dataset_to_csv(lback) == labeled);

  // integer scale 1 prints whole numbers without a decimal point
  Dataset ints;
  ints.scale = 1;
  ints.xs = RawMatrix(1, 2);
  ints.xs.at(0, 0) = -3;
  ints.xs.at(0, 1) = 7;
  std::string icsv = dataset_to_csv(ints);
  CHECK(icsv == "x0,x1\n-3,7\n");
  CHECK(dataset_from_csv(icsv, 1).xs == ints.xs);
}

TEST_CASE("csv rejects malformed input with the offending line") {
  CHECK_THROWS_WITH_AS(dataset_from_csv("", kScale),
                       doctest::Contains("line 1"), std::invalid_argument);
  CHECK_THROWS_WITH_AS(dataset_from_csv("x0,y\n1,2\n", kScale),
                       doctest::Contains("expected column x1"),
                       std::invalid_argument);
  CHECK_THROWS_WITH_AS(dataset_from_csv("x0,x1\n", kScale),
                       doctest::Contains("no data rows"),
                       std::invalid_argument);
  CHECK_THROWS_WITH_AS(dataset_from_csv("x0,x1\n0.1\n", kScale),
                       doctest::Contains("csv line 2: expected 2 fields"),
                       std::invalid_argument);
  CHECK_THROWS_WITH_AS(
      dataset_from_csv("x0\n0.1\n0.12345\n", kScale),
      doctest::Contains("csv line 3"), std::invalid_argument);
  CHECK_THROWS_WITH_AS(dataset_from_csv("x0,label\n0.1,2\n", kScale),
                       doctest::Contains("label must be 0 or 1"),
                       std::invalid_argument);
  CHECK_THROWS_WITH_AS(dataset_from_csv("x0\n1\n", 300),
                       doctest::Contains("power-of-ten"),
                       std::invalid_argument);
}

TEST_CASE("parse_fixed_vector quantizes decimals exactly") {
  CHECK(parse_fixed_vector("0.1,-0.3", kScale) ==
        std::vector<int64_t>{1000, -3000});
  CHECK(parse_fixed_vector("2", kScale) == std::vector<int64_t>{20000});
  CHECK(parse_fixed_vector("+1.5,-0.0001", kScale) ==
        std::vector<int64_t>{15000, -1});
  CHECK(parse_fixed_vector("0.25", 100) == std::vector<int64_t>{25});
  CHECK_THROWS_WITH_AS(parse_fixed_vector("0.12345", kScale),
                       doctest::Contains("more fractional digits"),
                       std::invalid_argument);
  CHECK_THROWS_AS(parse_fixed_vector("1..2", kScale), std::invalid_argument);
  CHECK_THROWS_AS(parse_fixed_vector("abc", kScale), std::invalid_argument);
  CHECK_THROWS_AS(parse_fixed_vector("1 ", kScale), std::invalid_argument);
  CHECK_THROWS_AS(parse_fixed_vector("", kScale), std::invalid_argument);
}

TEST_CASE("all_variants spans the whole grid with unique ids") {
  std::vector<VariantSpec> vs = all_variants();
  REQUIRE(vs.size() == 8);
  std::set<std::string> ids;
  for (const VariantSpec& v : vs) ids.insert(v.id());
  CHECK(ids.size() == 8);
  CHECK(ids.count("UE") == 1);
  CHECK(ids.count("GN-border") == 1);

  LimeConfig base = LimeConfig::defaults_for(2);
  LimeConfig got = VariantSpec{SmplType::gaussian, KrnlType::none, true}.apply(base);
  CHECK(got.smpl_type == SmplType::gaussian);
  CHECK(got.krnl_type == KrnlType::none);
  CHECK(got.border_lime);
  // nothing else moves
  got.smpl_type = base.smpl_type;
  got.krnl_type = base.krnl_type;
  got.border_lime = base.border_lime;
  CHECK(got == base);
}

TEST_CASE("a linear model earns near-perfect surrogate fidelity") {
  // equal-magnitude weights: under uniform perturbations a least-squares fit
  // of a step rotates the recovered normal unless the coordinates enter
  // symmetrically (gaussian perturbations are immune, Stein's lemma)
  ModelWeights m = linear_model({10000, -10000}, 1000);
  LimeConfig cfg = LimeConfig::defaults_for(2);
  // a wide neighborhood and a light penalty keep the surrogate's estimation
  // error (the only error source on a linear target) inside the thresholds
  cfg.n = 8000;
  cfg.alpha_raw = 10;
  cfg.K = 2;
  // a small border step keeps the recentered neighborhood almost centered
  // on the boundary, where the 0.5-crossing of the fit is unbiased
  cfg.delta_raw = 200;
  RawMatrix inputs(3, 2);
  // points exactly on the decision boundary so both classes get sampled
  inputs.a = {0, 1000, 4000, 5000, -8000, -7000};
  FidelityOptions opt;
  opt.n_eval = 800;
  opt.seed = 3;
  std::vector<FidelityResult> results = eval_fidelity(m, cfg, inputs, opt);
  REQUIRE(results.size() == 8);
  for (const FidelityResult& r : results) {
    REQUIRE(r.similarity.size() == 3);
    CHECK_MESSAGE(r.mean >= 0.98, "variant ", r.variant, " mean ", r.mean);
    for (double s : r.similarity) {
      CHECK_MESSAGE(s >= 0.95, "variant ", r.variant, " similarity ", s);
    }
  }
}

TEST_CASE("a constant model is explained with exact fidelity") {
  ModelWeights m = linear_model({0, 0}, -50000);  // always class 0
  LimeConfig cfg = LimeConfig::defaults_for(2);
  cfg.n = 30;
  cfg.K = 1;
  RawMatrix inputs(2, 2);
  inputs.a = {0, 0, 5000, -5000};
  FidelityOptions opt;
  opt.n_eval = 100;
  std::vector<FidelityResult> results = eval_fidelity(m, cfg, inputs, opt);
  for (const FidelityResult& r : results) {
    CHECK(r.mean == 1.0);
    CHECK(r.stddev == 0.0);
    for (double s : r.similarity) CHECK(s == 1.0);
  }
}

TEST_CASE("fidelity output is deterministic") {
  ModelWeights m = linear_model({9000, -5000}, 0);
  LimeConfig cfg = LimeConfig::defaults_for(2);
  cfg.n = 30;
  cfg.K = 1;
  RawMatrix inputs(2, 2);
  inputs.a = {1000, 2000, -1500, 500};
  FidelityOptions opt;
  opt.n_eval = 150;
  opt.seed = 11;
  std::string a = fidelity_to_csv(eval_fidelity(m, cfg, inputs, opt));
  std::string b = fidelity_to_csv(eval_fidelity(m, cfg, inputs, opt));
  CHECK(a == b);
  CHECK(a.rfind("variant,input_index,similarity\n", 0) == 0);
  CHECK(a.find("variant,mean,stddev\n") != std::string::npos);
  CHECK(a.find("GE-border,") != std::string::npos);
}

TEST_CASE("swapping the logit rows barely moves the fidelity measurements") {
  ModelWeights m = linear_model({10000, -8000}, 500);
  ModelWeights f = flipped(m);
  LimeConfig cfg = LimeConfig::defaults_for(2);
  cfg.n = 50;
  cfg.K = 2;
  RawMatrix inputs(2, 2);
  inputs.a = {500, 1500, -2000, -3000};
  FidelityOptions opt;
  opt.n_eval = 300;
  opt.seed = 21;
  std::vector<FidelityResult> orig = eval_fidelity(m, cfg, inputs, opt);
  std::vector<FidelityResult> flip = eval_fidelity(f, cfg, inputs, opt);
  REQUIRE(orig.size() == flip.size());
  for (size_t v = 0; v < orig.size(); ++v) {
    REQUIRE(orig[v].variant == flip[v].variant);
    for (size_t i = 0; i < orig[v].similarity.size(); ++i) {
      double delta =
          std::abs(orig[v].similarity[i] - flip[v].similarity[i]);
      // complementing the labels mirrors the whole weighted problem
      // (w -> -w, b -> 1 - b, v -> -v), so the fitted surrogate predicts
      // the complement and similarity moves only on knife edges
      CHECK(delta <= 0.01);
    }
  }
}

TEST_CASE("timings csv lists phases in order") {
  std::vector<std::pair<std::string, int64_t>> timings = {
      {"prf_stream", 120}, {"lasso_solve", 4500}, {"total", 5000}};
  std::string csv = timings_to_csv(timings);
  CHECK(csv ==
        "phase,us\nprf_stream,120\nlasso_solve,4500\ntotal,5000\n");
}

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "limecert/lime.hpp"
#include "limecert/prf.hpp"
#include "limecert/relation.hpp"
#include "oracle.hpp"

using namespace limecert;

namespace {

constexpr int64_t kScale = 10000;

LimeConfig small_cfg(uint32_t n, uint32_t d, uint32_t K) {
  LimeConfig cfg = LimeConfig::defaults_for(d);
  cfg.n = n;
  cfg.K = K;
  return cfg;
}

// logits (0, w'x + bias): class 1 exactly when w'x + bias > 0
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

RawMatrix random_design(std::mt19937_64& rng, size_t n, size_t d,
                        int64_t spread_raw) {
  RawMatrix z(n, d);
  for (auto& v : z.a) {
    v = static_cast<int64_t>(rng() % (2 * spread_raw + 1)) - spread_raw;
  }
  return z;
}

WeightedDesign design_from(const RawMatrix& x, std::vector<int64_t> y) {
  WeightedDesign design;
  design.x = x;
  design.y = std::move(y);
  // unweighted design: the intercept column is the constant 1
  design.s.assign(design.x.rows, kScale);
  return design;
}

std::vector<std::vector<double>> to_real(const RawMatrix& x) {
  std::vector<std::vector<double>> out(x.rows, std::vector<double>(x.cols));
  for (size_t i = 0; i < x.rows; ++i) {
    for (size_t j = 0; j < x.cols; ++j) {
      out[i][j] = dequantize(x.at(i, j), kScale);
    }
  }
  return out;
}

double dist_to(const std::vector<int64_t>& w_raw,
               const std::vector<double>& ref) {
  double s = 0.0;
  for (size_t j = 0; j < ref.size(); ++j) {
    double diff = dequantize(w_raw[j], kScale) - ref[j];
    s += diff * diff;
  }
  return std::sqrt(s);
}

}  // namespace

TEST_CASE("uniform_delta endpoints and center") {
  CHECK(uniform_delta(1u << 15, 16, 2000) == 0);
  CHECK(uniform_delta(0, 16, 2000) == -2000);
  CHECK(uniform_delta(65535, 16, 2000) == 2000);  // 1999.94 rounds up
  CHECK(uniform_delta(1u << 7, 8, 500) == 0);
  CHECK(uniform_delta(0, 8, 500) == -500);
  // halfway between grid points rounds away from zero
  CHECK(uniform_delta((1u << 15) + 1, 16, 2000) ==
        -uniform_delta((1u << 15) - 1, 16, 2000));
}

TEST_CASE("median limbs perturb nothing and weigh fully") {
  LimeConfig cfg = small_cfg(4, 3, 2);
  const Tables& tables = tables_for(cfg);
  ModelWeights m = linear_model({10000, 0, 0}, 0);
  std::vector<int64_t> x = {3000, -1000, 500};
  std::vector<uint32_t> limbs(cfg.coords_needed(3), 1u << 15);

  for (SmplType st : {SmplType::uniform, SmplType::gaussian}) {
    cfg.smpl_type = st;
    Neighborhood nbh = build_neighborhood(x, m, cfg, tables, limbs);
    for (size_t i = 0; i < cfg.n; ++i) {
      for (size_t j = 0; j < 3; ++j) CHECK(nbh.z.at(i, j) == x[j]);
      CHECK(nbh.pi[i] == kScale);  // exp(0) is exact in the table
      CHECK(nbh.y[i] == infer(m, x));
    }
  }

  cfg.smpl_type = SmplType::uniform;
  cfg.krnl_type = KrnlType::none;
  Neighborhood nbh = build_neighborhood(x, m, cfg, tables, limbs);
  for (int64_t pi : nbh.pi) CHECK(pi == kScale);
}

TEST_CASE("gaussian perturbations have the configured spread") {
  LimeConfig cfg = small_cfg(10, 1, 1);
  cfg.smpl_type = SmplType::gaussian;
  const Tables& tables = tables_for(cfg);
  std::mt19937_64 rng(2024);
  const size_t trials = 10000;
  double sum = 0.0;
  double sumsq = 0.0;
  for (size_t t = 0; t < trials; ++t) {
    uint32_t limb = static_cast<uint32_t>(rng() & 0xffff);
    int64_t delta = fp_mul(cfg.gauss_std_raw, tables.gauss.at(limb), cfg.scale);
    double v = dequantize(delta, kScale);
    sum += v;
    sumsq += v * v;
  }
  double mean = sum / trials;
  double std = std::sqrt(sumsq / trials - mean * mean);
  CHECK(std::abs(mean) < 0.01);
  CHECK(std == doctest::Approx(0.2).epsilon(0.03));
}

TEST_CASE("exponential kernel hits exact table anchors") {
  LimeConfig cfg = small_cfg(4, 2, 1);
  cfg.sigma_raw = 10000;  // bandwidth 1.0
  const Tables& tables = tables_for(cfg);
  std::vector<int64_t> x = {2500, -333};
  CHECK(exponential_kernel(x, x, cfg.sigma_raw, kScale, tables.exp) == kScale);
  // ||x - z|| = sigma puts the key exactly on the exp(-1) grid point
  std::vector<int64_t> z = {2500 + 10000, -333};
  CHECK(exponential_kernel(x, z, cfg.sigma_raw, kScale, tables.exp) == 3679);
  CHECK_THROWS_AS(
      exponential_kernel(x, std::vector<int64_t>{1}, 10000, kScale, tables.exp),
      std::invalid_argument);
}

TEST_CASE("constant labels give the exact null solution") {
  LimeConfig cfg = small_cfg(24, 3, 2);
  cfg.krnl_type = KrnlType::none;
  std::mt19937_64 rng(7);
  RawMatrix z = random_design(rng, 24, 3, 15000);
  std::vector<Label> y(24, 1);
  std::vector<int64_t> pi(24, kScale);
  LassoSolution sol = solve_weighted_lasso(z, y, pi, cfg);
  for (int64_t w : sol.w_hat) CHECK(w == 0);
  CHECK(sol.intercept == kScale);
  CHECK(sol.gap == 0);
  CHECK(sol.primal == 0);
  CHECK(sol.dual == 0);
  for (int64_t v : sol.v_hat) CHECK(v == 0);
}

TEST_CASE("an overwhelming l1 penalty zeroes the coefficients") {
  LimeConfig cfg = small_cfg(40, 4, 2);
  cfg.krnl_type = KrnlType::none;
  cfg.alpha_raw = 1000000;  // 100.0 dominates every correlation
  std::mt19937_64 rng(8);
  RawMatrix z = random_design(rng, 40, 4, 15000);
  std::vector<Label> y(40);
  size_t ones = 0;
  for (auto& l : y) {
    l = static_cast<Label>(rng() & 1);
    ones += l;
  }
  std::vector<int64_t> pi(40, kScale);
  LassoSolution sol = solve_weighted_lasso(z, y, pi, cfg);
  for (int64_t w : sol.w_hat) CHECK(w == 0);
  int64_t mean_raw = quantize(static_cast<double>(ones) / 40.0, kScale);
  CHECK(std::abs(sol.intercept - mean_raw) <= 1);
}

TEST_CASE("planted linear targets are recovered") {
  LimeConfig cfg = small_cfg(60, 4, 4);
  cfg.alpha_raw = 10;  // light shrinkage
  std::mt19937_64 rng(9);
  RawMatrix x = random_design(rng, 60, 4, 15000);
  std::vector<int64_t> w_star = {4000, -9000, 0, 6500};
  int64_t b_star = 2500;
  std::vector<int64_t> y(60);
  for (size_t i = 0; i < 60; ++i) {
    y[i] = fp_dot(x.row(i), w_star, kScale) + b_star;
  }
  LassoSolution sol = solve_lasso_design(design_from(x, y), cfg);
  for (size_t j = 0; j < 4; ++j) {
    CHECK(std::abs(sol.w_hat[j] - w_star[j]) <= 180);  // within 2% of 0.9
  }
  CHECK(std::abs(sol.intercept - b_star) <= 180);
  CHECK(sol.gap <= cfg.epsilon_raw);
}

TEST_CASE("dual_feasible always satisfies the integer feasibility check") {
  std::mt19937_64 rng(10);
  for (int t = 0; t < 200; ++t) {
    size_t n = 8;
    size_t d = 3;
    RawMatrix x = random_design(rng, n, d, 20000);
    std::vector<int64_t> y(n);
    for (auto& v : y) v = static_cast<int64_t>(rng() % 20001) - 10000;
    std::vector<int64_t> w(d);
    for (auto& v : w) v = static_cast<int64_t>(rng() % 8001) - 4000;
    int64_t b = static_cast<int64_t>(rng() % 4001) - 2000;
    int64_t alpha = 100;
    WeightedDesign design = design_from(x, y);
    std::vector<int64_t> v = dual_feasible(design, w, b, alpha, kScale);
    GapEval g = duality_gap(design, w, b, v, alpha, kScale);
    CHECK(g.feasible);
    CHECK(g.worst_abs_feas <= alpha);
  }

  // a zero residual (y = b + Xw exactly) induces the zero dual vector
  RawMatrix x(4, 2);
  x.a = {10000, 0, 0, 10000, 5000, 5000, -10000, 2500};
  std::vector<int64_t> w = {3000, -2000};
  int64_t b = 1000;
  std::vector<int64_t> y(4);
  for (size_t i = 0; i < 4; ++i) y[i] = b + fp_dot(x.row(i), w, kScale);
  WeightedDesign design = design_from(x, y);
  std::vector<int64_t> v = dual_feasible(design, w, b, 100, kScale);
  for (int64_t vi : v) CHECK(vi == 0);
}

TEST_CASE("duality_gap matches a closed-form hand computation at w=0 v=0") {
  RawMatrix x(3, 2);
  x.a = {10000, -5000, 2500, 7500, -10000, 0};
  std::vector<int64_t> y = {10000, 0, 5000};
  int64_t b = 2000;
  std::vector<int64_t> w = {0, 0};
  std::vector<int64_t> v = {0, 0, 0};
  WeightedDesign design = design_from(x, y);
  GapEval g = duality_gap(design, w, b, v, 100, kScale);
  // primal = round(sum (y_i - b)^2 / (2 n scale)), residuals 8000, -2000, 3000
  int64_t ssr = 8000LL * 8000 + 2000LL * 2000 + 3000LL * 3000;
  int64_t expect_primal = (ssr + 3 * kScale) / (2 * 3 * kScale);  // round half up
  CHECK(g.primal == expect_primal);
  CHECK(g.dual == 0);
  CHECK(g.gap == expect_primal);
  CHECK(g.feasible);
  CHECK(g.worst_abs_feas == 0);
}

TEST_CASE("weak duality holds up to rounding for feasible duals") {
  std::mt19937_64 rng(11);
  for (int t = 0; t < 1000; ++t) {
    size_t n = 6;
    size_t d = 2;
    RawMatrix x = random_design(rng, n, d, 20000);
    std::vector<int64_t> y(n);
    for (auto& v : y) v = static_cast<int64_t>(rng() % 20001) - 10000;
    std::vector<int64_t> w(d);
    for (auto& v : w) v = static_cast<int64_t>(rng() % 6001) - 3000;
    int64_t b = static_cast<int64_t>(rng() % 4001) - 2000;
    WeightedDesign design = design_from(x, y);
    std::vector<int64_t> v = dual_feasible(design, w, b, 100, kScale);
    GapEval g = duality_gap(design, w, b, v, 100, kScale);
    CHECK(g.gap >= -2);  // a feasible dual never exceeds the primal
  }
}

TEST_CASE("emitted solutions always certify") {
  std::mt19937_64 rng(12);
  for (int t = 0; t < 50; ++t) {
    LimeConfig cfg = small_cfg(30, 4, 2);
    cfg.krnl_type = (t % 2 == 0) ? KrnlType::exponential : KrnlType::none;
    RawMatrix z = random_design(rng, 30, 4, 12000);
    std::vector<Label> y(30);
    for (auto& l : y) l = static_cast<Label>(rng() & 1);
    std::vector<int64_t> pi(30);
    for (auto& p : pi) {
      p = (cfg.krnl_type == KrnlType::none)
              ? kScale
              : static_cast<int64_t>(rng() % 9001) + 1000;
    }
    LassoSolution sol = solve_weighted_lasso(z, y, pi, cfg);
    WeightedDesign design;
    {
      Neighborhood nbh;
      nbh.z = z;
      nbh.y = y;
      nbh.pi = pi;
      design = weighted_design(nbh, cfg.scale);
    }
    GapEval g = duality_gap(design, sol.w_hat, sol.intercept, sol.v_hat,
                            cfg.alpha_raw, cfg.scale);
    CHECK(g.feasible);
    CHECK(g.gap <= cfg.epsilon_raw);
    CHECK(g.gap == sol.gap);
  }
}

TEST_CASE("solve_weighted_lasso equals the two-step pipeline bit for bit") {
  LimeConfig cfg = small_cfg(25, 3, 2);
  std::mt19937_64 rng(13);
  RawMatrix z = random_design(rng, 25, 3, 12000);
  std::vector<Label> y(25);
  for (auto& l : y) l = static_cast<Label>(rng() & 1);
  std::vector<int64_t> pi(25);
  for (auto& p : pi) p = static_cast<int64_t>(rng() % 9001) + 1000;

  Neighborhood nbh;
  nbh.z = z;
  nbh.y = y;
  nbh.pi = pi;
  LassoSolution a = solve_lasso_design(weighted_design(nbh, cfg.scale), cfg);
  LassoSolution b = solve_weighted_lasso(z, y, pi, cfg);
  CHECK(a == b);
}

TEST_CASE("top_k ordering, ties, and oracle agreement") {
  std::vector<int64_t> w = {1000, -9000, 5000};
  Explanation e = top_k(w, 2);
  REQUIRE(e.entries.size() == 2);
  CHECK(e.entries[0].index == 1);
  CHECK(e.entries[0].value == -9000);
  CHECK(e.entries[1].index == 2);
  CHECK(e.entries[1].value == 5000);

  std::vector<int64_t> zeros = {0, 0, 0};
  Explanation ez = top_k(zeros, 2);
  CHECK(ez.entries[0].index == 0);  // ties resolve by ascending index
  CHECK(ez.entries[1].index == 1);

  CHECK_THROWS_AS(top_k(std::vector<int64_t>{1}, 2), std::invalid_argument);

  std::mt19937_64 rng(14);
  for (int t = 0; t < 1000; ++t) {
    size_t d = 1 + rng() % 12;
    std::vector<int64_t> v(d);
    for (auto& x : v) x = static_cast<int64_t>(rng() % 2001) - 1000;
    uint32_t K = 1 + static_cast<uint32_t>(rng() % d);
    Explanation got = top_k(v, K);

    std::vector<size_t> order(d);
    for (size_t j = 0; j < d; ++j) order[j] = j;
    std::stable_sort(order.begin(), order.end(), [&](size_t a, size_t b) {
      return std::abs(v[a]) > std::abs(v[b]);
    });
    REQUIRE(got.entries.size() == K);
    for (uint32_t k = 0; k < K; ++k) {
      CHECK(got.entries[k].index == order[k]);
      CHECK(got.entries[k].value == v[order[k]]);
    }
  }
}

TEST_CASE("border search lands on the closest flipped grid point") {
  LimeConfig cfg = small_cfg(4, 2, 1);
  cfg.border_lime = true;
  cfg.m = 1;
  cfg.delta_raw = 1000;
  cfg.T = 250;
  const Tables& tables = tables_for(cfg);

  // hunt for a limb whose inverse-CDF entry is exactly 1.0; the table steps
  // by ~0.6 raw units near that probability so one must exist
  uint32_t u_one = 0;
  bool found = false;
  for (uint32_t u = 54000; u < 56500; ++u) {
    if (tables.gauss.at(u) == 10000) {
      u_one = u;
      found = true;
      break;
    }
  }
  REQUIRE(found);
  uint32_t u_zero = 1u << 15;
  REQUIRE(tables.gauss.at(u_zero) == 0);

  ModelWeights m = linear_model({10000, 0}, 0);  // class 1 iff x0 > 0
  std::vector<uint32_t> dir = {u_one, u_zero};   // unit step along +x0

  SUBCASE("flip five steps out") {
    std::vector<int64_t> x = {-4500, 0};
    BorderSearch bs = find_opposite_point(x, m, cfg, tables, dir);
    CHECK(bs.flipped);
    CHECK(bs.step == 5);
    CHECK(bs.direction == 0);
    CHECK(bs.x_border == std::vector<int64_t>{500, 0});
  }
  SUBCASE("flip on the first ring") {
    std::vector<int64_t> x = {-500, 0};
    BorderSearch bs = find_opposite_point(x, m, cfg, tables, dir);
    CHECK(bs.flipped);
    CHECK(bs.step == 1);
    CHECK(bs.x_border == std::vector<int64_t>{500, 0});
  }
  SUBCASE("no reachable flip returns the query point") {
    std::vector<int64_t> x = {-400000, 0};  // 40 > T * delta = 25
    BorderSearch bs = find_opposite_point(x, m, cfg, tables, dir);
    CHECK(!bs.flipped);
    CHECK(bs.x_border == x);
  }
}

TEST_CASE("explain is deterministic and consistent with its parts") {
  LimeConfig cfg = small_cfg(40, 3, 2);
  ModelWeights m = linear_model({8000, -6000, 2000}, 500);
  std::vector<int64_t> x = {1200, -300, 2200};
  FieldElement key = FieldElement::from_u64(42);
  std::vector<FieldElement> digests =
      prf_stream(key, digests_for(cfg, x.size()));
  const Tables& tables = tables_for(cfg);

  ExplainResult a = explain(x, m, cfg, tables, digests);
  ExplainResult b = explain(x, m, cfg, tables, digests);
  CHECK(a.o == b.o);
  CHECK(a.e == b.e);
  CHECK(a.nbh == b.nbh);
  CHECK(a.sol == b.sol);
  CHECK(a.x_border == b.x_border);

  // without border search the limb stream feeds the neighborhood from limb 0
  std::vector<uint32_t> limbs =
      uniform_samples(digests, cfg.b, cfg.coords_needed(x.size()));
  Neighborhood direct = build_neighborhood(x, m, cfg, tables, limbs);
  CHECK(a.nbh == direct);
  CHECK(a.x_border.empty());
  CHECK(a.o == infer(m, x));

  // every reported entry is literally a coefficient of the fitted surrogate
  REQUIRE(a.e.entries.size() == cfg.K);
  for (const auto& entry : a.e.entries) {
    CHECK(entry.value == a.sol.w_hat[entry.index]);
  }
  CHECK(a.e == top_k(a.sol.w_hat, cfg.K));
}

TEST_CASE("explain handles the full-size configuration") {
  LimeConfig cfg = LimeConfig::defaults_for(14);
  ModelWeights m;
  {
    ArchSpec arch;
    arch.kind = ModelKind::mlp;
    arch.input_dim = 14;
    arch.hidden = {16, 16};
    m = synthesize_model(arch, kScale, 99);
  }
  std::vector<int64_t> x(14);
  std::mt19937_64 rng(15);
  for (auto& v : x) v = static_cast<int64_t>(rng() % 20001) - 10000;
  std::vector<FieldElement> digests =
      prf_stream(FieldElement::from_u64(7), digests_for(cfg, 14));
  ExplainResult res = explain(x, m, cfg, tables_for(cfg), digests);
  CHECK(res.e.entries.size() == 5);
  CHECK(res.sol.gap <= cfg.epsilon_raw);
  CHECK(res.nbh.z.rows == cfg.n);
}

TEST_CASE("tighter gap targets move the solution toward the optimum") {
  std::mt19937_64 rng(16);
  int improved_or_equal = 0;
  for (int t = 0; t < 20; ++t) {
    LimeConfig cfg = small_cfg(30, 5, 3);
    RawMatrix z = random_design(rng, 30, 5, 12000);
    std::vector<Label> y(30);
    for (auto& l : y) l = static_cast<Label>(rng() & 1);
    std::vector<int64_t> pi(30, kScale);
    Neighborhood nbh;
    nbh.z = z;
    nbh.y = y;
    nbh.pi = pi;
    WeightedDesign design = weighted_design(nbh, cfg.scale);

    LassoSolution loose = solve_lasso_design(design, cfg, 5e-4);
    LassoSolution tight = solve_lasso_design(design, cfg, 5e-6);

    std::vector<double> yr(design.y.size());
    for (size_t i = 0; i < yr.size(); ++i) {
      yr[i] = dequantize(design.y[i], kScale);
    }
    oracle::LassoFit ref = oracle::fista_lasso(
        to_real(design.x), yr, dequantize(cfg.alpha_raw, kScale), 1e-9);
    double d_loose = dist_to(loose.w_hat, ref.w);
    double d_tight = dist_to(tight.w_hat, ref.w);
    if (d_tight <= d_loose + 1e-3) ++improved_or_equal;
  }
  CHECK(improved_or_equal == 20);
}

TEST_CASE("an exhausted sweep budget raises SolverError") {
  LimeConfig cfg = small_cfg(30, 5, 3);
  cfg.max_sweeps = 1;
  std::mt19937_64 rng(17);
  RawMatrix z = random_design(rng, 30, 5, 12000);
  std::vector<Label> y(30);
  for (auto& l : y) l = static_cast<Label>(rng() & 1);
  std::vector<int64_t> pi(30, kScale);
  CHECK_THROWS_AS(solve_weighted_lasso(z, y, pi, cfg, 1e-12), SolverError);
}

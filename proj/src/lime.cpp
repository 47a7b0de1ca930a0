#include "limecert/lime.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>

#include "limecert/prf.hpp"

namespace limecert {

namespace {

int64_t us_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration_cast<std::chrono::microseconds>(
             std::chrono::steady_clock::now() - t0)
      .count();
}

}  // namespace

int64_t uniform_delta(uint32_t limb, uint32_t bits, int64_t half_edge_raw) {
  int64_t centered = static_cast<int64_t>(limb) - (int64_t{1} << (bits - 1));
  return round_div_half_away(static_cast<int128>(centered) * half_edge_raw,
                             int64_t{1} << (bits - 1));
}

int64_t exponential_kernel(std::span<const int64_t> x,
                           std::span<const int64_t> z, int64_t sigma_raw,
                           int64_t scale, const LookupTable& exp_table) {
  if (x.size() != z.size()) {
    throw std::invalid_argument("exponential_kernel: size mismatch");
  }
  std::vector<int64_t> diff(x.size());
  for (size_t j = 0; j < x.size(); ++j) diff[j] = x[j] - z[j];
  int64_t dist2 = fp_dot(diff, diff, scale);
  int64_t sigma2 = fp_mul(sigma_raw, sigma_raw, scale);
  int64_t key = -fp_div(dist2, sigma2, scale);
  return exp_table.lookup_key(key);
}

Neighborhood build_neighborhood(std::span<const int64_t> center,
                                const ModelWeights& model,
                                const LimeConfig& cfg, const Tables& tables,
                                std::span<const uint32_t> limbs) {
  size_t d = center.size();
  if (limbs.size() < size_t{cfg.n} * d) {
    throw std::invalid_argument("build_neighborhood: not enough samples");
  }
  Neighborhood nbh;
  nbh.z = RawMatrix(cfg.n, d);
  for (size_t i = 0; i < cfg.n; ++i) {
    for (size_t j = 0; j < d; ++j) {
      uint32_t limb = limbs[i * d + j];
      int64_t delta;
      if (cfg.smpl_type == SmplType::uniform) {
        delta = uniform_delta(limb, cfg.b, cfg.half_edge_raw);
      } else {
        delta = fp_mul(cfg.gauss_std_raw, tables.gauss.at(limb), cfg.scale);
      }
      nbh.z.at(i, j) = center[j] + delta;
    }
  }
  nbh.y = infer_batch(model, nbh.z);
  nbh.pi.resize(cfg.n);
  for (size_t i = 0; i < cfg.n; ++i) {
    nbh.pi[i] = (cfg.krnl_type == KrnlType::exponential)
                    ? exponential_kernel(center, nbh.z.row(i), cfg.sigma_raw,
                                         cfg.scale, tables.exp)
                    : cfg.scale;
  }
  return nbh;
}

WeightedDesign weighted_design(const Neighborhood& nbh, int64_t scale) {
  size_t n = nbh.z.rows;
  size_t d = nbh.z.cols;
  WeightedDesign design;
  design.x = RawMatrix(n, d);
  design.y.resize(n);
  design.s.resize(n);
  for (size_t i = 0; i < n; ++i) {
    int64_t sq = fp_sqrt(nbh.pi[i], scale);
    for (size_t j = 0; j < d; ++j) {
      design.x.at(i, j) = fp_mul(sq, nbh.z.at(i, j), scale);
    }
    // labels in {0,1} make sqrt(pi)*y exact: either 0 or sq itself
    design.y[i] = fp_mul(sq, static_cast<int64_t>(nbh.y[i]) * scale, scale);
    design.s[i] = sq;
  }
  return design;
}

GapEval duality_gap(const WeightedDesign& design,
                    std::span<const int64_t> w_raw, int64_t intercept_raw,
                    std::span<const int64_t> v_raw, int64_t alpha_raw,
                    int64_t scale) {
  size_t n = design.x.rows;
  size_t d = design.x.cols;
  if (w_raw.size() != d || v_raw.size() != n || design.y.size() != n ||
      design.s.size() != n) {
    throw std::invalid_argument("duality_gap: dimension mismatch");
  }
  int64_t sv = scale * scale;

  // primal: (1/2n) * sum r_i^2 + alpha * ||w||_1 over the fixed-point
  // residuals r_i = y'_i - b * s_i - <x_i, w>
  int128 ssr = 0;
  for (size_t i = 0; i < n; ++i) {
    int64_t r = design.y[i] - fp_mul(intercept_raw, design.s[i], scale) -
                fp_dot(design.x.row(i), w_raw, scale);
    ssr += static_cast<int128>(r) * r;
  }
  int128 l1 = 0;
  for (int64_t w : w_raw) l1 += (w >= 0) ? w : -static_cast<int128>(w);
  int64_t primal =
      round_div_half_away(ssr, static_cast<int128>(2) * n * scale) +
      round_div_half_away(static_cast<int128>(alpha_raw) * l1, scale);

  // dual: -(n/2) ||v||^2 + <v, y' - b s>, evaluated with one terminal rounding
  int128 a = 0;
  int128 bsum = 0;
  for (size_t i = 0; i < n; ++i) {
    int64_t yb = design.y[i] - fp_mul(intercept_raw, design.s[i], scale);
    a += static_cast<int128>(v_raw[i]) * yb;
    bsum += static_cast<int128>(v_raw[i]) * v_raw[i];
  }
  int128 num = 2 * a * sv - static_cast<int128>(n) * bsum * scale;
  int128 den = static_cast<int128>(2) * sv * sv;
  int64_t dual = round_div_half_away(num, den);

  GapEval g;
  g.primal = primal;
  g.dual = dual;
  g.gap = primal - dual;
  g.worst_abs_feas = 0;
  for (size_t j = 0; j < d; ++j) {
    int128 fj = 0;
    for (size_t i = 0; i < n; ++i) {
      fj += static_cast<int128>(design.x.at(i, j)) * v_raw[i];
    }
    int64_t f = round_div_half_away(fj, sv);
    int64_t af = (f >= 0) ? f : -f;
    if (af > g.worst_abs_feas) g.worst_abs_feas = af;
  }
  g.feasible = g.worst_abs_feas <= alpha_raw;
  return g;
}

std::vector<int64_t> dual_feasible(const WeightedDesign& design,
                                   std::span<const int64_t> w_raw,
                                   int64_t intercept_raw, int64_t alpha_raw,
                                   int64_t scale) {
  size_t n = design.x.rows;
  size_t d = design.x.cols;
  int64_t sv = scale * scale;

  // residual r = y' - b s - Xw at base scale; the canonical dual candidate is
  // r/n, quantized onto the dual scale
  std::vector<int64_t> r(n);
  for (size_t i = 0; i < n; ++i) {
    r[i] = design.y[i] - fp_mul(intercept_raw, design.s[i], scale) -
           fp_dot(design.x.row(i), w_raw, scale);
  }
  std::vector<int64_t> v(n);
  for (size_t i = 0; i < n; ++i) {
    v[i] = round_div_half_away(static_cast<int128>(r[i]) * scale,
                               static_cast<int128>(n));
  }

  auto worst_feas = [&](const std::vector<int64_t>& vv) -> int64_t {
    int64_t worst = 0;
    for (size_t j = 0; j < d; ++j) {
      int128 fj = 0;
      for (size_t i = 0; i < n; ++i) {
        fj += static_cast<int128>(design.x.at(i, j)) * vv[i];
      }
      int64_t f = round_div_half_away(fj, sv);
      int64_t af = (f >= 0) ? f : -f;
      if (af > worst) worst = af;
    }
    return worst;
  };

  // cap ||X^T v||oo at alpha, then repair any residual rounding overshoot
  // with multiplicative shrinks under the exact integer check
  for (int pass = 0; pass < 32; ++pass) {
    int64_t worst = worst_feas(v);
    if (worst <= alpha_raw) break;
    if (pass == 31) {
      std::fill(v.begin(), v.end(), 0);
      break;
    }
    for (size_t i = 0; i < n; ++i) {
      v[i] = round_div_half_away(static_cast<int128>(v[i]) * alpha_raw, worst);
    }
  }

  // pick the sign with the larger dual objective; both are feasible
  auto dual_of = [&](const std::vector<int64_t>& vv) -> int64_t {
    int128 a = 0;
    int128 bsum = 0;
    for (size_t i = 0; i < n; ++i) {
      int64_t yb = design.y[i] - fp_mul(intercept_raw, design.s[i], scale);
      a += static_cast<int128>(vv[i]) * yb;
      bsum += static_cast<int128>(vv[i]) * vv[i];
    }
    int128 num = 2 * a * sv - static_cast<int128>(n) * bsum * scale;
    return round_div_half_away(num, static_cast<int128>(2) * sv * sv);
  };
  std::vector<int64_t> neg(n);
  for (size_t i = 0; i < n; ++i) neg[i] = -v[i];
  if (dual_of(neg) > dual_of(v)) return neg;
  return v;
}

namespace {

struct CdResult {
  std::vector<double> w;
  double intercept = 0.0;
  double gap = 0.0;
  uint32_t sweeps = 0;
  bool converged = false;
};

// cyclic coordinate descent with soft-thresholding after profiling out the
// intercept: b enters as b * s_i, so the optimal b for any w is the
// s-projection of the residual, and removing that projection from y and
// every column leaves a standard lasso. Plain doubles, since only the
// quantized result enters the protocol and it is re-certified in integer
// arithmetic afterwards.
CdResult cd_lasso(const WeightedDesign& design, int64_t scale, double alpha,
                  double gap_target, uint32_t max_sweeps) {
  size_t n = design.x.rows;
  size_t d = design.x.cols;
  std::vector<double> X(n * d);
  std::vector<double> y(n);
  std::vector<double> S(n);
  for (size_t i = 0; i < n; ++i) {
    for (size_t j = 0; j < d; ++j) {
      X[i * d + j] = dequantize(design.x.at(i, j), scale);
    }
    y[i] = dequantize(design.y[i], scale);
    S[i] = dequantize(design.s[i], scale);
  }
  double ss = 0.0;
  for (size_t i = 0; i < n; ++i) ss += S[i] * S[i];
  if (ss <= 0.0) {
    throw SolverError("every kernel weight quantized to zero",
                      std::numeric_limits<double>::infinity());
  }
  std::vector<double> xm(d, 0.0);
  double ym = 0.0;
  for (size_t i = 0; i < n; ++i) {
    for (size_t j = 0; j < d; ++j) xm[j] += S[i] * X[i * d + j];
    ym += S[i] * y[i];
  }
  for (size_t j = 0; j < d; ++j) xm[j] /= ss;
  ym /= ss;
  std::vector<double> xc(n * d);
  std::vector<double> yc(n);
  std::vector<double> colsq(d, 0.0);
  for (size_t i = 0; i < n; ++i) {
    for (size_t j = 0; j < d; ++j) {
      double v = X[i * d + j] - S[i] * xm[j];
      xc[i * d + j] = v;
      colsq[j] += v * v;
    }
    yc[i] = y[i] - S[i] * ym;
  }

  CdResult res;
  res.w.assign(d, 0.0);
  std::vector<double> r = yc;
  double thresh = static_cast<double>(n) * alpha;
  for (uint32_t sweep = 1; sweep <= max_sweeps; ++sweep) {
    for (size_t j = 0; j < d; ++j) {
      if (colsq[j] == 0.0) continue;
      double g = colsq[j] * res.w[j];
      for (size_t i = 0; i < n; ++i) g += xc[i * d + j] * r[i];
      double wn = 0.0;
      if (g > thresh) {
        wn = (g - thresh) / colsq[j];
      } else if (g < -thresh) {
        wn = (g + thresh) / colsq[j];
      }
      double delta = wn - res.w[j];
      if (delta != 0.0) {
        for (size_t i = 0; i < n; ++i) r[i] -= xc[i * d + j] * delta;
        res.w[j] = wn;
      }
    }
    // duality gap of the centered problem as the stopping rule
    double rr = 0.0;
    for (size_t i = 0; i < n; ++i) rr += r[i] * r[i];
    double l1 = 0.0;
    for (size_t j = 0; j < d; ++j) l1 += std::fabs(res.w[j]);
    double primal = rr / (2.0 * static_cast<double>(n)) + alpha * l1;
    double worst = 0.0;
    for (size_t j = 0; j < d; ++j) {
      double fj = 0.0;
      for (size_t i = 0; i < n; ++i) fj += xc[i * d + j] * r[i];
      worst = std::max(worst, std::fabs(fj));
    }
    double s = 1.0 / static_cast<double>(n);
    if (worst > 0.0) s = std::min(s, alpha / worst);
    double vr = 0.0;  // <v, yc> with v = s*r
    for (size_t i = 0; i < n; ++i) vr += s * r[i] * yc[i];
    double dual = -0.5 * static_cast<double>(n) * s * s * rr + vr;
    res.gap = primal - dual;
    res.sweeps = sweep;
    if (res.gap <= gap_target) {
      res.converged = true;
      break;
    }
  }
  res.intercept = ym;
  for (size_t j = 0; j < d; ++j) res.intercept -= xm[j] * res.w[j];
  return res;
}

}  // namespace

LassoSolution solve_lasso_design(const WeightedDesign& design,
                                 const LimeConfig& cfg, double gap_target) {
  double eps = dequantize(cfg.epsilon_raw, cfg.scale);
  double target = (gap_target > 0.0) ? gap_target : eps / 2.0;
  double alpha = dequantize(cfg.alpha_raw, cfg.scale);

  double last_gap = 0.0;
  uint32_t total_sweeps = 0;
  for (int attempt = 0; attempt < 4; ++attempt) {
    CdResult cd = cd_lasso(design, cfg.scale, alpha, target, cfg.max_sweeps);
    total_sweeps += cd.sweeps;
    last_gap = cd.gap;
    if (!cd.converged) {
      throw SolverError(
          "lasso solver did not reach gap " + std::to_string(target) +
              " within " + std::to_string(cfg.max_sweeps) + " sweeps",
          cd.gap);
    }
    LassoSolution sol;
    sol.w_hat.resize(design.x.cols);
    for (size_t j = 0; j < design.x.cols; ++j) {
      sol.w_hat[j] = quantize(cd.w[j], cfg.scale);
    }
    sol.intercept = quantize(cd.intercept, cfg.scale);
    sol.v_hat = dual_feasible(design, sol.w_hat, sol.intercept, cfg.alpha_raw,
                              cfg.scale);
    GapEval g = duality_gap(design, sol.w_hat, sol.intercept, sol.v_hat,
                            cfg.alpha_raw, cfg.scale);
    sol.primal = g.primal;
    sol.dual = g.dual;
    sol.gap = g.gap;
    sol.sweeps = total_sweeps;
    if (g.feasible && g.gap <= cfg.epsilon_raw) return sol;
    // quantization ate the slack; solve tighter and re-certify
    target /= 4.0;
    last_gap = dequantize(g.gap, cfg.scale);
  }
  throw SolverError(
      "lasso certificate failed integer re-check after retries (gap " +
          std::to_string(last_gap) + ")",
      last_gap);
}

LassoSolution solve_weighted_lasso(const RawMatrix& z,
                                   std::span<const Label> y,
                                   std::span<const int64_t> pi,
                                   const LimeConfig& cfg, double gap_target) {
  if (z.rows != y.size() || z.rows != pi.size()) {
    throw std::invalid_argument("solve_weighted_lasso: row count mismatch");
  }
  Neighborhood nbh;
  nbh.z = z;
  nbh.y.assign(y.begin(), y.end());
  nbh.pi.assign(pi.begin(), pi.end());
  return solve_lasso_design(weighted_design(nbh, cfg.scale), cfg, gap_target);
}

Explanation top_k(std::span<const int64_t> w_raw, uint32_t K) {
  if (K > w_raw.size()) {
    throw std::invalid_argument("top_k: K exceeds coefficient count");
  }
  std::vector<Explanation::Entry> all(w_raw.size());
  for (size_t j = 0; j < w_raw.size(); ++j) {
    all[j].index = static_cast<uint32_t>(j);
    all[j].value = w_raw[j];
  }
  std::sort(all.begin(), all.end(),
            [](const Explanation::Entry& a, const Explanation::Entry& b) {
              int64_t aa = (a.value >= 0) ? a.value : -a.value;
              int64_t ab = (b.value >= 0) ? b.value : -b.value;
              if (aa != ab) return aa > ab;
              return a.index < b.index;
            });
  Explanation e;
  e.entries.assign(all.begin(), all.begin() + K);
  return e;
}

BorderSearch find_opposite_point(std::span<const int64_t> x,
                                 const ModelWeights& model,
                                 const LimeConfig& cfg, const Tables& tables,
                                 std::span<const uint32_t> dir_limbs) {
  size_t d = x.size();
  if (dir_limbs.size() < size_t{cfg.m} * d) {
    throw std::invalid_argument("find_opposite_point: not enough samples");
  }
  Label o = infer(model, x);

  // gaussian step vectors normalized through the reciprocal-sqrt table;
  // a zero step vector normalizes to zero and simply never flips
  RawMatrix units(cfg.m, d);
  for (size_t i = 0; i < cfg.m; ++i) {
    std::vector<int64_t> s(d);
    for (size_t j = 0; j < d; ++j) s[j] = tables.gauss.at(dir_limbs[i * d + j]);
    int64_t norm2 = fp_dot(s, s, cfg.scale);
    int64_t rs = (norm2 == 0) ? 0 : tables.recip.lookup_key(norm2);
    for (size_t j = 0; j < d; ++j) {
      units.at(i, j) = fp_mul(s[j], rs, cfg.scale);
    }
  }

  BorderSearch bs;
  bs.x_border.assign(x.begin(), x.end());
  std::vector<int64_t> point(d);
  // reverse scan: visit k = T..1 so the final overwrite is the closest flip;
  // within one ring, later directions win
  for (uint32_t k = cfg.T; k >= 1; --k) {
    int64_t step_raw = static_cast<int64_t>(k) * cfg.delta_raw;
    for (uint32_t i = 0; i < cfg.m; ++i) {
      for (size_t j = 0; j < d; ++j) {
        point[j] = x[j] + fp_mul(step_raw, units.at(i, j), cfg.scale);
      }
      if (infer(model, point) != o) {
        bs.x_border = point;
        bs.flipped = true;
        bs.direction = i;
        bs.step = k;
      }
    }
  }
  return bs;
}

ExplainResult explain(std::span<const int64_t> x, const ModelWeights& model,
                      const LimeConfig& cfg, const Tables& tables,
                      const std::vector<FieldElement>& digests) {
  size_t d = x.size();
  ExplainResult res;
  auto t0 = std::chrono::steady_clock::now();

  std::vector<uint32_t> limbs =
      uniform_samples(digests, cfg.b, cfg.coords_needed(d));
  size_t offset = 0;
  std::span<const int64_t> center = x;
  if (cfg.border_lime) {
    BorderSearch bs = find_opposite_point(
        x, model, cfg, tables, std::span<const uint32_t>(limbs).subspan(0, size_t{cfg.m} * d));
    res.x_border = bs.x_border;
    center = res.x_border;
    offset = size_t{cfg.m} * d;  // fresh randomness for the neighborhood
  }
  res.timings_us.emplace_back("border_search", us_since(t0));

  t0 = std::chrono::steady_clock::now();
  res.o = infer(model, x);
  res.nbh = build_neighborhood(
      center, model, cfg, tables,
      std::span<const uint32_t>(limbs).subspan(offset));
  res.timings_us.emplace_back("sampling_and_inference", us_since(t0));

  t0 = std::chrono::steady_clock::now();
  WeightedDesign design = weighted_design(res.nbh, cfg.scale);
  res.sol = solve_lasso_design(design, cfg);
  res.timings_us.emplace_back("lasso_solve", us_since(t0));

  t0 = std::chrono::steady_clock::now();
  res.e = top_k(res.sol.w_hat, cfg.K);
  res.timings_us.emplace_back("top_k", us_since(t0));
  return res;
}

}  // namespace limecert

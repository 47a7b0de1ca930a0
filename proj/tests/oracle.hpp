// Reference implementations the tests trust: an independent proximal-gradient
// LASSO solver, erf-based normal CDF, and classical test statistics. Nothing
// here shares code with the library under test.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

namespace oracle {

inline double normal_cdf(double x) {
  return 0.5 * std::erfc(-x / std::sqrt(2.0));
}

// sup_t |F_emp(t) - F(t)| for F = standard normal
inline double ks_statistic(std::vector<double> samples) {
  std::sort(samples.begin(), samples.end());
  const double n = static_cast<double>(samples.size());
  double worst = 0.0;
  for (size_t i = 0; i < samples.size(); ++i) {
    double f = normal_cdf(samples[i]);
    worst = std::max(worst, std::abs(f - static_cast<double>(i) / n));
    worst = std::max(worst, std::abs(static_cast<double>(i + 1) / n - f));
  }
  return worst;
}

inline double chi_square_statistic(const std::vector<uint64_t>& counts,
                                   double expected) {
  double stat = 0.0;
  for (uint64_t c : counts) {
    double diff = static_cast<double>(c) - expected;
    stat += diff * diff / expected;
  }
  return stat;
}

// Wilson-Hilferty approximation of the upper chi-square quantile at normal
// deviate z (z = 2.326 for the 1% tail); accurate to a fraction of a percent
// for df >= 30, which is all the tests need.
inline double chi_square_quantile(double df, double z) {
  double a = 2.0 / (9.0 * df);
  double t = 1.0 - a + z * std::sqrt(a);
  return df * t * t * t;
}

struct LassoFit {
  std::vector<double> w;
  double intercept = 0.0;
  double gap = 0.0;
  int iters = 0;
};

// Proximal gradient (FISTA) for
//   min_{w,b} (1/2n) ||y - b - X w||^2 + alpha ||w||_1
// with the intercept eliminated by centering. Step size from a power-iteration
// bound on ||X_c||^2; stops when the duality gap reaches gap_tol.
inline LassoFit fista_lasso(const std::vector<std::vector<double>>& x,
                            const std::vector<double>& y, double alpha,
                            double gap_tol, int max_iters = 200000) {
  const size_t n = x.size();
  if (n == 0 || y.size() != n) throw std::invalid_argument("fista: bad shape");
  const size_t d = x[0].size();

  std::vector<double> col_mean(d, 0.0);
  double y_mean = 0.0;
  for (size_t i = 0; i < n; ++i) {
    for (size_t j = 0; j < d; ++j) col_mean[j] += x[i][j];
    y_mean += y[i];
  }
  for (size_t j = 0; j < d; ++j) col_mean[j] /= static_cast<double>(n);
  y_mean /= static_cast<double>(n);

  std::vector<std::vector<double>> xc(n, std::vector<double>(d));
  std::vector<double> yc(n);
  for (size_t i = 0; i < n; ++i) {
    for (size_t j = 0; j < d; ++j) xc[i][j] = x[i][j] - col_mean[j];
    yc[i] = y[i] - y_mean;
  }

  // spectral norm of (1/n) Xc^T Xc via power iteration
  std::vector<double> v(d, 1.0);
  double lam = 0.0;
  for (int it = 0; it < 300; ++it) {
    std::vector<double> xv(n, 0.0);
    for (size_t i = 0; i < n; ++i) {
      for (size_t j = 0; j < d; ++j) xv[i] += xc[i][j] * v[j];
    }
    std::vector<double> nv(d, 0.0);
    for (size_t i = 0; i < n; ++i) {
      for (size_t j = 0; j < d; ++j) nv[j] += xc[i][j] * xv[i];
    }
    double norm = 0.0;
    for (size_t j = 0; j < d; ++j) norm += nv[j] * nv[j];
    norm = std::sqrt(norm);
    if (norm == 0.0) break;
    lam = norm / static_cast<double>(n);
    for (size_t j = 0; j < d; ++j) v[j] = nv[j] / norm;
  }
  const double nn = static_cast<double>(n);
  const double step = lam > 0.0 ? 1.0 / (lam * 1.01) : 1.0;

  auto gap_of = [&](const std::vector<double>& w, double* primal_out) {
    std::vector<double> r(n);
    double sq = 0.0, l1 = 0.0;
    for (size_t i = 0; i < n; ++i) {
      double pred = 0.0;
      for (size_t j = 0; j < d; ++j) pred += xc[i][j] * w[j];
      r[i] = yc[i] - pred;
      sq += r[i] * r[i];
    }
    for (size_t j = 0; j < d; ++j) l1 += std::abs(w[j]);
    double primal = sq / (2.0 * nn) + alpha * l1;
    // dual candidate: residual/n shrunk into the feasible polytope
    double worst = 0.0;
    for (size_t j = 0; j < d; ++j) {
      double g = 0.0;
      for (size_t i = 0; i < n; ++i) g += xc[i][j] * r[i];
      worst = std::max(worst, std::abs(g) / nn);
    }
    double s = worst > alpha ? alpha / worst : 1.0;
    double dual = 0.0;
    for (size_t i = 0; i < n; ++i) {
      double vi = s * r[i] / nn;
      dual += -nn / 2.0 * vi * vi + vi * yc[i];
    }
    if (primal_out) *primal_out = primal;
    return primal - dual;
  };

  std::vector<double> w(d, 0.0), z(d, 0.0), w_prev(d, 0.0);
  double t = 1.0;
  LassoFit fit;
  for (int it = 0; it < max_iters; ++it) {
    // gradient of the smooth part at z
    std::vector<double> r(n);
    for (size_t i = 0; i < n; ++i) {
      double pred = 0.0;
      for (size_t j = 0; j < d; ++j) pred += xc[i][j] * z[j];
      r[i] = pred - yc[i];
    }
    w_prev = w;
    for (size_t j = 0; j < d; ++j) {
      double g = 0.0;
      for (size_t i = 0; i < n; ++i) g += xc[i][j] * r[i];
      double u = z[j] - step * g / nn;
      double thr = step * alpha;
      w[j] = u > thr ? u - thr : (u < -thr ? u + thr : 0.0);
    }
    double t_next = (1.0 + std::sqrt(1.0 + 4.0 * t * t)) / 2.0;
    for (size_t j = 0; j < d; ++j) {
      z[j] = w[j] + (t - 1.0) / t_next * (w[j] - w_prev[j]);
    }
    t = t_next;
    fit.iters = it + 1;
    if (it % 10 == 0 || it == max_iters - 1) {
      fit.gap = gap_of(w, nullptr);
      if (fit.gap <= gap_tol) break;
    }
  }
  fit.w = w;
  fit.intercept = y_mean;
  for (size_t j = 0; j < d; ++j) fit.intercept -= col_mean[j] * w[j];
  return fit;
}

// objective value at an arbitrary (w, b), long-double accumulation
inline long double lasso_objective(const std::vector<std::vector<double>>& x,
                                   const std::vector<double>& y,
                                   const std::vector<double>& w, double b,
                                   double alpha) {
  const size_t n = x.size();
  const size_t d = w.size();
  long double sq = 0.0L, l1 = 0.0L;
  for (size_t i = 0; i < n; ++i) {
    long double r = y[i] - b;
    for (size_t j = 0; j < d; ++j) r -= (long double)x[i][j] * w[j];
    sq += r * r;
  }
  for (size_t j = 0; j < d; ++j) l1 += std::abs((long double)w[j]);
  return sq / (2.0L * n) + (long double)alpha * l1;
}

inline double cosine(const std::vector<double>& a,
                     const std::vector<double>& b) {
  double ab = 0.0, aa = 0.0, bb = 0.0;
  for (size_t i = 0; i < a.size(); ++i) {
    ab += a[i] * b[i];
    aa += a[i] * a[i];
    bb += b[i] * b[i];
  }
  if (aa == 0.0 || bb == 0.0) return 0.0;
  return ab / (std::sqrt(aa) * std::sqrt(bb));
}

}  // namespace oracle

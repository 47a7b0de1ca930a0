#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "limecert/field_element.hpp"
#include "limecert/lime_config.hpp"
#include "limecert/model.hpp"

namespace limecert {

// Perturbed sample set around one query point.
struct Neighborhood {
  RawMatrix z;              // n x d perturbed points at cfg.scale
  std::vector<Label> y;     // model labels for each row
  std::vector<int64_t> pi;  // kernel weights at cfg.scale; scale (=1.0) when
                            // the kernel is disabled
  friend bool operator==(const Neighborhood&, const Neighborhood&) = default;
};

// The design the LASSO actually runs on: rows sqrt(pi_i) * z_i, targets
// sqrt(pi_i) * y_i, and the intercept column sqrt(pi_i) itself, all at
// cfg.scale. Weighting the intercept column along with the rest of the
// residual is what makes the fit a true weighted least squares; with the
// kernel disabled every s_i equals the scale and the column is the usual
// constant 1.
struct WeightedDesign {
  RawMatrix x;
  std::vector<int64_t> y;
  std::vector<int64_t> s;
};

// Primal/dual pair certifying one LASSO solve. w_hat and intercept are at
// cfg.scale; v_hat is carried at cfg.dual_scale() = scale^2 because the dual
// objective is quadratic in v and per-coordinate rounding at the base scale
// would inject more gap noise than the epsilon budget allows.
struct LassoSolution {
  std::vector<int64_t> w_hat;
  int64_t intercept = 0;
  std::vector<int64_t> v_hat;
  int64_t primal = 0;  // at cfg.scale
  int64_t dual = 0;    // at cfg.scale
  int64_t gap = 0;     // primal - dual
  uint32_t sweeps = 0;

  friend bool operator==(const LassoSolution&, const LassoSolution&) = default;
};

struct GapEval {
  int64_t primal = 0;
  int64_t dual = 0;
  int64_t gap = 0;
  bool feasible = false;
  int64_t worst_abs_feas = 0;  // max_j |(X^T v)_j| at cfg.scale
};

struct Explanation {
  struct Entry {
    uint32_t index = 0;
    int64_t value = 0;  // raw at cfg.scale, exactly the w_hat entry
    friend bool operator==(const Entry&, const Entry&) = default;
  };
  std::vector<Entry> entries;  // descending |value|, ties by ascending index

  friend bool operator==(const Explanation&, const Explanation&) = default;
};

struct BorderSearch {
  std::vector<int64_t> x_border;  // equals x when no direction flips
  bool flipped = false;
  uint32_t direction = 0;
  uint32_t step = 0;
};

struct ExplainResult {
  Label o = 0;
  Explanation e;
  Neighborhood nbh;
  LassoSolution sol;
  std::vector<int64_t> x_border;  // empty unless cfg.border_lime
  std::vector<std::pair<std::string, int64_t>> timings_us;
};

class SolverError : public std::runtime_error {
 public:
  SolverError(const std::string& msg, double gap)
      : std::runtime_error(msg), last_gap(gap) {}
  double last_gap;
};

// centered uniform perturbation: maps a limb in [0, 2^bits) onto
// [-half_edge, +half_edge) with limb 2^(bits-1) landing exactly on 0
int64_t uniform_delta(uint32_t limb, uint32_t bits, int64_t half_edge_raw);

// pi = exp(-||x - z||^2 / sigma^2) evaluated through the exp table
int64_t exponential_kernel(std::span<const int64_t> x,
                           std::span<const int64_t> z, int64_t sigma_raw,
                           int64_t scale, const LookupTable& exp_table);

// rows z_i = center + perturbation(limb block i); labels via the model;
// kernel weights measured against `center`
Neighborhood build_neighborhood(std::span<const int64_t> center,
                                const ModelWeights& model,
                                const LimeConfig& cfg, const Tables& tables,
                                std::span<const uint32_t> limbs);

WeightedDesign weighted_design(const Neighborhood& nbh, int64_t scale);

// coordinate-descent solve of
//   min_{w,b} (1/2n) ||y' - b s - Xw||^2 + alpha ||w||_1
// on the weighted design (s is its intercept column), then integer
// re-certification: quantize (w, b), build the dual vector from the
// fixed-point residual, and verify the gap the way the relation checker
// will. gap_target <= 0 selects epsilon/2.
LassoSolution solve_lasso_design(const WeightedDesign& design,
                                 const LimeConfig& cfg,
                                 double gap_target = 0.0);

// convenience form mirroring the pipeline: weights the design then solves
LassoSolution solve_weighted_lasso(const RawMatrix& z,
                                   std::span<const Label> y,
                                   std::span<const int64_t> pi,
                                   const LimeConfig& cfg,
                                   double gap_target = 0.0);

// v = t * r for residual r = y' - b s - Xw, with t = min(1/n, alpha/||X^T r||oo)
// and the sign that maximizes the dual objective; result is exactly feasible
// under the integer feasibility check (shrunk further if rounding pushed any
// coordinate over)
std::vector<int64_t> dual_feasible(const WeightedDesign& design,
                                   std::span<const int64_t> w_raw,
                                   int64_t intercept_raw, int64_t alpha_raw,
                                   int64_t scale);

// integer evaluation of primal, dual, gap, and dual feasibility; this is the
// arithmetic the relation checker runs, shared so prover and verifier can
// never disagree
GapEval duality_gap(const WeightedDesign& design,
                    std::span<const int64_t> w_raw, int64_t intercept_raw,
                    std::span<const int64_t> v_raw, int64_t alpha_raw,
                    int64_t scale);

Explanation top_k(std::span<const int64_t> w_raw, uint32_t K);

// walks m rays of T grid steps looking for a label flip; the reverse scan
// (k = T..1, directions ascending, last write wins) lands on the closest
// flipped grid point, matching the checker's re-derivation exactly
BorderSearch find_opposite_point(std::span<const int64_t> x,
                                 const ModelWeights& model,
                                 const LimeConfig& cfg, const Tables& tables,
                                 std::span<const uint32_t> dir_limbs);

// full pipeline from PRF digests to certificate ingredients
ExplainResult explain(std::span<const int64_t> x, const ModelWeights& model,
                      const LimeConfig& cfg, const Tables& tables,
                      const std::vector<FieldElement>& digests);

}  // namespace limecert

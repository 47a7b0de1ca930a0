#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "limecert/commitment.hpp"
#include "limecert/lime.hpp"

namespace limecert {

// Public half of the verified relation. Everything here is bound into the
// certificate; the canonical byte encoding makes the binding unambiguous.
struct Statement {
  uint32_t version = 1;
  LimeConfig cfg;
  std::vector<int64_t> x;  // query point at cfg.scale
  Label o = 0;             // claimed prediction
  Explanation e;           // claimed top-K explanation
  FieldElement r_v;        // verifier randomness
  Commitment com_w;        // model weights commitment
  Commitment com_r;        // prover nonce commitment

  Bytes canonical_bytes() const;

  friend bool operator==(const Statement&, const Statement&) = default;
};

// Private half: the disclosed values a replay verifier re-derives against.
struct Witness {
  ModelWeights model;
  FieldElement r_p;
  Bytes rho_w;  // 32-byte blinding for com_w
  Bytes rho_r;  // 32-byte blinding for com_r
  std::vector<FieldElement> hashes;  // PRF digests for this query
  std::vector<Label> y;              // neighborhood labels
  std::vector<int64_t> w_hat;        // at cfg.scale
  int64_t intercept = 0;             // at cfg.scale
  std::vector<int64_t> v_hat;        // at cfg.dual_scale()
  std::vector<int64_t> x_border;     // present iff cfg.border_lime

  friend bool operator==(const Witness&, const Witness&) = default;
};

enum class CheckId {
  structure,            // shapes, ranges, canonical field elements
  binding,              // presented values vs. certificate statement
  com_r_opening,
  com_w_opening,
  prf_digests,
  border_point,
  prediction,           // o = f(W, x)
  neighborhood_labels,  // y_i = f(W, z_i)
  lasso_gap,
  lasso_feasibility,
  top_k_selection,
};

const char* check_name(CheckId id);

struct CheckFailure {
  CheckId id;
  std::string detail;
};

struct CheckReport {
  bool accepted = false;
  std::vector<CheckFailure> failures;
  std::vector<std::pair<std::string, int64_t>> timings_us;

  bool failed(CheckId id) const {
    for (const CheckFailure& f : failures) {
      if (f.id == id) return true;
    }
    return false;
  }
};

// Deterministic full evaluation of the relation. Structural violations
// short-circuit (nothing downstream is evaluable); value checks accumulate
// so the report names every violated condition.
CheckReport check_relation(const Statement& stmt, const Witness& wit);

// number of PRF digests one query consumes
size_t digests_for(const LimeConfig& cfg, size_t input_dim);

struct TamperCase {
  std::string name;
  Statement stmt;
  Witness wit;
  std::vector<CheckId> expect_any;  // rejection must flag one of these
};

// Mutation classes driving the soundness harness. Every returned case is a
// certificate-level forgery that check_relation must reject at the named
// check. Border and kernel classes appear only when the config enables them.
std::vector<TamperCase> enumerate_tampers(const Statement& stmt,
                                          const Witness& wit);

std::string report_to_json(const CheckReport& report);

}  // namespace limecert

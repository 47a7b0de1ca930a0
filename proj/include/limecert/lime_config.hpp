#pragma once

#include <cstdint>
#include <string>

#include "limecert/bytes.hpp"
#include "limecert/lookup_table.hpp"

namespace limecert {

enum class SmplType { uniform, gaussian };
enum class KrnlType { exponential, none };
enum class RvMode { external, derived };

// Every parameter both parties must agree on. The whole struct is public,
// canonically encoded, and bound into the transcript, so a certificate can
// never be replayed under different parameters.
struct LimeConfig {
  uint32_t version = 1;

  SmplType smpl_type = SmplType::uniform;
  KrnlType krnl_type = KrnlType::exponential;
  bool border_lime = false;
  // how the verifier nonce is supplied: an explicit per-query challenge, or
  // derived from a transcript hash (weaker, for non-interactive batch runs)
  RvMode rv_mode = RvMode::external;

  int64_t scale = 10000;   // fixed-point scale for all protocol reals
  uint32_t b = 16;         // sample limb bit width
  uint32_t n = 300;        // neighborhood sample count
  uint32_t K = 5;          // explanation length

  int64_t sigma_raw = 0;        // kernel bandwidth; <= 0 selects the default
  int64_t alpha_raw = 100;      // l1 penalty 0.01
  int64_t epsilon_raw = 10;     // max duality gap 0.001
  int64_t half_edge_raw = 2000; // uniform perturbation half-edge 0.2
  int64_t gauss_std_raw = 2000; // gaussian perturbation std 0.2
  uint32_t max_sweeps = 10000;  // solver sweep budget

  uint32_t m = 5;              // border search directions
  int64_t delta_raw = 1000;    // border step length 0.1
  uint32_t T = 250;            // border grid steps per direction

  uint32_t exp_table_size = 200000;
  int64_t exp_lo_raw = -200000;       // exp table domain [-20, 0]
  uint32_t recip_table_size = 200001;
  int32_t recip_log2_spacing = -10;
  int64_t gauss_clamp_raw = 40000;    // inverse-CDF tail clamp at +-4

  // defaults for a given input dimension (sets sigma to sqrt(d) * 0.75)
  static LimeConfig defaults_for(uint32_t input_dim);

  void validate() const;  // throws std::invalid_argument
  Bytes canonical_bytes() const;

  int64_t dual_scale() const { return scale * scale; }

  // sample limbs one query consumes for input dimension d
  size_t coords_needed(size_t d) const {
    return size_t{n} * d + (border_lime ? size_t{m} * d : 0);
  }

  friend bool operator==(const LimeConfig&, const LimeConfig&) = default;
};

// The three lookup tables a config implies, built deterministically.
struct Tables {
  LookupTable exp;
  LookupTable gauss;
  LookupTable recip;

  explicit Tables(const LimeConfig& cfg);
};

// process-wide cache keyed by the table-relevant config fields
const Tables& tables_for(const LimeConfig& cfg);

std::string config_to_json(const LimeConfig& cfg);
LimeConfig config_from_json(const std::string& text);

const char* smpl_type_name(SmplType s);
const char* krnl_type_name(KrnlType k);

}  // namespace limecert

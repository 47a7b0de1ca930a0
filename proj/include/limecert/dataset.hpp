#pragma once

#include <string>
#include <vector>

#include "limecert/lime.hpp"

namespace limecert {

// A feature matrix at a fixed-point scale, optionally with binary labels.
// Rows double as query points for the explanation pipeline.
struct Dataset {
  std::string name;
  int64_t scale = 10000;
  RawMatrix xs;
  std::vector<Label> labels;  // empty for unlabeled data

  uint32_t dim() const { return static_cast<uint32_t>(xs.cols); }
};

// Standard-normal features (standardized by construction), quantized at
// `scale`. Deterministic in `seed`.
Dataset synth_dataset(const std::string& name, uint32_t rows, uint32_t dim,
                      int64_t scale, uint64_t seed);

// CSV with header x0..x{d-1}[,label] and exact decimal fixed-point values;
// round-trips byte-identically. Requires a power-of-ten scale.
std::string dataset_to_csv(const Dataset& ds);
Dataset dataset_from_csv(const std::string& text, int64_t scale);

// comma-separated decimal values quantized exactly at `scale`
std::vector<int64_t> parse_fixed_vector(const std::string& text,
                                        int64_t scale);

// One cell of the sampling x kernel x border evaluation grid.
struct VariantSpec {
  SmplType smpl = SmplType::uniform;
  KrnlType krnl = KrnlType::exponential;
  bool border = false;

  std::string id() const;           // e.g. "UE", "GN", "UE-border"
  LimeConfig apply(LimeConfig cfg) const;
};

std::vector<VariantSpec> all_variants();  // the full 2 x 2 x 2 grid

struct FidelityOptions {
  uint32_t n_eval = 1000;            // evaluation samples per input
  int64_t eval_half_edge_raw = 2000; // uniform evaluation box half-edge
  int64_t eval_gauss_std_raw = 2000; // gaussian evaluation std
  uint64_t seed = 1;                 // master seed; fixes all randomness
};

struct FidelityResult {
  std::string variant;
  std::vector<double> similarity;  // per input: matching predictions / n_eval
  double mean = 0.0;
  double stddev = 0.0;  // sample standard deviation over inputs
};

// For every variant and every input row: fit the local surrogate through the
// full explanation pipeline, then measure the fraction of fresh evaluation
// samples on which the thresholded surrogate (w'z + b >= 1/2) agrees with
// the model. Evaluation samples are drawn around the original input with the
// variant's sampling family. Fully deterministic in opt.seed.
std::vector<FidelityResult> eval_fidelity(const ModelWeights& model,
                                          const LimeConfig& base_cfg,
                                          const RawMatrix& inputs,
                                          const FidelityOptions& opt);

// variant,input_index,similarity rows followed by variant,mean,stddev
// summary rows; byte-deterministic
std::string fidelity_to_csv(const std::vector<FidelityResult>& results);

// phase,us rows in input order
std::string timings_to_csv(
    const std::vector<std::pair<std::string, int64_t>>& timings);

}  // namespace limecert

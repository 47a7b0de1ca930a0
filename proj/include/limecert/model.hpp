#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "limecert/bytes.hpp"
#include "limecert/fixed_point.hpp"

namespace limecert {

using Label = uint32_t;

enum class ModelKind { mlp, forest };

struct MlpLayer {
  uint32_t in = 0;
  uint32_t out = 0;
  std::vector<int64_t> w;     // row-major [out][in], raw at model scale
  std::vector<int64_t> bias;  // [out]

  friend bool operator==(const MlpLayer&, const MlpLayer&) = default;
};

struct TreeNode {
  int32_t feature = -1;    // split feature for internal nodes
  int64_t threshold = 0;   // raw at model scale; go left when x[f] <= t
  int32_t left = -1;
  int32_t right = -1;
  int32_t leaf_label = -1; // >= 0 marks a leaf

  bool is_leaf() const { return leaf_label >= 0; }
  friend bool operator==(const TreeNode&, const TreeNode&) = default;
};

using Tree = std::vector<TreeNode>;  // node 0 is the root

// Fixed-point weights for the two supported classifier families:
// fully-connected ReLU networks with a two-logit argmax head, and
// majority-vote forests of axis-aligned decision trees.
struct ModelWeights {
  uint32_t version = 1;
  ModelKind kind = ModelKind::mlp;
  int64_t scale = 10000;
  uint32_t input_dim = 0;
  uint32_t num_classes = 2;
  std::vector<MlpLayer> layers;
  std::vector<Tree> trees;

  // throws std::invalid_argument with a precise message on any violation
  void validate() const;

  // canonical byte encoding, the commitment preimage
  Bytes canonical_bytes() const;

  // inverse of canonical_bytes; throws on malformed or invalid input
  static ModelWeights from_canonical_bytes(std::span<const uint8_t> data);

  friend bool operator==(const ModelWeights&, const ModelWeights&) = default;
};

// Deterministic inference. MLP: per-layer fixed-point affine + ReLU, argmax
// over the final logits with ties toward the lower class index. Forest:
// root-to-leaf walk per tree, majority vote with ties toward class 0.
Label infer(const ModelWeights& m, std::span<const int64_t> x);

std::vector<Label> infer_batch(const ModelWeights& m, const RawMatrix& xs);

// final-layer logits (mlp only), exposed for tests and diagnostics
std::vector<int64_t> mlp_logits(const ModelWeights& m,
                                std::span<const int64_t> x);

struct ArchSpec {
  ModelKind kind = ModelKind::mlp;
  uint32_t input_dim = 0;
  std::vector<uint32_t> hidden = {16};  // mlp hidden layer widths
  uint32_t num_classes = 2;
  uint32_t n_trees = 5;                 // forest
  uint32_t depth = 4;                   // forest tree depth
};

// Reproducible pseudo-random weights for fixtures and experiments.
ModelWeights synthesize_model(const ArchSpec& arch, int64_t scale,
                              uint64_t seed);

std::string model_to_json(const ModelWeights& m);
ModelWeights model_from_json(const std::string& text);

}  // namespace limecert

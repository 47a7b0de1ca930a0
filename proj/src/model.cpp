#include "limecert/model.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

#include <json.hpp>

namespace limecert {

namespace {

using nlohmann::json;

void fail(const std::string& msg) { throw std::invalid_argument("model: " + msg); }

// uniform double in [0, 1) from the top 53 bits of a mt19937_64 draw;
// explicit mapping because std::uniform_real_distribution is not
// reproducible across standard library implementations
double canon01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

double uniform_sym(std::mt19937_64& rng) { return 2.0 * canon01(rng) - 1.0; }

void append_tree(Tree& tree, uint32_t depth, uint32_t input_dim, int64_t scale,
                 std::mt19937_64& rng) {
  size_t self = tree.size();
  tree.emplace_back();
  if (depth == 0) {
    tree[self].leaf_label = static_cast<int32_t>(rng() & 1);
    return;
  }
  tree[self].feature = static_cast<int32_t>(rng() % input_dim);
  tree[self].threshold = quantize(uniform_sym(rng), scale);
  tree[self].left = static_cast<int32_t>(tree.size());
  append_tree(tree, depth - 1, input_dim, scale, rng);
  tree[self].right = static_cast<int32_t>(tree.size());
  append_tree(tree, depth - 1, input_dim, scale, rng);
}

}  // namespace

void ModelWeights::validate() const {
  if (scale <= 0) fail("scale must be positive");
  if (input_dim == 0) fail("input_dim must be positive");
  if (num_classes != 2) fail("only binary classification is supported");
  if (kind == ModelKind::mlp) {
    if (layers.empty()) fail("mlp needs at least one layer");
    if (!trees.empty()) fail("mlp must not carry trees");
    uint32_t prev = input_dim;
    for (size_t li = 0; li < layers.size(); ++li) {
      const MlpLayer& l = layers[li];
      std::string at = "layer " + std::to_string(li);
      if (l.in != prev) {
        fail(at + " input width " + std::to_string(l.in) +
             " does not chain from previous width " + std::to_string(prev));
      }
      if (l.out == 0) fail(at + " has zero output width");
      if (l.w.size() != size_t{l.in} * l.out) {
        fail(at + " weight count " + std::to_string(l.w.size()) +
             " != in*out = " + std::to_string(size_t{l.in} * l.out));
      }
      if (l.bias.size() != l.out) {
        fail(at + " bias count " + std::to_string(l.bias.size()) +
             " != out = " + std::to_string(l.out));
      }
      prev = l.out;
    }
    if (prev != num_classes) {
      fail("final layer width " + std::to_string(prev) + " != num_classes " +
           std::to_string(num_classes));
    }
  } else {
    if (trees.empty()) fail("forest needs at least one tree");
    if (!layers.empty()) fail("forest must not carry layers");
    for (size_t ti = 0; ti < trees.size(); ++ti) {
      const Tree& t = trees[ti];
      std::string at = "tree " + std::to_string(ti);
      if (t.empty()) fail(at + " is empty");
      for (size_t ni = 0; ni < t.size(); ++ni) {
        const TreeNode& nd = t[ni];
        std::string nat = at + " node " + std::to_string(ni);
        if (nd.is_leaf()) {
          if (nd.leaf_label >= static_cast<int32_t>(num_classes)) {
            fail(nat + " leaf label " + std::to_string(nd.leaf_label) +
                 " >= num_classes");
          }
          continue;
        }
        if (nd.feature < 0 || nd.feature >= static_cast<int32_t>(input_dim)) {
          fail(nat + " split feature " + std::to_string(nd.feature) +
               " outside input dimension " + std::to_string(input_dim));
        }
        // children must point forward so every path terminates
        if (nd.left <= static_cast<int32_t>(ni) ||
            nd.left >= static_cast<int32_t>(t.size()) ||
            nd.right <= static_cast<int32_t>(ni) ||
            nd.right >= static_cast<int32_t>(t.size())) {
          fail(nat + " child indices (" + std::to_string(nd.left) + ", " +
               std::to_string(nd.right) + ") must point forward within the tree");
        }
      }
    }
  }
}

std::vector<int64_t> mlp_logits(const ModelWeights& m,
                                std::span<const int64_t> x) {
  if (m.kind != ModelKind::mlp) {
    throw std::invalid_argument("mlp_logits: model is not an mlp");
  }
  if (x.size() != m.input_dim) {
    throw std::invalid_argument("mlp_logits: input size mismatch");
  }
  std::vector<int64_t> h(x.begin(), x.end());
  for (size_t li = 0; li < m.layers.size(); ++li) {
    const MlpLayer& l = m.layers[li];
    std::vector<int64_t> next(l.out);
    for (uint32_t j = 0; j < l.out; ++j) {
      std::span<const int64_t> row(l.w.data() + size_t{j} * l.in, l.in);
      next[j] = fp_dot(row, h, m.scale) + l.bias[j];
    }
    if (li + 1 < m.layers.size()) {
      for (int64_t& v : next) {
        if (v < 0) v = 0;  // ReLU
      }
    }
    h = std::move(next);
  }
  return h;
}

namespace {

Label tree_vote(const Tree& t, std::span<const int64_t> x) {
  size_t ni = 0;
  while (!t[ni].is_leaf()) {
    const TreeNode& nd = t[ni];
    ni = (x[static_cast<size_t>(nd.feature)] <= nd.threshold)
             ? static_cast<size_t>(nd.left)
             : static_cast<size_t>(nd.right);
  }
  return static_cast<Label>(t[ni].leaf_label);
}

}  // namespace

ModelWeights ModelWeights::from_canonical_bytes(std::span<const uint8_t> data) {
  ByteReader r(data);
  ModelWeights m;
  m.version = r.u32le();
  uint8_t kind_byte = r.u8();
  if (kind_byte > 1) throw std::invalid_argument("model: unknown kind byte");
  m.kind = kind_byte == 0 ? ModelKind::mlp : ModelKind::forest;
  m.scale = r.i64le();
  m.input_dim = r.u32le();
  m.num_classes = r.u32le();
  if (m.kind == ModelKind::mlp) {
    uint64_t n_layers = r.u64le();
    m.layers.reserve(n_layers);
    for (uint64_t i = 0; i < n_layers; ++i) {
      MlpLayer l;
      l.in = r.u32le();
      l.out = r.u32le();
      l.w = r.i64_vec();
      l.bias = r.i64_vec();
      m.layers.push_back(std::move(l));
    }
  } else {
    uint64_t n_trees = r.u64le();
    m.trees.reserve(n_trees);
    for (uint64_t i = 0; i < n_trees; ++i) {
      Tree t;
      uint64_t n_nodes = r.u64le();
      t.reserve(n_nodes);
      for (uint64_t j = 0; j < n_nodes; ++j) {
        TreeNode nd;
        nd.feature = static_cast<int32_t>(r.u32le());
        nd.threshold = r.i64le();
        nd.left = static_cast<int32_t>(r.u32le());
        nd.right = static_cast<int32_t>(r.u32le());
        nd.leaf_label = static_cast<int32_t>(r.u32le());
        t.push_back(nd);
      }
      m.trees.push_back(std::move(t));
    }
  }
  if (!r.done()) throw std::invalid_argument("model: trailing bytes");
  m.validate();
  return m;
}

Label infer(const ModelWeights& m, std::span<const int64_t> x) {
  if (x.size() != m.input_dim) {
    throw std::invalid_argument("infer: input size " + std::to_string(x.size()) +
                                " != model input_dim " +
                                std::to_string(m.input_dim));
  }
  if (m.kind == ModelKind::mlp) {
    std::vector<int64_t> logits = mlp_logits(m, x);
    size_t best = 0;
    for (size_t j = 1; j < logits.size(); ++j) {
      if (logits[j] > logits[best]) best = j;  // ties keep the lower index
    }
    return static_cast<Label>(best);
  }
  std::vector<uint32_t> votes(m.num_classes, 0);
  for (const Tree& t : m.trees) votes[tree_vote(t, x)]++;
  size_t best = 0;
  for (size_t c = 1; c < votes.size(); ++c) {
    if (votes[c] > votes[best]) best = c;  // ties keep class 0
  }
  return static_cast<Label>(best);
}

std::vector<Label> infer_batch(const ModelWeights& m, const RawMatrix& xs) {
  if (xs.cols != m.input_dim) {
    throw std::invalid_argument("infer_batch: column count mismatch");
  }
  std::vector<Label> out(xs.rows);
  for (size_t i = 0; i < xs.rows; ++i) out[i] = infer(m, xs.row(i));
  return out;
}

Bytes ModelWeights::canonical_bytes() const {
  ByteWriter w;
  w.u32le(version);
  w.u8(kind == ModelKind::mlp ? 0 : 1);
  w.i64le(scale);
  w.u32le(input_dim);
  w.u32le(num_classes);
  if (kind == ModelKind::mlp) {
    w.u64le(layers.size());
    for (const MlpLayer& l : layers) {
      w.u32le(l.in);
      w.u32le(l.out);
      w.i64_vec(l.w);
      w.i64_vec(l.bias);
    }
  } else {
    w.u64le(trees.size());
    for (const Tree& t : trees) {
      w.u64le(t.size());
      for (const TreeNode& nd : t) {
        w.u32le(static_cast<uint32_t>(nd.feature));
        w.i64le(nd.threshold);
        w.u32le(static_cast<uint32_t>(nd.left));
        w.u32le(static_cast<uint32_t>(nd.right));
        w.u32le(static_cast<uint32_t>(nd.leaf_label));
      }
    }
  }
  return w.take();
}

ModelWeights synthesize_model(const ArchSpec& arch, int64_t scale,
                              uint64_t seed) {
  if (arch.input_dim == 0) fail("synthesize: input_dim must be positive");
  std::mt19937_64 rng(seed);
  ModelWeights m;
  m.kind = arch.kind;
  m.scale = scale;
  m.input_dim = arch.input_dim;
  m.num_classes = arch.num_classes;
  if (arch.kind == ModelKind::mlp) {
    std::vector<uint32_t> widths;
    widths.push_back(arch.input_dim);
    for (uint32_t h : arch.hidden) widths.push_back(h);
    widths.push_back(arch.num_classes);
    for (size_t li = 0; li + 1 < widths.size(); ++li) {
      MlpLayer l;
      l.in = widths[li];
      l.out = widths[li + 1];
      double limit = std::sqrt(6.0 / (double(l.in) + double(l.out)));
      l.w.resize(size_t{l.in} * l.out);
      l.bias.resize(l.out);
      for (int64_t& v : l.w) v = quantize(uniform_sym(rng) * limit, scale);
      for (int64_t& v : l.bias) v = quantize(uniform_sym(rng) * 0.1, scale);
      m.layers.push_back(std::move(l));
    }
  } else {
    for (uint32_t ti = 0; ti < arch.n_trees; ++ti) {
      Tree t;
      append_tree(t, arch.depth, arch.input_dim, scale, rng);
      m.trees.push_back(std::move(t));
    }
  }
  m.validate();
  return m;
}

namespace {

json layer_to_json(const MlpLayer& l) {
  return json{{"in", l.in}, {"out", l.out}, {"w", l.w}, {"bias", l.bias}};
}

json node_to_json(const TreeNode& nd) {
  return json{{"feature", nd.feature},
              {"threshold", nd.threshold},
              {"left", nd.left},
              {"right", nd.right},
              {"leaf_label", nd.leaf_label}};
}

}  // namespace

std::string model_to_json(const ModelWeights& m) {
  m.validate();
  json j;
  j["version"] = m.version;
  j["kind"] = (m.kind == ModelKind::mlp) ? "mlp" : "forest";
  j["scale"] = m.scale;
  j["input_dim"] = m.input_dim;
  j["num_classes"] = m.num_classes;
  if (m.kind == ModelKind::mlp) {
    json arr = json::array();
    for (const MlpLayer& l : m.layers) arr.push_back(layer_to_json(l));
    j["layers"] = arr;
  } else {
    json arr = json::array();
    for (const Tree& t : m.trees) {
      json tj = json::array();
      for (const TreeNode& nd : t) tj.push_back(node_to_json(nd));
      arr.push_back(tj);
    }
    j["trees"] = arr;
  }
  return j.dump(2) + "\n";
}

ModelWeights model_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    fail(std::string("invalid json: ") + e.what());
  }
  ModelWeights m;
  try {
    m.version = j.at("version").get<uint32_t>();
    std::string kind = j.at("kind").get<std::string>();
    if (kind == "mlp") {
      m.kind = ModelKind::mlp;
    } else if (kind == "forest") {
      m.kind = ModelKind::forest;
    } else {
      fail("unknown kind '" + kind + "'");
    }
    m.scale = j.at("scale").get<int64_t>();
    m.input_dim = j.at("input_dim").get<uint32_t>();
    m.num_classes = j.at("num_classes").get<uint32_t>();
    if (m.kind == ModelKind::mlp) {
      for (const json& lj : j.at("layers")) {
        MlpLayer l;
        l.in = lj.at("in").get<uint32_t>();
        l.out = lj.at("out").get<uint32_t>();
        l.w = lj.at("w").get<std::vector<int64_t>>();
        l.bias = lj.at("bias").get<std::vector<int64_t>>();
        m.layers.push_back(std::move(l));
      }
    } else {
      for (const json& tj : j.at("trees")) {
        Tree t;
        for (const json& nj : tj) {
          TreeNode nd;
          nd.feature = nj.at("feature").get<int32_t>();
          nd.threshold = nj.at("threshold").get<int64_t>();
          nd.left = nj.at("left").get<int32_t>();
          nd.right = nj.at("right").get<int32_t>();
          nd.leaf_label = nj.at("leaf_label").get<int32_t>();
          t.push_back(nd);
        }
        m.trees.push_back(std::move(t));
      }
    }
  } catch (const json::exception& e) {
    fail(std::string("schema error: ") + e.what());
  }
  m.validate();
  return m;
}

}  // namespace limecert

#include "limecert/relation.hpp"

#include <algorithm>
#include <chrono>

#include "limecert/prf.hpp"
#include "limecert/sha256.hpp"

namespace limecert {

namespace {

int64_t us_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration_cast<std::chrono::microseconds>(
             std::chrono::steady_clock::now() - t0)
      .count();
}

}  // namespace

const char* check_name(CheckId id) {
  switch (id) {
    case CheckId::structure: return "structure";
    case CheckId::binding: return "binding";
    case CheckId::com_r_opening: return "com_r_opening";
    case CheckId::com_w_opening: return "com_w_opening";
    case CheckId::prf_digests: return "prf_digests";
    case CheckId::border_point: return "border_point";
    case CheckId::prediction: return "prediction";
    case CheckId::neighborhood_labels: return "neighborhood_labels";
    case CheckId::lasso_gap: return "lasso_gap";
    case CheckId::lasso_feasibility: return "lasso_feasibility";
    case CheckId::top_k_selection: return "top_k_selection";
  }
  return "unknown";
}

size_t digests_for(const LimeConfig& cfg, size_t input_dim) {
  return digests_needed(cfg.coords_needed(input_dim), cfg.b);
}

Bytes Statement::canonical_bytes() const {
  ByteWriter w;
  w.str("xp.stmt");
  w.u32le(version);
  Bytes cb = cfg.canonical_bytes();
  w.bytes(cb);
  w.i64_vec(x);
  w.u32le(o);
  w.u64le(e.entries.size());
  for (const Explanation::Entry& en : e.entries) {
    w.u32le(en.index);
    w.i64le(en.value);
  }
  Digest rv = r_v.to_bytes();
  w.raw_bytes(rv);
  w.raw_bytes(com_w.digest);
  w.raw_bytes(com_r.digest);
  return w.take();
}

namespace {

// empty string = structurally sound
std::string structural_error(const Statement& stmt, const Witness& wit) {
  try {
    stmt.cfg.validate();
    wit.model.validate();
  } catch (const std::invalid_argument& e) {
    return e.what();
  }
  const LimeConfig& cfg = stmt.cfg;
  size_t d = stmt.x.size();
  if (d == 0) return "statement: empty query point";
  if (wit.model.input_dim != d) {
    return "witness model input_dim " + std::to_string(wit.model.input_dim) +
           " != query dimension " + std::to_string(d);
  }
  if (wit.model.scale != cfg.scale) {
    return "witness model scale " + std::to_string(wit.model.scale) +
           " != config scale " + std::to_string(cfg.scale);
  }
  if (cfg.K > d) {
    return "config K " + std::to_string(cfg.K) + " exceeds dimension " +
           std::to_string(d);
  }
  if (stmt.e.entries.size() != cfg.K) {
    return "statement explanation has " + std::to_string(stmt.e.entries.size()) +
           " entries, config K is " + std::to_string(cfg.K);
  }
  for (const Explanation::Entry& en : stmt.e.entries) {
    if (en.index >= d) {
      return "explanation references feature " + std::to_string(en.index) +
             " outside dimension " + std::to_string(d);
    }
  }
  if (wit.rho_w.size() != kBlindingBytes) return "witness rho_w is not 32 bytes";
  if (wit.rho_r.size() != kBlindingBytes) return "witness rho_r is not 32 bytes";
  if (wit.y.size() != cfg.n) {
    return "witness labels count " + std::to_string(wit.y.size()) +
           " != n = " + std::to_string(cfg.n);
  }
  for (size_t i = 0; i < wit.y.size(); ++i) {
    if (wit.y[i] >= wit.model.num_classes) {
      return "witness label " + std::to_string(i) + " out of class range";
    }
  }
  if (wit.w_hat.size() != d) {
    return "witness w_hat size " + std::to_string(wit.w_hat.size()) +
           " != dimension " + std::to_string(d);
  }
  if (wit.v_hat.size() != cfg.n) {
    return "witness v_hat size " + std::to_string(wit.v_hat.size()) +
           " != n = " + std::to_string(cfg.n);
  }
  if (cfg.border_lime) {
    if (wit.x_border.size() != d) {
      return "witness x_border size " + std::to_string(wit.x_border.size()) +
             " != dimension " + std::to_string(d);
    }
  } else if (!wit.x_border.empty()) {
    return "witness carries x_border but border search is disabled";
  }
  size_t need = digests_for(cfg, d);
  if (wit.hashes.size() != need) {
    return "witness digest count " + std::to_string(wit.hashes.size()) +
           " != required " + std::to_string(need);
  }
  if (!wit.r_p.is_canonical()) return "witness r_p is not a canonical field element";
  if (!stmt.r_v.is_canonical()) return "statement r_v is not a canonical field element";
  for (size_t i = 0; i < wit.hashes.size(); ++i) {
    if (!wit.hashes[i].is_canonical()) {
      return "witness digest " + std::to_string(i) +
             " is not a canonical field element";
    }
  }
  return "";
}

}  // namespace

CheckReport check_relation(const Statement& stmt, const Witness& wit) {
  CheckReport rep;
  auto add = [&rep](CheckId id, std::string detail) {
    rep.failures.push_back({id, std::move(detail)});
  };

  std::string serr = structural_error(stmt, wit);
  if (!serr.empty()) {
    add(CheckId::structure, serr);
    return rep;  // nothing downstream is evaluable
  }

  const LimeConfig& cfg = stmt.cfg;
  size_t d = stmt.x.size();
  const Tables& tables = tables_for(cfg);

  auto t0 = std::chrono::steady_clock::now();
  if (!verify_opening(stmt.com_r, "xp.nonce", wit.r_p.to_bytes(), wit.rho_r)) {
    add(CheckId::com_r_opening, "com_r does not open to the witness nonce");
  }
  if (!verify_opening(stmt.com_w, "xp.model", wit.model.canonical_bytes(),
                      wit.rho_w)) {
    add(CheckId::com_w_opening, "com_w does not open to the witness model");
  }
  rep.timings_us.emplace_back("openings", us_since(t0));

  t0 = std::chrono::steady_clock::now();
  FieldElement k = wit.r_p.add(stmt.r_v);
  size_t bad_digests = 0;
  size_t first_bad = 0;
  for (size_t i = 0; i < wit.hashes.size(); ++i) {
    if (!(prf_hash(k, i) == wit.hashes[i])) {
      if (bad_digests == 0) first_bad = i;
      ++bad_digests;
    }
  }
  if (bad_digests > 0) {
    add(CheckId::prf_digests,
        std::to_string(bad_digests) + " digest(s) disagree with prf(k, i), first at index " +
            std::to_string(first_bad));
  }
  rep.timings_us.emplace_back("prf", us_since(t0));

  t0 = std::chrono::steady_clock::now();
  std::vector<uint32_t> limbs =
      uniform_samples(wit.hashes, cfg.b, cfg.coords_needed(d));
  for (uint32_t limb : limbs) {
    if (limb >= (uint32_t{1} << cfg.b)) {
      add(CheckId::structure, "derived sample limb out of range");
      return rep;
    }
  }
  rep.timings_us.emplace_back("derive_samples", us_since(t0));

  // border search re-derivation; downstream always uses the re-derived
  // center, so a forged x_border cannot influence later checks
  t0 = std::chrono::steady_clock::now();
  std::vector<int64_t> center(stmt.x.begin(), stmt.x.end());
  size_t offset = 0;
  if (cfg.border_lime) {
    BorderSearch bs = find_opposite_point(
        stmt.x, wit.model, cfg, tables,
        std::span<const uint32_t>(limbs).subspan(0, size_t{cfg.m} * d));
    if (bs.x_border != wit.x_border) {
      size_t at = 0;
      while (at < d && bs.x_border[at] == wit.x_border[at]) ++at;
      add(CheckId::border_point,
          "re-derived border point differs from witness at coordinate " +
              std::to_string(at));
    }
    center = bs.x_border;
    offset = size_t{cfg.m} * d;
  }
  rep.timings_us.emplace_back("border", us_since(t0));

  t0 = std::chrono::steady_clock::now();
  Label o = infer(wit.model, stmt.x);
  if (o != stmt.o) {
    add(CheckId::prediction,
        "model predicts " + std::to_string(o) + " for the query, statement claims " +
            std::to_string(stmt.o));
  }

  Neighborhood nbh = build_neighborhood(
      center, wit.model, cfg, tables,
      std::span<const uint32_t>(limbs).subspan(offset));
  size_t bad_labels = 0;
  size_t first_bad_label = 0;
  for (size_t i = 0; i < nbh.y.size(); ++i) {
    if (nbh.y[i] != wit.y[i]) {
      if (bad_labels == 0) first_bad_label = i;
      ++bad_labels;
    }
  }
  if (bad_labels > 0) {
    add(CheckId::neighborhood_labels,
        std::to_string(bad_labels) +
            " witness label(s) disagree with re-inference, first at row " +
            std::to_string(first_bad_label));
  }
  rep.timings_us.emplace_back("inference", us_since(t0));

  // the lasso checks run on the witness labels, as the relation prescribes;
  // a label mismatch is already flagged above
  t0 = std::chrono::steady_clock::now();
  nbh.y = wit.y;
  WeightedDesign design = weighted_design(nbh, cfg.scale);
  GapEval g = duality_gap(design, wit.w_hat, wit.intercept, wit.v_hat,
                          cfg.alpha_raw, cfg.scale);
  if (g.gap > cfg.epsilon_raw) {
    add(CheckId::lasso_gap,
        "duality gap " + std::to_string(g.gap) + " exceeds epsilon " +
            std::to_string(cfg.epsilon_raw) + " (primal " +
            std::to_string(g.primal) + ", dual " + std::to_string(g.dual) + ")");
  }
  if (!g.feasible) {
    add(CheckId::lasso_feasibility,
        "||X^T v||oo = " + std::to_string(g.worst_abs_feas) +
            " exceeds alpha " + std::to_string(cfg.alpha_raw));
  }
  rep.timings_us.emplace_back("lasso", us_since(t0));

  t0 = std::chrono::steady_clock::now();
  Explanation expect = top_k(wit.w_hat, cfg.K);
  if (!(expect == stmt.e)) {
    size_t at = 0;
    while (at < expect.entries.size() &&
           expect.entries[at] == stmt.e.entries[at]) {
      ++at;
    }
    add(CheckId::top_k_selection,
        "explanation disagrees with the top-" + std::to_string(cfg.K) +
            " of w_hat at rank " + std::to_string(at));
  }
  rep.timings_us.emplace_back("top_k", us_since(t0));

  rep.accepted = rep.failures.empty();
  return rep;
}

namespace {

// re-derives the weighted design exactly as the checker does, for tamper
// construction and filtering
WeightedDesign derive_design(const Statement& stmt, const Witness& wit) {
  const LimeConfig& cfg = stmt.cfg;
  size_t d = stmt.x.size();
  const Tables& tables = tables_for(cfg);
  std::vector<uint32_t> limbs =
      uniform_samples(wit.hashes, cfg.b, cfg.coords_needed(d));
  std::vector<int64_t> center(stmt.x.begin(), stmt.x.end());
  size_t offset = 0;
  if (cfg.border_lime) {
    BorderSearch bs = find_opposite_point(
        stmt.x, wit.model, cfg, tables,
        std::span<const uint32_t>(limbs).subspan(0, size_t{cfg.m} * d));
    center = bs.x_border;
    offset = size_t{cfg.m} * d;
  }
  Neighborhood nbh = build_neighborhood(
      center, wit.model, cfg, tables,
      std::span<const uint32_t>(limbs).subspan(offset));
  nbh.y = wit.y;
  return weighted_design(nbh, cfg.scale);
}

FieldElement plus_one(const FieldElement& f) {
  return f.add(FieldElement::from_u64(1));
}

}  // namespace

std::vector<TamperCase> enumerate_tampers(const Statement& stmt,
                                          const Witness& wit) {
  std::vector<TamperCase> cases;
  auto emit = [&](std::string name, Statement s, Witness w,
                  std::vector<CheckId> expect) {
    cases.push_back(TamperCase{std::move(name), std::move(s), std::move(w),
                               std::move(expect)});
  };

  {  // single-weight bitflip breaks the model commitment opening
    Witness w = wit;
    if (w.model.kind == ModelKind::mlp) {
      w.model.layers[0].w[0] += 1;
    } else {
      w.model.trees[0][0].threshold += 1;
    }
    emit("model-weight-bitflip", stmt, std::move(w), {CheckId::com_w_opening});
  }
  {  // wholesale model substitution (same shape, different weights)
    Witness w = wit;
    ArchSpec arch;
    arch.kind = wit.model.kind;
    arch.input_dim = wit.model.input_dim;
    arch.hidden.clear();
    for (size_t li = 0; li + 1 < wit.model.layers.size(); ++li) {
      arch.hidden.push_back(wit.model.layers[li].out);
    }
    if (arch.kind == ModelKind::forest) {
      arch.n_trees = static_cast<uint32_t>(wit.model.trees.size());
    }
    w.model = synthesize_model(arch, wit.model.scale, 0x5eedf00dULL);
    emit("model-substitution", stmt, std::move(w), {CheckId::com_w_opening});
  }
  {  // blinding flip: same model, wrong opening randomness
    Witness w = wit;
    w.rho_w[0] ^= 0x01;
    emit("blinding-swap", stmt, std::move(w), {CheckId::com_w_opening});
  }
  {  // wrong prover nonce
    Witness w = wit;
    w.r_p = plus_one(w.r_p);
    emit("nonce-substitution", stmt, std::move(w), {CheckId::com_r_opening});
  }
  {  // verifier challenge swapped after the fact
    Statement s = stmt;
    s.r_v = plus_one(s.r_v);
    emit("verifier-nonce-swap", std::move(s), wit, {CheckId::prf_digests});
  }
  {  // single tampered digest in the sample stream
    Witness w = wit;
    w.hashes[0] = plus_one(w.hashes[0]);
    emit("hash-tamper", stmt, std::move(w), {CheckId::prf_digests});
  }
  {  // non-canonical field element smuggled into the witness
    Witness w = wit;
    FieldElement bad = FieldElement::modulus();
    bad.limb[0] += 5;  // value >= p, never a valid reduced digest
    w.hashes[0] = bad;
    emit("hash-range", stmt, std::move(w), {CheckId::structure});
  }
  {  // config resize desynchronizes every shape
    Statement s = stmt;
    s.cfg.n -= 1;
    emit("config-resize", std::move(s), wit, {CheckId::structure});
  }
  {  // flipped neighborhood label
    Witness w = wit;
    w.y[0] ^= 1u;
    emit("label-flip", stmt, std::move(w), {CheckId::neighborhood_labels});
  }
  {  // query substitution that provably changes the prediction
    for (size_t c = 0; c < stmt.x.size(); ++c) {
      bool done = false;
      for (int64_t mag : {5000, -5000, 10000, -10000, 20000, -20000}) {
        Statement s = stmt;
        s.x[c] += mag;
        if (infer(wit.model, s.x) != stmt.o) {
          emit("query-substitution", std::move(s), wit, {CheckId::prediction});
          done = true;
          break;
        }
      }
      if (done) break;
    }
  }
  {  // intercept shift: the gap grows by ~shift^2/2, far beyond epsilon
    Witness w = wit;
    w.intercept += stmt.cfg.scale / 2;
    emit("intercept-shift", stmt, std::move(w), {CheckId::lasso_gap});
  }
  {  // zeroed dual certificate: gap becomes the whole primal objective
    WeightedDesign design = derive_design(stmt, wit);
    Witness w = wit;
    std::fill(w.v_hat.begin(), w.v_hat.end(), 0);
    GapEval g = duality_gap(design, w.w_hat, w.intercept, w.v_hat,
                            stmt.cfg.alpha_raw, stmt.cfg.scale);
    if (g.gap > stmt.cfg.epsilon_raw) {
      emit("dual-zero", stmt, std::move(w), {CheckId::lasso_gap});
    }
    // else: the primal alone is within epsilon; dropping v changes nothing
    // observable, so there is no forgery to emit for this query
  }
  {  // dual vector aimed at one design entry, scaled past the alpha bound
    WeightedDesign design = derive_design(stmt, wit);
    size_t bi = 0, bj = 0;
    int64_t best = 0;
    for (size_t i = 0; i < design.x.rows; ++i) {
      for (size_t j = 0; j < design.x.cols; ++j) {
        int64_t a = design.x.at(i, j);
        if (a < 0) a = -a;
        if (a > best) {
          best = a;
          bi = i;
          bj = j;
        }
      }
    }
    if (best > 0) {
      int64_t sv = stmt.cfg.scale * stmt.cfg.scale;
      Witness w = wit;
      std::fill(w.v_hat.begin(), w.v_hat.end(), 0);
      w.v_hat[bi] = round_div_half_away(
                        static_cast<int128>(2 * stmt.cfg.alpha_raw + 1) * sv,
                        best) +
                    1;
      (void)bj;
      emit("dual-infeasible", stmt, std::move(w),
           {CheckId::lasso_feasibility});
    }
  }
  {  // coefficient shift: the claimed explanation no longer matches w_hat
    Witness w = wit;
    w.w_hat[stmt.e.entries[0].index] += stmt.cfg.scale / 5;
    emit("w-hat-shift", stmt, std::move(w), {CheckId::top_k_selection});
  }
  {  // explanation value off by one quantum
    Statement s = stmt;
    s.e.entries[0].value += 1;
    emit("explanation-value", std::move(s), wit, {CheckId::top_k_selection});
  }
  if (stmt.e.entries.size() >= 2) {  // rank order swapped
    Statement s = stmt;
    std::swap(s.e.entries[0], s.e.entries[1]);
    emit("explanation-order", std::move(s), wit, {CheckId::top_k_selection});
  }
  if (stmt.cfg.krnl_type == KrnlType::exponential) {
    // bandwidth change reweights the design; emit only if it actually
    // invalidates the certificate (otherwise the new statement is true)
    for (int64_t div : {8, 64, 2}) {
      Statement s = stmt;
      s.cfg.sigma_raw = std::max<int64_t>(1, stmt.cfg.sigma_raw / div);
      WeightedDesign design = derive_design(s, wit);
      GapEval g = duality_gap(design, wit.w_hat, wit.intercept, wit.v_hat,
                              s.cfg.alpha_raw, s.cfg.scale);
      if (g.gap > s.cfg.epsilon_raw || !g.feasible) {
        std::vector<CheckId> expect;
        if (g.gap > s.cfg.epsilon_raw) expect.push_back(CheckId::lasso_gap);
        if (!g.feasible) expect.push_back(CheckId::lasso_feasibility);
        emit("kernel-bandwidth", std::move(s), wit, std::move(expect));
        break;
      }
    }
  }
  if (stmt.cfg.border_lime) {  // forged border point
    Witness w = wit;
    w.x_border[0] += 1;
    emit("border-point-shift", stmt, std::move(w), {CheckId::border_point});
  }
  return cases;
}

std::string report_to_json(const CheckReport& report) {
  std::string out = "{\n  \"accepted\": ";
  out += report.accepted ? "true" : "false";
  out += ",\n  \"failures\": [";
  for (size_t i = 0; i < report.failures.size(); ++i) {
    if (i > 0) out += ",";
    out += "\n    {\"check\": \"";
    out += check_name(report.failures[i].id);
    out += "\", \"detail\": \"";
    for (char c : report.failures[i].detail) {
      if (c == '"' || c == '\\') out += '\\';
      out += c;
    }
    out += "\"}";
  }
  out += report.failures.empty() ? "]" : "\n  ]";
  out += ",\n  \"timings_us\": {";
  for (size_t i = 0; i < report.timings_us.size(); ++i) {
    if (i > 0) out += ", ";
    out += "\"" + report.timings_us[i].first +
           "\": " + std::to_string(report.timings_us[i].second);
  }
  out += "}\n}\n";
  return out;
}

}  // namespace limecert

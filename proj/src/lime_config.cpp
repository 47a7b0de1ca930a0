#include "limecert/lime_config.hpp"

#include <cmath>
#include <map>
#include <memory>
#include <stdexcept>

#include <json.hpp>

namespace limecert {

namespace {

using nlohmann::json;

void fail(const std::string& msg) {
  throw std::invalid_argument("config: " + msg);
}

}  // namespace

const char* smpl_type_name(SmplType s) {
  return s == SmplType::uniform ? "uniform" : "gaussian";
}

const char* krnl_type_name(KrnlType k) {
  return k == KrnlType::exponential ? "exponential" : "none";
}

LimeConfig LimeConfig::defaults_for(uint32_t input_dim) {
  LimeConfig cfg;
  cfg.sigma_raw =
      quantize(std::sqrt(static_cast<double>(input_dim)) * 0.75, cfg.scale);
  return cfg;
}

void LimeConfig::validate() const {
  if (version != 1) fail("unsupported version " + std::to_string(version));
  if (scale <= 0) fail("scale must be positive");
  if (scale > 1000000000) fail("scale too large for dual-scale arithmetic");
  if (b < 4 || b > 16) fail("limb bit width b must be in [4, 16]");
  if (n == 0) fail("sample count n must be positive");
  if (n > 100000) fail("sample count n too large");
  if (K == 0) fail("explanation length K must be positive");
  if (krnl_type == KrnlType::exponential && sigma_raw <= 0) {
    fail("kernel bandwidth sigma must be positive");
  }
  if (alpha_raw <= 0) fail("l1 penalty alpha must be positive");
  if (epsilon_raw <= 0) fail("gap tolerance epsilon must be positive");
  if (smpl_type == SmplType::uniform && half_edge_raw <= 0) {
    fail("half_edge must be positive");
  }
  if (smpl_type == SmplType::gaussian && gauss_std_raw <= 0) {
    fail("gauss_std must be positive");
  }
  if (max_sweeps == 0) fail("max_sweeps must be positive");
  if (border_lime) {
    if (m == 0) fail("border search needs m >= 1 directions");
    if (m > 64) fail("border direction count m too large");
    if (delta_raw <= 0) fail("border step delta must be positive");
    if (T == 0) fail("border grid needs T >= 1 steps");
    if (T > 100000) fail("border grid length T too large");
  }
  if (exp_table_size < 2) fail("exp table needs at least 2 entries");
  if (exp_lo_raw >= 0) fail("exp table lower bound must be negative");
  if (recip_table_size < 2) fail("recip_sqrt table needs at least 2 entries");
  if (recip_log2_spacing >= 0 || recip_log2_spacing < -30) {
    fail("recip_sqrt spacing exponent must be in [-30, -1]");
  }
  if (gauss_clamp_raw <= 0) fail("gauss clamp must be positive");
}

Bytes LimeConfig::canonical_bytes() const {
  ByteWriter w;
  w.str("xp.cfg");
  w.u32le(version);
  w.u8(smpl_type == SmplType::uniform ? 0 : 1);
  w.u8(krnl_type == KrnlType::exponential ? 0 : 1);
  w.u8(border_lime ? 1 : 0);
  w.u8(rv_mode == RvMode::external ? 0 : 1);
  w.i64le(scale);
  w.u32le(b);
  w.u32le(n);
  w.u32le(K);
  w.i64le(sigma_raw);
  w.i64le(alpha_raw);
  w.i64le(epsilon_raw);
  w.i64le(half_edge_raw);
  w.i64le(gauss_std_raw);
  w.u32le(max_sweeps);
  w.u32le(m);
  w.i64le(delta_raw);
  w.u32le(T);
  w.u32le(exp_table_size);
  w.i64le(exp_lo_raw);
  w.u32le(recip_table_size);
  w.u32le(static_cast<uint32_t>(recip_log2_spacing));
  w.i64le(gauss_clamp_raw);
  return w.take();
}

Tables::Tables(const LimeConfig& cfg)
    : exp(LookupTable::make_exp(cfg.scale, cfg.exp_lo_raw, cfg.exp_table_size)),
      gauss(LookupTable::make_gauss_inv_cdf(cfg.b, cfg.scale,
                                            cfg.gauss_clamp_raw)),
      recip(LookupTable::make_recip_sqrt(cfg.scale, cfg.recip_table_size,
                                         cfg.recip_log2_spacing)) {}

const Tables& tables_for(const LimeConfig& cfg) {
  // cache keyed by the fields that shape the tables
  ByteWriter w;
  w.i64le(cfg.scale);
  w.u32le(cfg.b);
  w.u32le(cfg.exp_table_size);
  w.i64le(cfg.exp_lo_raw);
  w.u32le(cfg.recip_table_size);
  w.u32le(static_cast<uint32_t>(cfg.recip_log2_spacing));
  w.i64le(cfg.gauss_clamp_raw);
  std::string key = hex_encode(w.out());
  static std::map<std::string, std::unique_ptr<Tables>> cache;
  auto it = cache.find(key);
  if (it == cache.end()) {
    it = cache.emplace(key, std::make_unique<Tables>(cfg)).first;
  }
  return *it->second;
}

namespace {

json fp_json(int64_t raw, int64_t scale) {
  return json{{"raw", raw}, {"scale", scale}};
}

int64_t fp_from_json(const json& j, int64_t expect_scale,
                     const std::string& field) {
  int64_t sc = j.at("scale").get<int64_t>();
  if (sc != expect_scale) {
    fail("field '" + field + "' has scale " + std::to_string(sc) +
         " but the config scale is " + std::to_string(expect_scale));
  }
  return j.at("raw").get<int64_t>();
}

}  // namespace

std::string config_to_json(const LimeConfig& cfg) {
  json j;
  j["version"] = cfg.version;
  j["smpl_type"] = smpl_type_name(cfg.smpl_type);
  j["krnl_type"] = krnl_type_name(cfg.krnl_type);
  j["border_lime"] = cfg.border_lime;
  j["rv_mode"] = cfg.rv_mode == RvMode::external ? "external" : "derived";
  j["scale"] = cfg.scale;
  j["b"] = cfg.b;
  j["n"] = cfg.n;
  j["K"] = cfg.K;
  j["sigma"] = fp_json(cfg.sigma_raw, cfg.scale);
  j["alpha"] = fp_json(cfg.alpha_raw, cfg.scale);
  j["epsilon"] = fp_json(cfg.epsilon_raw, cfg.scale);
  j["half_edge"] = fp_json(cfg.half_edge_raw, cfg.scale);
  j["gauss_std"] = fp_json(cfg.gauss_std_raw, cfg.scale);
  j["max_sweeps"] = cfg.max_sweeps;
  j["m"] = cfg.m;
  j["delta"] = fp_json(cfg.delta_raw, cfg.scale);
  j["T"] = cfg.T;
  j["exp_table_size"] = cfg.exp_table_size;
  j["exp_lo"] = fp_json(cfg.exp_lo_raw, cfg.scale);
  j["recip_table_size"] = cfg.recip_table_size;
  j["recip_log2_spacing"] = cfg.recip_log2_spacing;
  j["gauss_clamp"] = fp_json(cfg.gauss_clamp_raw, cfg.scale);
  return j.dump(2) + "\n";
}

LimeConfig config_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    fail(std::string("invalid json: ") + e.what());
  }
  LimeConfig cfg;
  try {
    cfg.version = j.at("version").get<uint32_t>();
    std::string s = j.at("smpl_type").get<std::string>();
    if (s == "uniform") {
      cfg.smpl_type = SmplType::uniform;
    } else if (s == "gaussian") {
      cfg.smpl_type = SmplType::gaussian;
    } else {
      fail("unknown smpl_type '" + s + "'");
    }
    std::string k = j.at("krnl_type").get<std::string>();
    if (k == "exponential") {
      cfg.krnl_type = KrnlType::exponential;
    } else if (k == "none") {
      cfg.krnl_type = KrnlType::none;
    } else {
      fail("unknown krnl_type '" + k + "'");
    }
    cfg.border_lime = j.at("border_lime").get<bool>();
    std::string rv = j.at("rv_mode").get<std::string>();
    if (rv == "external") {
      cfg.rv_mode = RvMode::external;
    } else if (rv == "derived") {
      cfg.rv_mode = RvMode::derived;
    } else {
      fail("unknown rv_mode '" + rv + "'");
    }
    cfg.scale = j.at("scale").get<int64_t>();
    cfg.b = j.at("b").get<uint32_t>();
    cfg.n = j.at("n").get<uint32_t>();
    cfg.K = j.at("K").get<uint32_t>();
    cfg.sigma_raw = fp_from_json(j.at("sigma"), cfg.scale, "sigma");
    cfg.alpha_raw = fp_from_json(j.at("alpha"), cfg.scale, "alpha");
    cfg.epsilon_raw = fp_from_json(j.at("epsilon"), cfg.scale, "epsilon");
    cfg.half_edge_raw = fp_from_json(j.at("half_edge"), cfg.scale, "half_edge");
    cfg.gauss_std_raw = fp_from_json(j.at("gauss_std"), cfg.scale, "gauss_std");
    cfg.max_sweeps = j.at("max_sweeps").get<uint32_t>();
    cfg.m = j.at("m").get<uint32_t>();
    cfg.delta_raw = fp_from_json(j.at("delta"), cfg.scale, "delta");
    cfg.T = j.at("T").get<uint32_t>();
    cfg.exp_table_size = j.at("exp_table_size").get<uint32_t>();
    cfg.exp_lo_raw = fp_from_json(j.at("exp_lo"), cfg.scale, "exp_lo");
    cfg.recip_table_size = j.at("recip_table_size").get<uint32_t>();
    cfg.recip_log2_spacing = j.at("recip_log2_spacing").get<int32_t>();
    cfg.gauss_clamp_raw =
        fp_from_json(j.at("gauss_clamp"), cfg.scale, "gauss_clamp");
  } catch (const json::exception& e) {
    fail(std::string("schema error: ") + e.what());
  }
  cfg.validate();
  return cfg;
}

}  // namespace limecert

#include "limecert/protocol.hpp"

#include <chrono>
#include <stdexcept>
#include <utility>

#include <json.hpp>

#include "limecert/prf.hpp"
#include "limecert/sha256.hpp"

namespace limecert {

namespace {

using nlohmann::json;

constexpr uint32_t kWitnessVersion = 1;
constexpr size_t kMinEntropyBytes = 16;

int64_t us_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration_cast<std::chrono::microseconds>(
             std::chrono::steady_clock::now() - t0)
      .count();
}

Digest tagged_hash(std::string_view tag, std::span<const uint8_t> payload) {
  ByteWriter w;
  w.str(tag);
  w.raw_bytes(payload);
  return sha256(w.out());
}

[[noreturn]] void schema_fail(const char* what, const std::string& detail) {
  throw std::invalid_argument(std::string(what) + ": schema error: " + detail);
}

json statement_to_json_obj(const Statement& stmt) {
  json e = json::array();
  for (const Explanation::Entry& entry : stmt.e.entries) {
    e.push_back(json{{"index", entry.index}, {"value", entry.value}});
  }
  return json{{"version", stmt.version},
              {"config", json::parse(config_to_json(stmt.cfg))},
              {"x", stmt.x},
              {"o", stmt.o},
              {"e", e},
              {"r_v", stmt.r_v.to_hex()},
              {"com_w", hex_encode(stmt.com_w.digest)},
              {"com_r", hex_encode(stmt.com_r.digest)}};
}

Statement statement_from_json_obj(const json& j) {
  Statement stmt;
  stmt.version = j.at("version").get<uint32_t>();
  stmt.cfg = config_from_json(j.at("config").dump());
  stmt.x = j.at("x").get<std::vector<int64_t>>();
  stmt.o = j.at("o").get<Label>();
  for (const json& entry : j.at("e")) {
    stmt.e.entries.push_back({entry.at("index").get<uint32_t>(),
                              entry.at("value").get<int64_t>()});
  }
  stmt.r_v = FieldElement::from_hex(j.at("r_v").get<std::string>());
  stmt.com_w.digest = digest_from_hex(j.at("com_w").get<std::string>());
  stmt.com_r.digest = digest_from_hex(j.at("com_r").get<std::string>());
  return stmt;
}

}  // namespace

Bytes encode_witness(const Witness& wit) {
  ByteWriter w;
  w.u32le(kWitnessVersion);
  w.bytes(wit.model.canonical_bytes());
  w.raw_bytes(wit.r_p.to_bytes());
  w.bytes(wit.rho_w);
  w.bytes(wit.rho_r);
  w.u64le(wit.hashes.size());
  for (const FieldElement& h : wit.hashes) w.raw_bytes(h.to_bytes());
  w.u64le(wit.y.size());
  for (Label l : wit.y) w.u32le(l);
  w.i64_vec(wit.w_hat);
  w.i64le(wit.intercept);
  w.i64_vec(wit.v_hat);
  w.i64_vec(wit.x_border);
  return w.take();
}

Witness decode_witness(std::span<const uint8_t> data) {
  ByteReader r(data);
  uint32_t version = r.u32le();
  if (version != kWitnessVersion) {
    throw std::invalid_argument("witness: unsupported version");
  }
  Witness wit;
  Bytes model_bytes = r.bytes();
  wit.model = ModelWeights::from_canonical_bytes(model_bytes);
  wit.r_p = FieldElement::from_bytes_raw(r.digest());
  wit.rho_w = r.bytes();
  wit.rho_r = r.bytes();
  uint64_t n_hashes = r.u64le();
  wit.hashes.reserve(n_hashes);
  for (uint64_t i = 0; i < n_hashes; ++i) {
    wit.hashes.push_back(FieldElement::from_bytes_raw(r.digest()));
  }
  uint64_t n_labels = r.u64le();
  wit.y.reserve(n_labels);
  for (uint64_t i = 0; i < n_labels; ++i) wit.y.push_back(r.u32le());
  wit.w_hat = r.i64_vec();
  wit.intercept = r.i64le();
  wit.v_hat = r.i64_vec();
  wit.x_border = r.i64_vec();
  if (!r.done()) throw std::invalid_argument("witness: trailing bytes");
  return wit;
}

Bytes ReplayBackend::prove(const Statement& stmt, const Witness& wit) {
  (void)stmt;
  return encode_witness(wit);
}

CheckReport ReplayBackend::verify(const Statement& stmt, const Bytes& proof) {
  Witness wit;
  try {
    wit = decode_witness(proof);
  } catch (const std::exception& e) {
    CheckReport report;
    report.accepted = false;
    report.failures.push_back(
        {CheckId::structure, std::string("proof payload: ") + e.what()});
    return report;
  }
  return check_relation(stmt, wit);
}

ProverState setup(ModelWeights model, const LimeConfig& cfg,
                  std::span<const uint8_t> entropy) {
  if (entropy.size() < kMinEntropyBytes) {
    throw std::invalid_argument("setup: entropy must be at least 16 bytes");
  }
  model.validate();
  cfg.validate();
  if (model.scale != cfg.scale) {
    throw std::invalid_argument(
        "setup: model scale and config scale must match");
  }

  ProverState state;
  state.r_p = FieldElement::reduce_from_bytes(tagged_hash("xp.rp", entropy));
  Digest dw = tagged_hash("xp.rhow", entropy);
  Digest dr = tagged_hash("xp.rhor", entropy);
  state.rho_w.assign(dw.begin(), dw.end());
  state.rho_r.assign(dr.begin(), dr.end());

  state.bundle.cfg = cfg;
  state.bundle.com_w =
      commit("xp.model", model.canonical_bytes(), state.rho_w);
  state.bundle.com_r =
      commit("xp.nonce", state.r_p.to_bytes(), state.rho_r);
  state.model = std::move(model);
  return state;
}

ProveResult prove(const ProverState& state, std::span<const int64_t> x,
                  const FieldElement& r_v, ProofBackend& backend) {
  const LimeConfig& cfg = state.bundle.cfg;
  if (x.size() != state.model.input_dim) {
    throw std::invalid_argument("prove: query dimension mismatch");
  }

  ProveResult out;
  auto t0 = std::chrono::steady_clock::now();
  FieldElement key = state.r_p.add(r_v);
  std::vector<FieldElement> digests =
      prf_stream(key, digests_for(cfg, x.size()));
  out.timings_us.emplace_back("prf_stream", us_since(t0));

  ExplainResult res = explain(x, state.model, cfg, tables_for(cfg), digests);
  for (auto& t : res.timings_us) out.timings_us.push_back(std::move(t));

  Statement stmt;
  stmt.cfg = cfg;
  stmt.x.assign(x.begin(), x.end());
  stmt.o = res.o;
  stmt.e = res.e;
  stmt.r_v = r_v;
  stmt.com_w = state.bundle.com_w;
  stmt.com_r = state.bundle.com_r;

  Witness wit;
  wit.model = state.model;
  wit.r_p = state.r_p;
  wit.rho_w = state.rho_w;
  wit.rho_r = state.rho_r;
  wit.hashes = std::move(digests);
  wit.y = std::move(res.nbh.y);
  wit.w_hat = res.sol.w_hat;
  wit.intercept = res.sol.intercept;
  wit.v_hat = res.sol.v_hat;
  wit.x_border = std::move(res.x_border);

  // an honest prover must never ship a certificate the checker rejects
  t0 = std::chrono::steady_clock::now();
  CheckReport self = check_relation(stmt, wit);
  out.timings_us.emplace_back("self_check", us_since(t0));
  if (!self.accepted) {
    std::string detail = self.failures.empty()
                             ? std::string("unknown")
                             : check_name(self.failures.front().id) +
                                   (": " + self.failures.front().detail);
    throw std::runtime_error("prove: self-check rejected: " + detail);
  }

  t0 = std::chrono::steady_clock::now();
  Bytes proof = backend.prove(stmt, wit);
  out.timings_us.emplace_back("backend_prove", us_since(t0));

  out.o = res.o;
  out.e = std::move(res.e);
  out.cert.version = 1;
  out.cert.backend = backend.name();
  out.cert.stmt = std::move(stmt);
  out.cert.proof = std::move(proof);
  out.wit = std::move(wit);
  return out;
}

CheckReport verify_certificate(const PublicBundle& bundle,
                               std::span<const int64_t> x,
                               const FieldElement& r_v, Label o,
                               const Explanation& e, const Certificate& cert,
                               ProofBackend& backend) {
  auto t0 = std::chrono::steady_clock::now();
  CheckReport report;
  if (cert.version != 1) {
    report.failures.push_back({CheckId::structure,
                               "certificate: unsupported version"});
  }
  if (cert.backend != backend.name()) {
    report.failures.push_back(
        {CheckId::structure, "certificate: backend is '" + cert.backend +
                                 "', verifier runs '" + backend.name() + "'"});
  }
  if (!report.failures.empty()) {
    report.accepted = false;
    return report;
  }

  const Statement& stmt = cert.stmt;
  auto bind = [&](bool ok, const char* what) {
    if (!ok) {
      report.failures.push_back(
          {CheckId::binding,
           std::string("statement does not bind the presented ") + what});
    }
  };
  bind(stmt.cfg == bundle.cfg, "config");
  bind(stmt.com_w == bundle.com_w, "model commitment");
  bind(stmt.com_r == bundle.com_r, "nonce commitment");
  bind(stmt.x == std::vector<int64_t>(x.begin(), x.end()), "query");
  bind(stmt.o == o, "prediction");
  bind(stmt.e == e, "explanation");
  bind(stmt.r_v == r_v, "verifier randomness");
  if (!report.failures.empty()) {
    report.accepted = false;
    report.timings_us.emplace_back("binding", us_since(t0));
    return report;
  }
  int64_t binding_us = us_since(t0);

  CheckReport inner = backend.verify(stmt, cert.proof);
  inner.timings_us.insert(inner.timings_us.begin(),
                          {std::string("binding"), binding_us});
  return inner;
}

FieldElement derive_rv(const PublicBundle& bundle,
                       std::span<const int64_t> x) {
  ByteWriter w;
  w.str("xp.rv");
  w.bytes(bundle.cfg.canonical_bytes());
  w.raw_bytes(bundle.com_w.digest);
  w.raw_bytes(bundle.com_r.digest);
  w.i64_vec(x);
  return FieldElement::reduce_from_bytes(sha256(w.out()));
}

std::string bundle_to_json(const PublicBundle& bundle) {
  json j{{"version", bundle.version},
         {"com_w", hex_encode(bundle.com_w.digest)},
         {"com_r", hex_encode(bundle.com_r.digest)},
         {"config", json::parse(config_to_json(bundle.cfg))}};
  return j.dump(2) + "\n";
}

PublicBundle bundle_from_json(const std::string& text) {
  try {
    json j = json::parse(text);
    PublicBundle bundle;
    bundle.version = j.at("version").get<uint32_t>();
    if (bundle.version != 1) schema_fail("bundle", "unsupported version");
    bundle.com_w.digest = digest_from_hex(j.at("com_w").get<std::string>());
    bundle.com_r.digest = digest_from_hex(j.at("com_r").get<std::string>());
    bundle.cfg = config_from_json(j.at("config").dump());
    return bundle;
  } catch (const json::exception& e) {
    schema_fail("bundle", e.what());
  }
}

std::string certificate_to_json(const Certificate& cert) {
  json j{{"version", cert.version},
         {"backend", cert.backend},
         {"statement", statement_to_json_obj(cert.stmt)},
         {"proof", hex_encode(cert.proof)}};
  return j.dump(2) + "\n";
}

Certificate certificate_from_json(const std::string& text) {
  try {
    json j = json::parse(text);
    Certificate cert;
    cert.version = j.at("version").get<uint32_t>();
    cert.backend = j.at("backend").get<std::string>();
    cert.stmt = statement_from_json_obj(j.at("statement"));
    cert.proof = hex_decode(j.at("proof").get<std::string>());
    return cert;
  } catch (const json::exception& e) {
    schema_fail("certificate", e.what());
  }
}

}  // namespace limecert

// Command-line driver for the verifiable-explanation toolkit: model and data
// generation, the commit / prove / verify lifecycle, the fidelity evaluation
// grid, and a timing report. Exit codes: 0 success (verify: accepted),
// 1 failure (verify: rejected, or any runtime error), 2 usage error.

#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "limecert/dataset.hpp"
#include "limecert/protocol.hpp"
#include "limecert/sha256.hpp"

using namespace limecert;

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error(path + ": cannot open for reading");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error(path + ": cannot open for writing");
  out << content;
  if (!out) throw std::runtime_error(path + ": write failed");
}

int64_t us_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration_cast<std::chrono::microseconds>(
             std::chrono::steady_clock::now() - t0)
      .count();
}

// ---- prover state persistence (contains secrets; keep the file private) ----

std::string state_to_json(const ProverState& state) {
  nlohmann::json j{{"version", 1},
                   {"model", nlohmann::json::parse(model_to_json(state.model))},
                   {"r_p", state.r_p.to_hex()},
                   {"rho_w", hex_encode(state.rho_w)},
                   {"rho_r", hex_encode(state.rho_r)},
                   {"bundle",
                    nlohmann::json::parse(bundle_to_json(state.bundle))}};
  return j.dump(2) + "\n";
}

ProverState state_from_json(const std::string& text) {
  try {
    nlohmann::json j = nlohmann::json::parse(text);
    ProverState state;
    state.model = model_from_json(j.at("model").dump());
    state.r_p = FieldElement::from_hex(j.at("r_p").get<std::string>());
    state.rho_w = hex_decode(j.at("rho_w").get<std::string>());
    state.rho_r = hex_decode(j.at("rho_r").get<std::string>());
    state.bundle = bundle_from_json(j.at("bundle").dump());
    return state;
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string("state: schema error: ") +
                                e.what());
  }
}

// ---- response file: what the prover hands the querier ----

std::string response_to_json(const ProveResult& res) {
  nlohmann::json e = nlohmann::json::array();
  for (const Explanation::Entry& entry : res.e.entries) {
    e.push_back({{"index", entry.index}, {"value", entry.value}});
  }
  nlohmann::json j{
      {"version", 1},
      {"o", res.o},
      {"e", e},
      {"certificate",
       nlohmann::json::parse(certificate_to_json(res.cert))}};
  return j.dump(2) + "\n";
}

struct Response {
  Label o = 0;
  Explanation e;
  Certificate cert;
};

Response response_from_json(const std::string& text) {
  try {
    nlohmann::json j = nlohmann::json::parse(text);
    Response r;
    r.o = j.at("o").get<Label>();
    for (const nlohmann::json& entry : j.at("e")) {
      r.e.entries.push_back({entry.at("index").get<uint32_t>(),
                             entry.at("value").get<int64_t>()});
    }
    r.cert = certificate_from_json(j.at("certificate").dump());
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string("response: schema error: ") +
                                e.what());
  }
}

// ---- shared option groups ----

struct ConfigArgs {
  std::string config_path;
  std::string smpl_type;
  std::string krnl_type;
  bool border_on = false;
  bool border_off = false;
  std::string rv_mode;
  int64_t n = -1;
  int64_t K = -1;
  int64_t b = -1;
  std::string sigma, alpha, epsilon, half_edge, gauss_std, delta;
  int64_t max_sweeps = -1;
  int64_t m = -1;
  int64_t T = -1;
};

void add_config_flags(CLI::App* cmd, ConfigArgs& args) {
  cmd->add_option("--config", args.config_path,
                  "config JSON file (defaults are derived from the model "
                  "dimension when omitted)");
  cmd->add_option("--smpl-type", args.smpl_type, "uniform | gaussian");
  cmd->add_option("--krnl-type", args.krnl_type, "exponential | none");
  cmd->add_flag("--border-lime", args.border_on,
                "fit the surrogate at the nearest opposite-label point");
  cmd->add_flag("--no-border-lime", args.border_off,
                "force the border search off");
  cmd->add_option("--rv-mode", args.rv_mode, "external | derived");
  cmd->add_option("--n", args.n, "neighborhood sample count");
  cmd->add_option("--K", args.K, "explanation length");
  cmd->add_option("--b", args.b, "sample limb bit width");
  cmd->add_option("--sigma", args.sigma, "kernel bandwidth (decimal)");
  cmd->add_option("--alpha", args.alpha, "l1 penalty (decimal)");
  cmd->add_option("--epsilon", args.epsilon, "max duality gap (decimal)");
  cmd->add_option("--half-edge", args.half_edge,
                  "uniform perturbation half-edge (decimal)");
  cmd->add_option("--gauss-std", args.gauss_std,
                  "gaussian perturbation std (decimal)");
  cmd->add_option("--delta", args.delta, "border step length (decimal)");
  cmd->add_option("--max-sweeps", args.max_sweeps, "solver sweep budget");
  cmd->add_option("--m", args.m, "border search directions");
  cmd->add_option("--T", args.T, "border grid steps per direction");
}

LimeConfig resolve_config(const ConfigArgs& args, uint32_t input_dim) {
  LimeConfig cfg = args.config_path.empty()
                       ? LimeConfig::defaults_for(input_dim)
                       : config_from_json(read_file(args.config_path));
  if (!args.smpl_type.empty()) {
    if (args.smpl_type == "uniform") cfg.smpl_type = SmplType::uniform;
    else if (args.smpl_type == "gaussian") cfg.smpl_type = SmplType::gaussian;
    else throw std::invalid_argument("--smpl-type: expected uniform|gaussian");
  }
  if (!args.krnl_type.empty()) {
    if (args.krnl_type == "exponential") cfg.krnl_type = KrnlType::exponential;
    else if (args.krnl_type == "none") cfg.krnl_type = KrnlType::none;
    else throw std::invalid_argument("--krnl-type: expected exponential|none");
  }
  if (args.border_on && args.border_off) {
    throw std::invalid_argument("--border-lime conflicts with --no-border-lime");
  }
  if (args.border_on) cfg.border_lime = true;
  if (args.border_off) cfg.border_lime = false;
  if (!args.rv_mode.empty()) {
    if (args.rv_mode == "external") cfg.rv_mode = RvMode::external;
    else if (args.rv_mode == "derived") cfg.rv_mode = RvMode::derived;
    else throw std::invalid_argument("--rv-mode: expected external|derived");
  }
  if (args.n >= 0) cfg.n = static_cast<uint32_t>(args.n);
  if (args.K >= 0) cfg.K = static_cast<uint32_t>(args.K);
  if (args.b >= 0) cfg.b = static_cast<uint32_t>(args.b);
  auto fixed = [&](const std::string& text) {
    std::vector<int64_t> v = parse_fixed_vector(text, cfg.scale);
    if (v.size() != 1) throw std::invalid_argument("expected one decimal");
    return v[0];
  };
  if (!args.sigma.empty()) cfg.sigma_raw = fixed(args.sigma);
  if (!args.alpha.empty()) cfg.alpha_raw = fixed(args.alpha);
  if (!args.epsilon.empty()) cfg.epsilon_raw = fixed(args.epsilon);
  if (!args.half_edge.empty()) cfg.half_edge_raw = fixed(args.half_edge);
  if (!args.gauss_std.empty()) cfg.gauss_std_raw = fixed(args.gauss_std);
  if (!args.delta.empty()) cfg.delta_raw = fixed(args.delta);
  if (args.max_sweeps >= 0) cfg.max_sweeps = static_cast<uint32_t>(args.max_sweeps);
  if (args.m >= 0) cfg.m = static_cast<uint32_t>(args.m);
  if (args.T >= 0) cfg.T = static_cast<uint32_t>(args.T);
  cfg.validate();
  return cfg;
}

struct QueryArgs {
  std::string query;
  std::string query_file;
  int64_t row = 0;
};

void add_query_flags(CLI::App* cmd, QueryArgs& args) {
  cmd->add_option("--query", args.query,
                  "query point as comma-separated decimals");
  cmd->add_option("--query-file", args.query_file,
                  "CSV with query rows (see gen-data)");
  cmd->add_option("--row", args.row, "row index into --query-file")
      ->default_val(0);
}

std::vector<int64_t> resolve_query(const QueryArgs& args, int64_t scale) {
  if (!args.query.empty()) return parse_fixed_vector(args.query, scale);
  if (args.query_file.empty()) {
    throw std::invalid_argument("need --query or --query-file");
  }
  Dataset ds = dataset_from_csv(read_file(args.query_file), scale);
  if (args.row < 0 || static_cast<size_t>(args.row) >= ds.xs.rows) {
    throw std::invalid_argument("--row: out of range, file has " +
                                std::to_string(ds.xs.rows) + " rows");
  }
  std::span<const int64_t> r = ds.xs.row(static_cast<size_t>(args.row));
  return {r.begin(), r.end()};
}

FieldElement rv_from_seed(uint64_t seed) {
  ByteWriter w;
  w.str("xp.rvseed");
  w.u64le(seed);
  return FieldElement::reduce_from_bytes(sha256(w.out()));
}

// resolves the verifier nonce from flags and the config's rv_mode
FieldElement resolve_rv(const PublicBundle& bundle,
                        std::span<const int64_t> x, const std::string& rv_hex,
                        int64_t rv_seed) {
  if (!rv_hex.empty()) return FieldElement::from_hex(rv_hex);
  if (rv_seed >= 0) return rv_from_seed(static_cast<uint64_t>(rv_seed));
  if (bundle.cfg.rv_mode == RvMode::derived) return derive_rv(bundle, x);
  throw std::invalid_argument(
      "rv_mode is external: pass --rv-hex or --rv-seed");
}

void print_report(const CheckReport& report) {
  if (report.accepted) {
    std::cout << "accepted\n";
    return;
  }
  std::cout << "rejected\n";
  for (const CheckFailure& f : report.failures) {
    std::cout << "  " << check_name(f.id) << ": " << f.detail << "\n";
  }
}

std::vector<uint32_t> parse_u32_list(const std::string& text) {
  std::vector<uint32_t> out;
  std::stringstream ss(text);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    size_t used = 0;
    unsigned long v = std::stoul(tok, &used);
    if (used != tok.size()) {
      throw std::invalid_argument("bad list entry '" + tok + "'");
    }
    out.push_back(static_cast<uint32_t>(v));
  }
  if (out.empty()) throw std::invalid_argument("empty list");
  return out;
}

// ---- commands ----

int cmd_gen_model(const std::string& out_path, const std::string& kind,
                  uint32_t dim, const std::string& hidden, uint32_t trees,
                  uint32_t depth, int64_t scale, uint64_t seed) {
  ArchSpec arch;
  arch.input_dim = dim;
  if (kind == "mlp") {
    arch.kind = ModelKind::mlp;
    arch.hidden = parse_u32_list(hidden);
  } else if (kind == "forest") {
    arch.kind = ModelKind::forest;
    arch.n_trees = trees;
    arch.depth = depth;
  } else {
    throw std::invalid_argument("--kind: expected mlp|forest");
  }
  ModelWeights model = synthesize_model(arch, scale, seed);
  write_file(out_path, model_to_json(model));
  std::cout << "wrote " << out_path << " (" << kind << ", dim " << dim
            << ")\n";
  return 0;
}

int cmd_gen_data(const std::string& out_path, const std::string& shape,
                 int64_t dim_flag, uint32_t rows, int64_t scale, uint64_t seed,
                 const std::string& label_model_path) {
  uint32_t dim = 0;
  std::string name = shape;
  if (shape == "adult") dim = 14;
  else if (shape == "credit") dim = 23;
  else if (shape == "german") dim = 20;
  else if (shape.empty()) name = "synthetic";
  else throw std::invalid_argument("--shape: expected adult|credit|german");
  if (dim_flag > 0) dim = static_cast<uint32_t>(dim_flag);
  if (dim == 0) throw std::invalid_argument("need --shape or --dim");

  Dataset ds = synth_dataset(name, rows, dim, scale, seed);
  if (!label_model_path.empty()) {
    ModelWeights model = model_from_json(read_file(label_model_path));
    if (model.input_dim != dim) {
      throw std::invalid_argument("--label-model: dimension mismatch");
    }
    ds.labels = infer_batch(model, ds.xs);
  }
  write_file(out_path, dataset_to_csv(ds));
  std::cout << "wrote " << out_path << " (" << rows << " x " << dim << ")\n";
  return 0;
}

int cmd_setup(const std::string& model_path, const ConfigArgs& cfg_args,
              const std::string& entropy_hex, int64_t seed,
              const std::string& bundle_out, const std::string& state_out,
              const std::string& config_out) {
  ModelWeights model = model_from_json(read_file(model_path));
  LimeConfig cfg = resolve_config(cfg_args, model.input_dim);

  Bytes entropy;
  if (!entropy_hex.empty()) {
    entropy = hex_decode(entropy_hex);
  } else {
    ByteWriter w;
    w.str("xp.seed");
    w.u64le(static_cast<uint64_t>(seed));
    Digest d = sha256(w.out());
    entropy.assign(d.begin(), d.end());
  }

  ProverState state = setup(std::move(model), cfg, entropy);
  write_file(bundle_out, bundle_to_json(state.bundle));
  write_file(state_out, state_to_json(state));
  if (!config_out.empty()) write_file(config_out, config_to_json(cfg));
  std::cout << "wrote " << bundle_out << " and " << state_out << "\n"
            << "com_w " << hex_encode(state.bundle.com_w.digest) << "\n"
            << "com_r " << hex_encode(state.bundle.com_r.digest) << "\n";
  return 0;
}

int cmd_prove(const std::string& state_path, const QueryArgs& query_args,
              const std::string& rv_hex, int64_t rv_seed,
              const std::string& out_path, const std::string& timing_out) {
  ProverState state = state_from_json(read_file(state_path));
  std::vector<int64_t> x = resolve_query(query_args, state.bundle.cfg.scale);
  FieldElement r_v = resolve_rv(state.bundle, x, rv_hex, rv_seed);

  ReplayBackend backend;
  auto t0 = std::chrono::steady_clock::now();
  ProveResult res = prove(state, x, r_v, backend);
  int64_t total = us_since(t0);

  write_file(out_path, response_to_json(res));
  std::cout << "prediction " << res.o << "\n";
  for (const Explanation::Entry& entry : res.e.entries) {
    std::string line;
    line += "  x" + std::to_string(entry.index) + " = ";
    char buf[32];
    snprintf(buf, sizeof buf, "%.4f",
             dequantize(entry.value, state.bundle.cfg.scale));
    line += buf;
    std::cout << line << "\n";
  }
  std::cout << "wrote " << out_path << " (" << total / 1000 << " ms)\n";
  if (!timing_out.empty()) {
    auto timings = res.timings_us;
    timings.emplace_back("total", total);
    write_file(timing_out, timings_to_csv(timings));
  }
  return 0;
}

int cmd_verify(const std::string& bundle_path,
               const std::string& response_path, const QueryArgs& query_args,
               const std::string& rv_hex, int64_t rv_seed,
               const std::string& report_out) {
  PublicBundle bundle = bundle_from_json(read_file(bundle_path));
  Response resp = response_from_json(read_file(response_path));
  std::vector<int64_t> x = resolve_query(query_args, bundle.cfg.scale);
  FieldElement r_v = resolve_rv(bundle, x, rv_hex, rv_seed);

  ReplayBackend backend;
  CheckReport report =
      verify_certificate(bundle, x, r_v, resp.o, resp.e, resp.cert, backend);
  print_report(report);
  if (!report_out.empty()) write_file(report_out, report_to_json(report));
  return report.accepted ? 0 : 1;
}

int cmd_eval_fidelity(const std::string& model_path,
                      const ConfigArgs& cfg_args, const std::string& data_path,
                      int64_t n_inputs, uint32_t n_eval,
                      const std::string& eval_half_edge,
                      const std::string& eval_gauss_std, uint64_t seed,
                      const std::string& out_path) {
  ModelWeights model = model_from_json(read_file(model_path));
  LimeConfig cfg = resolve_config(cfg_args, model.input_dim);
  Dataset ds = dataset_from_csv(read_file(data_path), cfg.scale);
  if (ds.dim() != model.input_dim) {
    throw std::invalid_argument("dataset dimension does not match the model");
  }

  RawMatrix inputs = ds.xs;
  if (n_inputs > 0 && static_cast<size_t>(n_inputs) < inputs.rows) {
    inputs.rows = static_cast<size_t>(n_inputs);
    inputs.a.resize(inputs.rows * inputs.cols);
  }

  FidelityOptions opt;
  opt.n_eval = n_eval;
  opt.seed = seed;
  if (!eval_half_edge.empty()) {
    opt.eval_half_edge_raw = parse_fixed_vector(eval_half_edge, cfg.scale)[0];
  }
  if (!eval_gauss_std.empty()) {
    opt.eval_gauss_std_raw = parse_fixed_vector(eval_gauss_std, cfg.scale)[0];
  }

  std::vector<FidelityResult> results =
      eval_fidelity(model, cfg, inputs, opt);
  write_file(out_path, fidelity_to_csv(results));

  std::cout << "variant      mean    stddev   (over " << inputs.rows
            << " inputs, " << n_eval << " eval samples each)\n";
  for (const FidelityResult& r : results) {
    char buf[64];
    snprintf(buf, sizeof buf, "%-11s %.4f  %.4f\n", r.variant.c_str(), r.mean,
             r.stddev);
    std::cout << buf;
  }
  std::cout << "wrote " << out_path << "\n";
  return 0;
}

int cmd_timing(const std::string& model_path, const ConfigArgs& cfg_args,
               const QueryArgs& query_args, uint64_t seed,
               const std::string& out_path) {
  ModelWeights model = model_from_json(read_file(model_path));
  LimeConfig cfg = resolve_config(cfg_args, model.input_dim);

  ByteWriter w;
  w.str("xp.seed");
  w.u64le(seed);
  Digest d = sha256(w.out());
  Bytes entropy(d.begin(), d.end());
  ProverState state = setup(std::move(model), cfg, entropy);

  std::vector<int64_t> x;
  if (query_args.query.empty() && query_args.query_file.empty()) {
    Dataset one = synth_dataset("timing", 1, state.model.input_dim, cfg.scale,
                                seed);
    std::span<const int64_t> r = one.xs.row(0);
    x.assign(r.begin(), r.end());
  } else {
    x = resolve_query(query_args, cfg.scale);
  }
  FieldElement r_v = rv_from_seed(seed);

  ReplayBackend backend;
  auto t0 = std::chrono::steady_clock::now();
  ProveResult res = prove(state, x, r_v, backend);
  int64_t prove_total = us_since(t0);

  t0 = std::chrono::steady_clock::now();
  CheckReport report = verify_certificate(state.bundle, x, r_v, res.o, res.e,
                                          res.cert, backend);
  int64_t verify_total = us_since(t0);
  if (!report.accepted) throw std::runtime_error("timing run was rejected");

  auto timings = res.timings_us;
  timings.emplace_back("prove_total", prove_total);
  for (const auto& [phase, us] : report.timings_us) {
    timings.emplace_back("verify_" + phase, us);
  }
  timings.emplace_back("verify_total", verify_total);
  timings.emplace_back("total", prove_total + verify_total);

  std::string csv = timings_to_csv(timings);
  if (!out_path.empty()) {
    write_file(out_path, csv);
    std::cout << "wrote " << out_path << "\n";
  } else {
    std::cout << csv;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "limecert: commit to a model, answer queries with certified local "
      "explanations, and verify the certificates"};
  app.require_subcommand(1);

  // gen-model
  auto* gm = app.add_subcommand("gen-model", "write a synthetic model JSON");
  std::string gm_out = "model.json", gm_kind = "mlp", gm_hidden = "16,16";
  uint32_t gm_dim = 14, gm_trees = 5, gm_depth = 4;
  int64_t gm_scale = 10000;
  uint64_t gm_seed = 42;
  gm->add_option("--out", gm_out, "output path")->capture_default_str();
  gm->add_option("--kind", gm_kind, "mlp | forest")->capture_default_str();
  gm->add_option("--dim", gm_dim, "input dimension")->capture_default_str();
  gm->add_option("--hidden", gm_hidden, "mlp hidden widths, comma-separated")
      ->capture_default_str();
  gm->add_option("--trees", gm_trees, "forest size")->capture_default_str();
  gm->add_option("--depth", gm_depth, "forest tree depth")
      ->capture_default_str();
  gm->add_option("--scale", gm_scale, "fixed-point scale")
      ->capture_default_str();
  gm->add_option("--seed", gm_seed, "weight seed")->capture_default_str();

  // gen-data
  auto* gd = app.add_subcommand("gen-data", "write a synthetic query CSV");
  std::string gd_out = "data.csv", gd_shape, gd_label_model;
  int64_t gd_dim = 0;
  uint32_t gd_rows = 50;
  int64_t gd_scale = 10000;
  uint64_t gd_seed = 7;
  gd->add_option("--out", gd_out, "output path")->capture_default_str();
  gd->add_option("--shape", gd_shape,
                 "adult (d=14) | credit (d=23) | german (d=20)");
  gd->add_option("--dim", gd_dim, "explicit dimension (overrides --shape)");
  gd->add_option("--rows", gd_rows, "row count")->capture_default_str();
  gd->add_option("--scale", gd_scale, "fixed-point scale")
      ->capture_default_str();
  gd->add_option("--seed", gd_seed, "feature seed")->capture_default_str();
  gd->add_option("--label-model", gd_label_model,
                 "model JSON used to attach a label column");

  // setup
  auto* su = app.add_subcommand(
      "setup", "commit to a model and write the public bundle");
  std::string su_model = "model.json", su_entropy_hex;
  std::string su_bundle = "bundle.json", su_state = "state.json",
              su_config_out;
  int64_t su_seed = 42;
  ConfigArgs su_cfg;
  su->add_option("--model", su_model, "model JSON")->capture_default_str();
  add_config_flags(su, su_cfg);
  su->add_option("--entropy-hex", su_entropy_hex,
                 "commitment entropy, >= 32 hex chars");
  su->add_option("--seed", su_seed,
                 "derive entropy from this seed when --entropy-hex is absent")
      ->capture_default_str();
  su->add_option("--bundle-out", su_bundle, "public bundle path")
      ->capture_default_str();
  su->add_option("--state-out", su_state, "private prover state path")
      ->capture_default_str();
  su->add_option("--config-out", su_config_out,
                 "also write the effective config JSON here");

  // prove
  auto* pr = app.add_subcommand(
      "prove", "answer one query with an explanation and certificate");
  std::string pr_state = "state.json", pr_rv_hex, pr_out = "response.json",
              pr_timing_out;
  int64_t pr_rv_seed = -1;
  QueryArgs pr_query;
  pr->add_option("--state", pr_state, "prover state from setup")
      ->capture_default_str();
  add_query_flags(pr, pr_query);
  pr->add_option("--rv-hex", pr_rv_hex, "verifier nonce, 64 hex chars");
  pr->add_option("--rv-seed", pr_rv_seed, "derive the nonce from a seed");
  pr->add_option("--out", pr_out, "response path")->capture_default_str();
  pr->add_option("--timing-out", pr_timing_out, "also write a phase CSV");

  // verify
  auto* vf = app.add_subcommand(
      "verify", "check a response against the public bundle");
  std::string vf_bundle = "bundle.json", vf_response = "response.json",
              vf_rv_hex, vf_report;
  int64_t vf_rv_seed = -1;
  QueryArgs vf_query;
  vf->add_option("--bundle", vf_bundle, "public bundle from setup")
      ->capture_default_str();
  vf->add_option("--response", vf_response, "response from prove")
      ->capture_default_str();
  add_query_flags(vf, vf_query);
  vf->add_option("--rv-hex", vf_rv_hex, "verifier nonce, 64 hex chars");
  vf->add_option("--rv-seed", vf_rv_seed, "derive the nonce from a seed");
  vf->add_option("--report-out", vf_report, "write the check report JSON");

  // eval-fidelity
  auto* ef = app.add_subcommand(
      "eval-fidelity",
      "measure surrogate-vs-model agreement across the variant grid");
  std::string ef_model = "model.json", ef_data = "data.csv",
              ef_out = "results.csv", ef_half_edge, ef_gauss_std;
  int64_t ef_inputs = 50;
  uint32_t ef_eval = 1000;
  uint64_t ef_seed = 1;
  ConfigArgs ef_cfg;
  ef->add_option("--model", ef_model, "model JSON")->capture_default_str();
  add_config_flags(ef, ef_cfg);
  ef->add_option("--data", ef_data, "query CSV")->capture_default_str();
  ef->add_option("--inputs", ef_inputs, "use the first N rows")
      ->capture_default_str();
  ef->add_option("--n-eval", ef_eval, "evaluation samples per input")
      ->capture_default_str();
  ef->add_option("--eval-half-edge", ef_half_edge,
                 "uniform evaluation half-edge (decimal, default 0.2)");
  ef->add_option("--eval-gauss-std", ef_gauss_std,
                 "gaussian evaluation std (decimal, default 0.2)");
  ef->add_option("--seed", ef_seed, "master seed")->capture_default_str();
  ef->add_option("--out", ef_out, "results CSV path")->capture_default_str();

  // timing
  auto* tm = app.add_subcommand(
      "timing", "time one full prove + verify round and emit a phase CSV");
  std::string tm_model = "model.json", tm_out;
  uint64_t tm_seed = 42;
  ConfigArgs tm_cfg;
  QueryArgs tm_query;
  tm->add_option("--model", tm_model, "model JSON")->capture_default_str();
  add_config_flags(tm, tm_cfg);
  add_query_flags(tm, tm_query);
  tm->add_option("--seed", tm_seed, "setup + nonce seed")
      ->capture_default_str();
  tm->add_option("--out", tm_out, "CSV path (stdout when omitted)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (gm->parsed()) {
      return cmd_gen_model(gm_out, gm_kind, gm_dim, gm_hidden, gm_trees,
                           gm_depth, gm_scale, gm_seed);
    }
    if (gd->parsed()) {
      return cmd_gen_data(gd_out, gd_shape, gd_dim, gd_rows, gd_scale, gd_seed,
                          gd_label_model);
    }
    if (su->parsed()) {
      return cmd_setup(su_model, su_cfg, su_entropy_hex, su_seed, su_bundle,
                       su_state, su_config_out);
    }
    if (pr->parsed()) {
      return cmd_prove(pr_state, pr_query, pr_rv_hex, pr_rv_seed, pr_out,
                       pr_timing_out);
    }
    if (vf->parsed()) {
      return cmd_verify(vf_bundle, vf_response, vf_query, vf_rv_hex,
                        vf_rv_seed, vf_report);
    }
    if (ef->parsed()) {
      return cmd_eval_fidelity(ef_model, ef_cfg, ef_data, ef_inputs, ef_eval,
                               ef_half_edge, ef_gauss_std, ef_seed, ef_out);
    }
    if (tm->parsed()) {
      return cmd_timing(tm_model, tm_cfg, tm_query, tm_seed, tm_out);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}

#include "limecert/dataset.hpp"

#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <random>
#include <sstream>
#include <stdexcept>

#include "limecert/detmath.hpp"
#include "limecert/prf.hpp"
#include "limecert/relation.hpp"
#include "limecert/sha256.hpp"

namespace limecert {

namespace {

// uniform double in the open interval (0, 1); never hits an endpoint, so it
// is safe to feed through the inverse normal CDF
double canon_open01(std::mt19937_64& rng) {
  return (static_cast<double>(rng() >> 11) + 0.5) * 0x1.0p-53;
}

int pow10_digits(int64_t scale) {
  int64_t v = 1;
  for (int k = 0; k <= 18; ++k) {
    if (v == scale) return k;
    v *= 10;
  }
  throw std::invalid_argument("csv io requires a power-of-ten scale");
}

void append_fixed(std::string& out, int64_t raw, int64_t scale, int digits) {
  uint64_t mag = raw < 0 ? uint64_t(0) - static_cast<uint64_t>(raw)
                         : static_cast<uint64_t>(raw);
  uint64_t uscale = static_cast<uint64_t>(scale);
  char buf[64];
  if (digits == 0) {
    snprintf(buf, sizeof buf, "%s%" PRIu64, raw < 0 ? "-" : "", mag);
  } else {
    snprintf(buf, sizeof buf, "%s%" PRIu64 ".%0*" PRIu64, raw < 0 ? "-" : "",
             mag / uscale, digits, mag % uscale);
  }
  out += buf;
}

int64_t parse_fixed(const std::string& field, int64_t scale, int digits,
                    size_t line_no) {
  auto fail = [&](const char* why) {
    throw std::invalid_argument("csv line " + std::to_string(line_no) +
                                ": '" + field + "': " + why);
  };
  size_t pos = 0;
  bool neg = false;
  if (pos < field.size() && (field[pos] == '-' || field[pos] == '+')) {
    neg = field[pos] == '-';
    ++pos;
  }
  if (pos >= field.size()) fail("empty number");
  int64_t int_part = 0;
  size_t int_digits = 0;
  while (pos < field.size() && field[pos] >= '0' && field[pos] <= '9') {
    int_part = int_part * 10 + (field[pos] - '0');
    if (int_part > (int64_t(1) << 42)) fail("integer part out of range");
    ++pos;
    ++int_digits;
  }
  if (int_digits == 0) fail("missing integer part");
  int64_t frac = 0;
  int frac_digits = 0;
  if (pos < field.size() && field[pos] == '.') {
    ++pos;
    while (pos < field.size() && field[pos] >= '0' && field[pos] <= '9') {
      if (frac_digits == digits) fail("more fractional digits than the scale");
      frac = frac * 10 + (field[pos] - '0');
      ++pos;
      ++frac_digits;
    }
    if (frac_digits == 0) fail("missing fractional digits");
  }
  if (pos != field.size()) fail("trailing characters");
  for (int k = frac_digits; k < digits; ++k) frac *= 10;
  int64_t raw = int_part * scale + frac;
  return neg ? -raw : raw;
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

void append_double6(std::string& out, double v) {
  char buf[32];
  snprintf(buf, sizeof buf, "%.6f", v);
  out += buf;
}

}  // namespace

Dataset synth_dataset(const std::string& name, uint32_t rows, uint32_t dim,
                      int64_t scale, uint64_t seed) {
  if (rows == 0 || dim == 0) {
    throw std::invalid_argument("synth_dataset: rows and dim must be positive");
  }
  Dataset ds;
  ds.name = name;
  ds.scale = scale;
  ds.xs = RawMatrix(rows, dim);
  std::mt19937_64 rng(seed);
  for (uint32_t i = 0; i < rows; ++i) {
    for (uint32_t j = 0; j < dim; ++j) {
      ds.xs.at(i, j) = quantize(det_norm_inv(canon_open01(rng)), scale);
    }
  }
  return ds;
}

std::string dataset_to_csv(const Dataset& ds) {
  int digits = pow10_digits(ds.scale);
  bool labeled = !ds.labels.empty();
  if (labeled && ds.labels.size() != ds.xs.rows) {
    throw std::invalid_argument("dataset_to_csv: label count mismatch");
  }
  std::string out;
  for (size_t j = 0; j < ds.xs.cols; ++j) {
    if (j) out += ',';
    out += 'x';
    out += std::to_string(j);
  }
  if (labeled) out += ",label";
  out += '\n';
  for (size_t i = 0; i < ds.xs.rows; ++i) {
    for (size_t j = 0; j < ds.xs.cols; ++j) {
      if (j) out += ',';
      append_fixed(out, ds.xs.at(i, j), ds.scale, digits);
    }
    if (labeled) {
      out += ',';
      out += std::to_string(ds.labels[i]);
    }
    out += '\n';
  }
  return out;
}

Dataset dataset_from_csv(const std::string& text, int64_t scale) {
  int digits = pow10_digits(scale);
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line)) {
    throw std::invalid_argument("csv line 1: missing header");
  }
  std::vector<std::string> header = split_csv_line(line);
  bool labeled = !header.empty() && header.back() == "label";
  size_t dim = header.size() - (labeled ? 1 : 0);
  if (dim == 0) throw std::invalid_argument("csv line 1: no feature columns");
  for (size_t j = 0; j < dim; ++j) {
    if (header[j] != "x" + std::to_string(j)) {
      throw std::invalid_argument("csv line 1: expected column x" +
                                  std::to_string(j) + ", got '" + header[j] +
                                  "'");
    }
  }

  std::vector<int64_t> values;
  std::vector<Label> labels;
  size_t rows = 0;
  size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    std::vector<std::string> fields = split_csv_line(line);
    if (fields.size() != header.size()) {
      throw std::invalid_argument(
          "csv line " + std::to_string(line_no) + ": expected " +
          std::to_string(header.size()) + " fields, got " +
          std::to_string(fields.size()));
    }
    for (size_t j = 0; j < dim; ++j) {
      values.push_back(parse_fixed(fields[j], scale, digits, line_no));
    }
    if (labeled) {
      const std::string& f = fields.back();
      if (f != "0" && f != "1") {
        throw std::invalid_argument("csv line " + std::to_string(line_no) +
                                    ": label must be 0 or 1, got '" + f + "'");
      }
      labels.push_back(f == "1" ? 1 : 0);
    }
    ++rows;
  }
  if (rows == 0) throw std::invalid_argument("csv: no data rows");

  Dataset ds;
  ds.scale = scale;
  ds.xs.rows = rows;
  ds.xs.cols = dim;
  ds.xs.a = std::move(values);
  ds.labels = std::move(labels);
  return ds;
}

std::vector<int64_t> parse_fixed_vector(const std::string& text,
                                        int64_t scale) {
  int digits = pow10_digits(scale);
  std::vector<int64_t> out;
  for (const std::string& field : split_csv_line(text)) {
    out.push_back(parse_fixed(field, scale, digits, 1));
  }
  return out;
}

std::string VariantSpec::id() const {
  std::string s;
  s += smpl == SmplType::gaussian ? 'G' : 'U';
  s += krnl == KrnlType::exponential ? 'E' : 'N';
  if (border) s += "-border";
  return s;
}

LimeConfig VariantSpec::apply(LimeConfig cfg) const {
  cfg.smpl_type = smpl;
  cfg.krnl_type = krnl;
  cfg.border_lime = border;
  return cfg;
}

std::vector<VariantSpec> all_variants() {
  std::vector<VariantSpec> out;
  for (bool border : {false, true}) {
    for (SmplType s : {SmplType::uniform, SmplType::gaussian}) {
      for (KrnlType k : {KrnlType::exponential, KrnlType::none}) {
        out.push_back({s, k, border});
      }
    }
  }
  return out;
}

std::vector<FidelityResult> eval_fidelity(const ModelWeights& model,
                                          const LimeConfig& base_cfg,
                                          const RawMatrix& inputs,
                                          const FidelityOptions& opt) {
  if (inputs.cols != model.input_dim) {
    throw std::invalid_argument("eval_fidelity: input dimension mismatch");
  }
  if (inputs.rows == 0 || opt.n_eval == 0) {
    throw std::invalid_argument("eval_fidelity: need inputs and eval samples");
  }
  model.validate();
  const int64_t scale = base_cfg.scale;
  const size_t d = inputs.cols;
  const double he = dequantize(opt.eval_half_edge_raw, scale);
  const double gstd = dequantize(opt.eval_gauss_std_raw, scale);

  std::vector<FidelityResult> results;
  std::vector<VariantSpec> variants = all_variants();
  for (size_t vi = 0; vi < variants.size(); ++vi) {
    const VariantSpec& variant = variants[vi];
    LimeConfig cfg = variant.apply(base_cfg);
    cfg.validate();
    const Tables& tables = tables_for(cfg);

    FidelityResult res;
    res.variant = variant.id();
    for (size_t i = 0; i < inputs.rows; ++i) {
      std::span<const int64_t> x = inputs.row(i);

      // explanation randomness: one derived key per (seed, variant, input)
      ByteWriter kw;
      kw.str("xp.fid");
      kw.u64le(opt.seed);
      kw.u64le(vi);
      kw.u64le(i);
      FieldElement key = FieldElement::reduce_from_bytes(sha256(kw.out()));
      std::vector<FieldElement> digests =
          prf_stream(key, digests_for(cfg, d));
      ExplainResult ex = explain(x, model, cfg, tables, digests);

      // fresh evaluation samples around the original input
      std::mt19937_64 rng(opt.seed * 0x9e3779b97f4a7c15ULL + vi * 8191 + i);
      std::vector<int64_t> z(d);
      uint32_t matches = 0;
      for (uint32_t s = 0; s < opt.n_eval; ++s) {
        for (size_t j = 0; j < d; ++j) {
          double u = canon_open01(rng);
          double delta = cfg.smpl_type == SmplType::gaussian
                             ? det_norm_inv(u) * gstd
                             : (2.0 * u - 1.0) * he;
          z[j] = x[j] + quantize(delta, scale);
        }
        Label model_label = infer(model, z);
        int64_t lin = fp_dot(ex.sol.w_hat, z, scale) + ex.sol.intercept;
        Label surrogate_label = lin >= scale / 2 ? 1 : 0;
        if (model_label == surrogate_label) ++matches;
      }
      res.similarity.push_back(static_cast<double>(matches) / opt.n_eval);
    }

    double sum = 0.0;
    for (double v : res.similarity) sum += v;
    res.mean = sum / static_cast<double>(res.similarity.size());
    double ss = 0.0;
    for (double v : res.similarity) ss += (v - res.mean) * (v - res.mean);
    res.stddev = res.similarity.size() > 1
                     ? std::sqrt(ss / static_cast<double>(
                                          res.similarity.size() - 1))
                     : 0.0;
    results.push_back(std::move(res));
  }
  return results;
}

std::string fidelity_to_csv(const std::vector<FidelityResult>& results) {
  std::string out = "variant,input_index,similarity\n";
  for (const FidelityResult& r : results) {
    for (size_t i = 0; i < r.similarity.size(); ++i) {
      out += r.variant;
      out += ',';
      out += std::to_string(i);
      out += ',';
      append_double6(out, r.similarity[i]);
      out += '\n';
    }
  }
  out += "variant,mean,stddev\n";
  for (const FidelityResult& r : results) {
    out += r.variant;
    out += ',';
    append_double6(out, r.mean);
    out += ',';
    append_double6(out, r.stddev);
    out += '\n';
  }
  return out;
}

std::string timings_to_csv(
    const std::vector<std::pair<std::string, int64_t>>& timings) {
  std::string out = "phase,us\n";
  for (const auto& [phase, us] : timings) {
    out += phase;
    out += ',';
    out += std::to_string(us);
    out += '\n';
  }
  return out;
}

}  // namespace limecert

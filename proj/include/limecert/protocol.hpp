#pragma once

#include <memory>
#include <span>
#include <string>

#include "limecert/relation.hpp"

namespace limecert {

// Everything the model owner publishes before answering queries.
struct PublicBundle {
  uint32_t version = 1;
  Commitment com_w;
  Commitment com_r;
  LimeConfig cfg;

  friend bool operator==(const PublicBundle&, const PublicBundle&) = default;
};

// The owner's long-lived secrets plus the published bundle.
struct ProverState {
  ModelWeights model;
  FieldElement r_p;
  Bytes rho_w;
  Bytes rho_r;
  PublicBundle bundle;
};

struct Certificate {
  uint32_t version = 1;
  std::string backend = "replay";
  Statement stmt;
  Bytes proof;  // backend payload

  friend bool operator==(const Certificate&, const Certificate&) = default;
};

// Seam where a succinct proof system would plug in. The replay backend
// "proves" by disclosing the canonical witness encoding and verifies by
// re-running the relation checker; sound and complete, not zero-knowledge,
// and deliberately so (see README).
class ProofBackend {
 public:
  virtual ~ProofBackend() = default;
  virtual std::string name() const = 0;
  virtual Bytes prove(const Statement& stmt, const Witness& wit) = 0;
  virtual CheckReport verify(const Statement& stmt, const Bytes& proof) = 0;
};

class ReplayBackend : public ProofBackend {
 public:
  std::string name() const override { return "replay"; }
  Bytes prove(const Statement& stmt, const Witness& wit) override;
  CheckReport verify(const Statement& stmt, const Bytes& proof) override;
};

Bytes encode_witness(const Witness& wit);
Witness decode_witness(std::span<const uint8_t> data);  // throws on malformed

// Offline phase: commits to the model and to a fresh prover nonce. All
// randomness is derived from `entropy` (>= 16 bytes), so a given entropy
// string reproduces the identical bundle.
ProverState setup(ModelWeights model, const LimeConfig& cfg,
                  std::span<const uint8_t> entropy);

struct ProveResult {
  Label o = 0;
  Explanation e;
  Certificate cert;
  Witness wit;  // disclosed witness (also encoded inside cert.proof)
  std::vector<std::pair<std::string, int64_t>> timings_us;
};

// Online phase for one query: explanation pipeline under key r_p + r_v,
// statement/witness assembly, backend proof, and a mandatory self-check so
// an honest prover can never ship a failing certificate.
ProveResult prove(const ProverState& state, std::span<const int64_t> x,
                  const FieldElement& r_v, ProofBackend& backend);

// Verifier side: statement binding against the presented values, then the
// backend's relation check.
CheckReport verify_certificate(const PublicBundle& bundle,
                               std::span<const int64_t> x,
                               const FieldElement& r_v, Label o,
                               const Explanation& e, const Certificate& cert,
                               ProofBackend& backend);

// Non-interactive challenge derivation from the public transcript; weaker
// than a fresh verifier nonce (a prover could grind queries), provided for
// batch evaluation behind cfg.rv_mode = derived.
FieldElement derive_rv(const PublicBundle& bundle, std::span<const int64_t> x);

std::string bundle_to_json(const PublicBundle& bundle);
PublicBundle bundle_from_json(const std::string& text);
std::string certificate_to_json(const Certificate& cert);
Certificate certificate_from_json(const std::string& text);

}  // namespace limecert

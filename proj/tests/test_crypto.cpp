#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>
#include <set>

#include "limecert/commitment.hpp"
#include "limecert/prf.hpp"
#include "limecert/sha256.hpp"

#include "oracle.hpp"

using namespace limecert;

namespace {

Bytes str_bytes(const std::string& s) { return Bytes(s.begin(), s.end()); }

Bytes random_rho(std::mt19937_64& rng) {
  Bytes rho(kBlindingBytes);
  for (auto& b : rho) b = static_cast<uint8_t>(rng());
  return rho;
}

}  // namespace

TEST_CASE("sha256 known answers") {
  CHECK(hex_encode(sha256(Bytes{})) ==
        "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
  CHECK(hex_encode(sha256(str_bytes("abc"))) ==
        "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
  CHECK(hex_encode(sha256(str_bytes(
            "abcdbcdecdefdefgefghfghighijhijkijkljklmklmnlmnomnopnopq"))) ==
        "248d6a61d20638b8e5c026930c3e6039a33ce45964ff2167f6ecedd419db06c1");
  Bytes million(1000000, 'a');
  CHECK(hex_encode(sha256(million)) ==
        "cdc76e5c9914fb9281a1c7e284d73e67f1809a48a497200e046d39ccc7112cd0");
}

TEST_CASE("sha256 streaming equals one-shot") {
  std::mt19937_64 rng(21);
  for (int t = 0; t < 100; ++t) {
    size_t len = rng() % 500;
    Bytes msg(len);
    for (auto& b : msg) b = static_cast<uint8_t>(rng());
    Sha256 h;
    size_t pos = 0;
    while (pos < len) {
      size_t chunk = 1 + rng() % 64;
      chunk = std::min(chunk, len - pos);
      h.update(std::span<const uint8_t>(msg).subspan(pos, chunk));
      pos += chunk;
    }
    CHECK(h.finish() == sha256(msg));
  }
}

TEST_CASE("commitment determinism and binding") {
  std::mt19937_64 rng(22);
  Bytes msg = str_bytes("the committed message");
  Bytes rho = random_rho(rng);

  Commitment c1 = commit("xp.test", msg, rho);
  Commitment c2 = commit("xp.test", msg, rho);
  CHECK(c1 == c2);
  CHECK(verify_opening(c1, "xp.test", msg, rho));

  Bytes msg2 = msg;
  msg2[3] ^= 1;
  CHECK_FALSE(verify_opening(c1, "xp.test", msg2, rho));

  Bytes rho2 = rho;
  rho2[0] ^= 1;
  CHECK_FALSE(verify_opening(c1, "xp.test", msg, rho2));
  CHECK_FALSE(verify_opening(c1, "xp.other", msg, rho));

  // different blinding implies a different digest across many trials
  std::set<Digest> seen;
  for (int t = 0; t < 1000; ++t) {
    seen.insert(commit("xp.test", msg, random_rho(rng)).digest);
  }
  CHECK(seen.size() == 1000);

  Bytes short_rho(8, 0xaa);
  CHECK_THROWS_AS(commit("xp.test", msg, short_rho), std::invalid_argument);
  CHECK_FALSE(verify_opening(c1, "xp.test", msg, short_rho));
}

TEST_CASE("commitment separates message and blinding boundaries") {
  // same concatenation, different split: length framing must distinguish
  std::mt19937_64 rng(23);
  Bytes rho1 = random_rho(rng);
  Bytes msg1 = str_bytes("ab");
  Bytes msg2 = msg1;
  msg2.push_back(rho1[0]);
  Bytes rho2(rho1.begin() + 1, rho1.end());
  rho2.push_back(0x00);
  CHECK(commit("t", msg1, rho1).digest != commit("t", msg2, rho2).digest);
}

TEST_CASE("prf determinism and distinctness") {
  std::mt19937_64 rng(24);
  for (int t = 0; t < 100; ++t) {
    Digest seed;
    for (auto& b : seed) b = static_cast<uint8_t>(rng());
    FieldElement k = FieldElement::reduce_from_bytes(seed);
    CHECK(prf_hash(k, 7) == prf_hash(k, 7));
    CHECK(prf_hash(k, 0) != prf_hash(k, 1));
    CHECK(prf_hash(k, 0).is_canonical());
  }
  // stream indexing matches individual calls
  FieldElement k = FieldElement::from_u64(99);
  std::vector<FieldElement> stream = prf_stream(k, 10);
  REQUIRE(stream.size() == 10);
  for (uint64_t i = 0; i < 10; ++i) CHECK(stream[i] == prf_hash(k, i));
  // key separation
  CHECK(prf_hash(FieldElement::from_u64(1), 0) !=
        prf_hash(FieldElement::from_u64(2), 0));
}

TEST_CASE("uniform_samples positional decomposition") {
  // digest 0 decomposes to all-zero limbs
  std::vector<FieldElement> zero{FieldElement::from_u64(0)};
  std::vector<uint32_t> limbs = uniform_samples(zero, 8, 16);
  for (uint32_t v : limbs) CHECK(v == 0);

  // 0x0201 at b=8: least significant limb first
  std::vector<FieldElement> v0201{FieldElement::from_u64(0x0201)};
  limbs = uniform_samples(v0201, 8, 16);
  CHECK(limbs[0] == 1);
  CHECK(limbs[1] == 2);
  for (size_t i = 2; i < limbs.size(); ++i) CHECK(limbs[i] == 0);

  // limbs continue into the next digest once the window is consumed
  std::vector<FieldElement> two{FieldElement::from_u64(5),
                                FieldElement::from_u64(9)};
  limbs = uniform_samples(two, 16, 9);
  CHECK(limbs[0] == 5);
  CHECK(limbs[8] == 9);

  CHECK_THROWS_AS(uniform_samples(zero, 16, 9), std::invalid_argument);
}

TEST_CASE("uniform_samples window reconstruction with remainder") {
  // b=12 leaves 8 remainder bits per 128-bit window; the limbs plus the
  // remainder must reassemble the window exactly
  std::mt19937_64 rng(25);
  for (int t = 0; t < 200; ++t) {
    Digest seed;
    for (auto& b : seed) b = static_cast<uint8_t>(rng());
    FieldElement h = FieldElement::reduce_from_bytes(seed);
    std::vector<FieldElement> digests{h};
    uint32_t bits = 12;
    uint32_t per = limbs_per_digest(bits);
    CHECK(per == 10);
    std::vector<uint32_t> limbs = uniform_samples(digests, bits, per);

    using u128 = unsigned __int128;
    u128 window = (u128(h.limb[1]) << 64) | h.limb[0];
    u128 rebuilt = 0;
    for (uint32_t i = 0; i < per; ++i) {
      CHECK(limbs[i] < (1u << bits));
      rebuilt |= u128(limbs[i]) << (bits * i);
    }
    u128 rem = window >> (bits * per);
    CHECK(rem < (u128(1) << (128 - bits * per)));
    CHECK(rebuilt + (rem << (bits * per)) == window);
  }
}

TEST_CASE("uniform limbs pass a chi-square uniformity test") {
  FieldElement k = FieldElement::from_u64(0x5a5a5a5a);
  const size_t count = 100000;
  std::vector<FieldElement> digests = prf_stream(k, digests_needed(count, 16));
  std::vector<uint32_t> limbs = uniform_samples(digests, 16, count);
  // bucket the 16-bit limbs into 256 cells
  std::vector<uint64_t> counts(256, 0);
  for (uint32_t v : limbs) counts[v >> 8]++;
  double stat = oracle::chi_square_statistic(
      counts, static_cast<double>(count) / 256.0);
  // 1% upper tail for 255 degrees of freedom
  CHECK(stat < oracle::chi_square_quantile(255.0, 2.326));
}

TEST_CASE("per-bit bias of prf limbs is below one percent") {
  FieldElement k = FieldElement::from_u64(0xbead);
  const size_t count = 100000;
  std::vector<FieldElement> digests = prf_stream(k, digests_needed(count, 16));
  std::vector<uint32_t> limbs = uniform_samples(digests, 16, count);
  for (uint32_t bit = 0; bit < 16; ++bit) {
    size_t ones = 0;
    for (uint32_t v : limbs) ones += (v >> bit) & 1;
    double freq = static_cast<double>(ones) / count;
    CHECK(std::abs(freq - 0.5) < 0.01);
  }
}

TEST_CASE("gaussian sampler hits the median and the moments") {
  LookupTable table = LookupTable::make_gauss_inv_cdf(16, 10000, 40000);
  std::vector<uint32_t> median{1u << 15};
  std::vector<int64_t> center = gaussian_samples(median, table);
  CHECK(std::abs(center[0]) <= 1);

  FieldElement k = FieldElement::from_u64(0x60061e);
  const size_t count = 100000;
  std::vector<FieldElement> digests = prf_stream(k, digests_needed(count, 16));
  std::vector<uint32_t> limbs = uniform_samples(digests, 16, count);
  std::vector<int64_t> raw = gaussian_samples(limbs, table);
  double mean = 0.0;
  for (int64_t r : raw) mean += dequantize(r, 10000);
  mean /= static_cast<double>(count);
  double var = 0.0;
  for (int64_t r : raw) {
    double v = dequantize(r, 10000) - mean;
    var += v * v;
  }
  var /= static_cast<double>(count - 1);
  CHECK(std::abs(mean) < 0.02);
  CHECK(std::sqrt(var) > 0.97);
  CHECK(std::sqrt(var) < 1.03);
}

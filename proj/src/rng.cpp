#include "twistrec/rng.hpp"

#include <vector>

namespace twistrec {

namespace {

constexpr uint32_t kPhiloxM0 = 0xD2511F53u;
constexpr uint32_t kPhiloxM1 = 0xCD9E8D57u;
constexpr uint32_t kPhiloxW0 = 0x9E3779B9u;
constexpr uint32_t kPhiloxW1 = 0xBB67AE85u;

inline void philox_round(std::array<uint32_t, 4>& c, const std::array<uint32_t, 2>& k) {
  uint64_t p0 = uint64_t(kPhiloxM0) * c[0];
  uint64_t p1 = uint64_t(kPhiloxM1) * c[2];
  std::array<uint32_t, 4> out;
  out[0] = uint32_t(p1 >> 32) ^ c[1] ^ k[0];
  out[1] = uint32_t(p1);
  out[2] = uint32_t(p0 >> 32) ^ c[3] ^ k[1];
  out[3] = uint32_t(p0);
  c = out;
}

}  // namespace

std::array<uint32_t, 4> philox4x32(std::array<uint32_t, 4> ctr,
                                   std::array<uint32_t, 2> key) {
  for (int r = 0; r < 10; ++r) {
    if (r > 0) {
      key[0] += kPhiloxW0;
      key[1] += kPhiloxW1;
    }
    philox_round(ctr, key);
  }
  return ctr;
}

uint64_t BitTape::word(uint64_t w) const {
  uint64_t block = w >> 1;
  std::array<uint32_t, 4> ctr = {
      uint32_t(index_), uint32_t(index_ >> 32),
      uint32_t(block), uint32_t(block >> 32) ^ stream_};
  std::array<uint32_t, 2> key = {uint32_t(seed_), uint32_t(seed_ >> 32)};
  auto out = philox4x32(ctr, key);
  if (w & 1) return (uint64_t(out[2]) << 32) | out[3];
  return (uint64_t(out[0]) << 32) | out[1];
}

CertifiedPoint BitTape::uniform(int prec, uint64_t word_offset) const {
  int nwords = (prec + 63) / 64;
  int p = nwords * 64;
  BigFloat mid(p + 8);
  mpfr_set_zero(mid.raw(), 1);
  BigFloat term(64);
  for (int k = 0; k < nwords; ++k) {
    uint64_t w = word(word_offset + uint64_t(k));
    mpfr_set_uj(term.raw(), w, MPFR_RNDN);  // exact: 64-bit value in 64 bits
    mpfr_mul_2si(term.raw(), term.raw(), -64 * (k + 1), MPFR_RNDN);
    mpfr_add(mid.raw(), mid.raw(), term.raw(), MPFR_RNDN);  // exact by construction
  }
  // True value lies in [mid, mid + 2^-64n); recenter.
  BigFloat half = BigFloat::pow2(-64 * nwords - 1);
  mpfr_add(mid.raw(), mid.raw(), half.raw(), MPFR_RNDN);
  CertifiedPoint pt{std::move(mid), rad_zero(), p + 8};
  mpfr_set_ui_2exp(pt.rad.raw(), 1, -64 * nwords - 1, MPFR_RNDU);
  return pt;
}

}  // namespace twistrec

#pragma once

#include <array>
#include <cstdint>

#include "twistrec/ball.hpp"

namespace twistrec {

// Philox4x32-10 counter-based generator (Salmon et al.). A draw is a pure
// function of (key, counter), which makes sampling reproducible and
// independent of worker count.
std::array<uint32_t, 4> philox4x32(std::array<uint32_t, 4> ctr,
                                   std::array<uint32_t, 2> key);

// Deterministic infinite stream of 64-bit words addressed by
// (seed, stream, index, word). Word w of sample `index` on stream `stream`
// never changes, so a point sampled at precision p refines to the same
// mathematical point at precision 2p.
class BitTape {
public:
  BitTape(uint64_t seed, uint32_t stream, uint64_t index)
      : seed_(seed), stream_(stream), index_(index) {}

  uint64_t word(uint64_t w) const;

  // Uniform in [0,1) at >= prec bits: the first ceil(prec/64) words are the
  // leading binary digits; the unread tail is the radius.
  CertifiedPoint uniform(int prec, uint64_t word_offset = 0) const;

private:
  uint64_t seed_;
  uint32_t stream_;
  uint64_t index_;
};

// Word-index space reserved per rejection-sampling proposal, so an accepted
// proposal can be refined without disturbing later proposals.
inline constexpr uint64_t kWordsPerProposal = uint64_t(1) << 32;

}  // namespace twistrec

#include <algorithm>
#include <stdexcept>
#include <utility>

#include "snstf/rng.hpp"
#include "snstf/security.hpp"

namespace snstf {

namespace {

void shuffle(std::vector<std::size_t>& v, Rng& rng) {
  for (std::size_t i = v.size(); i > 1; --i) std::swap(v[i - 1], v[rng.below(i)]);
}

}  // namespace

std::vector<BitPair> aopp_pairs(std::span<const std::uint8_t> bits_b, std::uint64_t seed) {
  std::vector<std::size_t> ones, zeros;
  for (std::size_t i = 0; i < bits_b.size(); ++i) (bits_b[i] ? ones : zeros).push_back(i);

  Rng rng(seed);
  shuffle(ones, rng);
  shuffle(zeros, rng);
  const std::size_t n = std::min(ones.size(), zeros.size());
  std::vector<BitPair> pairs(n);
  for (std::size_t i = 0; i < n; ++i) {
    pairs[i] = rng.bernoulli(0.5) ? BitPair{ones[i], zeros[i]} : BitPair{zeros[i], ones[i]};
  }
  return pairs;
}

AoppResult aopp_distill(std::span<const std::uint8_t> bits_a, std::span<const std::uint8_t> bits_b,
                        std::span<const BitPair> pairs) {
  if (bits_a.size() != bits_b.size()) throw std::invalid_argument("aopp: bit strings differ in length");
  AoppResult r;
  r.pairs_formed = pairs.size();
  for (const auto& p : pairs) {
    if (p.first >= bits_a.size() || p.second >= bits_a.size())
      throw std::out_of_range("aopp: pair index outside bit string");
    if ((bits_a[p.first] ^ bits_a[p.second]) == 0) continue;
    r.survivors.push_back(p);
    r.bits_a.push_back(bits_a[p.first]);
    r.bits_b.push_back(bits_b[p.first]);
  }
  r.survived = r.survivors.size();
  return r;
}

AoppResult aopp(std::span<const std::uint8_t> bits_a, std::span<const std::uint8_t> bits_b,
                std::uint64_t seed) {
  if (bits_a.size() != bits_b.size()) throw std::invalid_argument("aopp: bit strings differ in length");
  const auto pairs = aopp_pairs(bits_b, seed);
  return aopp_distill(bits_a, bits_b, pairs);
}

double error_rate(std::span<const std::uint8_t> a, std::span<const std::uint8_t> b) {
  if (a.size() != b.size()) throw std::invalid_argument("error_rate: length mismatch");
  if (a.empty()) return 0.0;
  std::size_t e = 0;
  for (std::size_t i = 0; i < a.size(); ++i) e += (a[i] != b[i]) ? 1 : 0;
  return static_cast<double>(e) / static_cast<double>(a.size());
}

double post_aopp_phase_error(double n1_before, double e1ph_before, double survived_pairs) {
  if (!(n1_before >= 0.0) || !(survived_pairs >= 0.0))
    throw std::invalid_argument("post_aopp_phase_error: counts must be >= 0");
  if (!(e1ph_before >= 0.0 && e1ph_before <= 1.0))
    throw std::invalid_argument("post_aopp_phase_error: e1ph outside [0,1]");
  // The pair's phase flips iff exactly one constituent flips.
  return std::clamp(2.0 * e1ph_before * (1.0 - e1ph_before), 0.0, 0.5);
}

AoppExpectation expected_aopp(const SessionTally& tally, const DecoyEstimate& decoy) {
  // Bob holds 1 when he did not send, 0 when he sent.
  const double correct_one = tally.at(Slot::z_send, Slot::z_none).events;
  const double wrong_one = tally.at(Slot::z_none, Slot::z_none).events;
  const double correct_zero = tally.at(Slot::z_none, Slot::z_send).events;
  const double wrong_zero = tally.at(Slot::z_send, Slot::z_send).events;
  const double ones = correct_one + wrong_one;
  const double zeros = correct_zero + wrong_zero;

  AoppExpectation out;
  if (ones <= 0.0 || zeros <= 0.0) return out;
  out.pairs = std::min(ones, zeros);
  const double c1 = correct_one / ones;
  const double c0 = correct_zero / zeros;
  // Alice's parity is odd iff both members are right or both are wrong.
  const double both_right = c1 * c0;
  const double both_wrong = (1.0 - c1) * (1.0 - c0);
  const double survive = both_right + both_wrong;
  out.survived = out.pairs * survive;
  out.e_z = survive > 0.0 ? both_wrong / survive : 0.0;
  const double untagged_one = std::min(1.0, decoy.n1_alice / ones);
  const double untagged_zero = std::min(1.0, decoy.n1_bob / zeros);
  out.untagged = std::min(out.survived, out.pairs * untagged_one * untagged_zero);
  return out;
}

}  // namespace snstf

#ifndef GMMHMM_FEATURES_HPP
#define GMMHMM_FEATURES_HPP

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "gmmhmm/discrete_hmm.hpp"
#include "gmmhmm/gmm_hmm.hpp"
#include "gmmhmm/sequence.hpp"

namespace gmmhmm {

// ---------------------------------------------------------------------------
// Byte entropy

struct EntropyConfig {
  std::size_t window = 512;
  std::size_t slide = 256;

  /// window >= 2, 1 <= slide <= window.
  void validate() const;
};

/// Window/slide pairings swept by the entropy experiments; slide is half the window.
inline constexpr std::array<EntropyConfig, 3> kEntropyGrid{{{512, 256}, {256, 128}, {128, 64}}};

/// Shannon entropy in bits of the byte histogram of `bytes` (0 for empty input).
double shannon_entropy(std::span<const std::uint8_t> bytes);

/// Entropy of windows starting at 0, slide, 2 slide, ... while the whole
/// window fits; a trailing partial window is dropped. Output length is
/// (len - window) / slide + 1. Throws TooShortInputError when len < window.
ContinuousSequence entropy_series(std::span<const std::uint8_t> bytes, const EntropyConfig& cfg);

// ---------------------------------------------------------------------------
// Opcodes

/// Top-k mnemonics in rank order; every other mnemonic maps to other_index().
class OpcodeVocab {
 public:
  explicit OpcodeVocab(std::vector<std::string> ranked_opcodes);

  const std::vector<std::string>& ranked_opcodes() const { return ranked_; }
  Symbol other_index() const { return static_cast<Symbol>(ranked_.size()); }
  /// Number of observation symbols K (ranked mnemonics plus "other").
  std::size_t alphabet_size() const { return ranked_.size() + 1; }
  /// Index of a (normalised) mnemonic, other_index() when out of vocabulary.
  Symbol lookup(std::string_view mnemonic) const;

 private:
  std::vector<std::string> ranked_;
  std::unordered_map<std::string, Symbol> index_;
};

struct VocabBuild {
  OpcodeVocab vocab;
  /// Fraction of all training mnemonics covered by the ranked ones.
  double coverage = 0.0;
};

/// Ranks mnemonics by total count over all streams (ties: lexicographically
/// smaller first) and keeps the top k.
VocabBuild build_opcode_vocab(std::span<const std::vector<std::string>> streams, std::size_t k = 30);

/// Maps each mnemonic to its vocabulary index and keeps the first t_cap symbols.
DiscreteSequence encode_opcodes(std::span<const std::string> stream, const OpcodeVocab& vocab,
                                std::size_t t_cap = 100000);

/// Trimmed, lower-cased mnemonic.
std::string normalize_mnemonic(std::string_view raw);

// ---------------------------------------------------------------------------
// Synthetic sequences

/// Samples a hidden path from pi and A, then one emission per step.
/// Deterministic for a given seed.
DiscreteSequence synth_generate(const DiscreteHmm& model, std::size_t t, std::uint64_t seed);
ContinuousSequence synth_generate(const GmmHmm& model, std::size_t t, std::uint64_t seed);

}  // namespace gmmhmm

#endif  // GMMHMM_FEATURES_HPP

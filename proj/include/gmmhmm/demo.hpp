#ifndef GMMHMM_DEMO_HPP
#define GMMHMM_DEMO_HPP

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "gmmhmm/discrete_hmm.hpp"
#include "gmmhmm/gmm_hmm.hpp"
#include "gmmhmm/markov.hpp"
#include "gmmhmm/restarts.hpp"
#include "gmmhmm/sequence.hpp"

namespace gmmhmm {

/// a..z -> 0..25, word-space -> 26.
inline constexpr std::size_t kEnglishAlphabet = 27;
inline constexpr Symbol kWordSpace = 26;
/// Encoded a, e, i, o, u and word-space.
inline constexpr std::array<Symbol, 6> kVowelsAndSpace{0, 4, 8, 14, 20, 26};

/// Lower-cases letters, turns every whitespace run into one word-space,
/// drops everything else (so "don't" becomes "dont"), and skips leading
/// space. Stops after `limit` symbols.
std::vector<Symbol> encode_english(std::string_view text, std::size_t limit);

struct DemoConfig {
  std::size_t length = 50000;
  std::size_t n_states = 2;
  std::size_t n_components = 6;
  /// Half of the unit spacing between letter codes: each symbol's cell is
  /// integrated exactly, so a component cannot buy likelihood by shrinking
  /// onto one code.
  double eps = 0.5;
  std::size_t restarts = 100;
  std::uint64_t seed = 0;
  std::size_t jobs = 1;
  TrainConfig gmm{.max_iters = 1000, .tol = 1e-9, .init_noise = 0.1, .variance_floor = 1e-6, .mean_jitter = 1.0};
  TrainConfig discrete{.max_iters = 2000, .tol = 1e-9, .init_noise = 0.1, .variance_floor = 1e-6, .mean_jitter = 0.0};
};

struct DemoResult {
  std::vector<Symbol> symbols;
  RestartOutcome<GmmTrainResult> gmm;
  RestartOutcome<DiscreteTrainResult> discrete;
  /// State of the best GMM-HMM whose components sit on the vowels and space.
  std::optional<std::size_t> gmm_vowel_state;
  /// State of the best discrete HMM that is likelier for every vowel and space.
  std::optional<std::size_t> discrete_vowel_state;
};

/// True when the state's component means can be matched one-to-one to
/// the encoded vowels and space, each within `tolerance`.
bool means_cover_vowels(const GaussianMixture& mix, double tolerance = 1.0);

/// First state of `model` satisfying means_cover_vowels, if any.
std::optional<std::size_t> gmm_vowel_state(const GmmHmm& model, double tolerance = 1.0);

/// State in which every vowel and the word-space is strictly more probable
/// than in any other state, if any.
std::optional<std::size_t> discrete_vowel_state(const DiscreteHmm& model);

/// Trains both model families on the encoded corpus. Throws
/// TooShortInputError when the text yields fewer than cfg.length symbols.
DemoResult run_english_demo(std::string_view text, const DemoConfig& cfg);

}  // namespace gmmhmm

#endif  // GMMHMM_DEMO_HPP

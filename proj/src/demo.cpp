#include "gmmhmm/demo.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <numeric>

#include <fmt/format.h>

#include "gmmhmm/error.hpp"

namespace gmmhmm {

std::vector<Symbol> encode_english(std::string_view text, std::size_t limit) {
  std::vector<Symbol> out;
  bool after_space = true;
  for (char ch : text) {
    if (out.size() >= limit) break;
    const auto c = static_cast<unsigned char>(ch);
    if (c < 0x80 && std::isalpha(c)) {
      out.push_back(static_cast<Symbol>(std::tolower(c) - 'a'));
      after_space = false;
    } else if (c < 0x80 && std::isspace(c)) {
      if (!after_space) out.push_back(kWordSpace);
      after_space = true;
    }
  }
  return out;
}

bool means_cover_vowels(const GaussianMixture& mix, double tolerance) {
  if (mix.dim() != 1 || mix.size() < kVowelsAndSpace.size()) return false;
  // Brute-force the matching: at most M!/(M-6)! assignments for small M.
  std::vector<std::size_t> order(mix.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  do {
    bool ok = true;
    for (std::size_t v = 0; v < kVowelsAndSpace.size() && ok; ++v) {
      ok = std::abs(mix.component(order[v]).mean()[0] - static_cast<double>(kVowelsAndSpace[v])) <= tolerance;
    }
    if (ok) return true;
  } while (std::next_permutation(order.begin(), order.end()));
  return false;
}

std::optional<std::size_t> gmm_vowel_state(const GmmHmm& model, double tolerance) {
  for (std::size_t j = 0; j < model.n_states(); ++j) {
    if (means_cover_vowels(model.emission(j), tolerance)) return j;
  }
  return std::nullopt;
}

std::optional<std::size_t> discrete_vowel_state(const DiscreteHmm& model) {
  const auto& b = model.emissions();
  if (b.cols() < static_cast<Eigen::Index>(kEnglishAlphabet)) return std::nullopt;
  for (Eigen::Index s = 0; s < b.rows(); ++s) {
    bool ok = true;
    for (Symbol v : kVowelsAndSpace) {
      for (Eigen::Index o = 0; o < b.rows() && ok; ++o) {
        if (o != s && !(b(s, v) > b(o, v))) ok = false;
      }
    }
    if (ok) return static_cast<std::size_t>(s);
  }
  return std::nullopt;
}

DemoResult run_english_demo(std::string_view text, const DemoConfig& cfg) {
  auto symbols = encode_english(text, cfg.length);
  if (symbols.size() < cfg.length) {
    throw TooShortInputError(
        fmt::format("corpus yields {} letters and spaces, need {}", symbols.size(), cfg.length), symbols.size(),
        cfg.length);
  }
  std::vector<double> values(symbols.begin(), symbols.end());
  const auto continuous = ContinuousSequence::scalar(std::move(values));
  const DiscreteSequence discrete(symbols);

  auto gmm = best_of_restarts<GmmTrainResult>(cfg.restarts, derive_seed(cfg.seed, 1), cfg.jobs, [&](std::uint64_t s) {
    return ghmm_train(continuous, cfg.n_states, cfg.n_components, cfg.eps, cfg.gmm, s);
  });
  auto disc =
      best_of_restarts<DiscreteTrainResult>(cfg.restarts, derive_seed(cfg.seed, 2), cfg.jobs, [&](std::uint64_t s) {
        return dhmm_train(discrete, cfg.n_states, kEnglishAlphabet, cfg.discrete, s);
      });
  const auto gv = gmm_vowel_state(gmm.best.model);
  const auto dv = discrete_vowel_state(disc.best.model);
  return DemoResult{std::move(symbols), std::move(gmm), std::move(disc), gv, dv};
}

}  // namespace gmmhmm

#include "gmmhmm/features.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <map>
#include <random>

#include <fmt/format.h>

#include "gmmhmm/error.hpp"

namespace gmmhmm {

void EntropyConfig::validate() const {
  if (window < 2) throw InputDomainError(fmt::format("entropy window must be >= 2, got {}", window));
  if (slide < 1 || slide > window) {
    throw InputDomainError(fmt::format("entropy slide must lie in [1, {}], got {}", window, slide));
  }
}

namespace {

double entropy_from_counts(const std::array<std::size_t, 256>& counts, std::size_t total) {
  const double n = static_cast<double>(total);
  double h = 0.0;
  for (std::size_t c : counts) {
    if (c == 0) continue;
    const double p = static_cast<double>(c) / n;
    h -= p * std::log2(p);
  }
  // -0.0 for a single repeated byte
  return h == 0.0 ? 0.0 : h;
}

}  // namespace

double shannon_entropy(std::span<const std::uint8_t> bytes) {
  if (bytes.empty()) return 0.0;
  std::array<std::size_t, 256> counts{};
  for (auto b : bytes) ++counts[b];
  return entropy_from_counts(counts, bytes.size());
}

ContinuousSequence entropy_series(std::span<const std::uint8_t> bytes, const EntropyConfig& cfg) {
  cfg.validate();
  if (bytes.size() < cfg.window) {
    throw TooShortInputError(
        fmt::format("input of {} bytes is shorter than one {}-byte window", bytes.size(), cfg.window), bytes.size(),
        cfg.window);
  }
  const std::size_t n_windows = (bytes.size() - cfg.window) / cfg.slide + 1;
  std::vector<double> out;
  out.reserve(n_windows);

  std::array<std::size_t, 256> counts{};
  for (std::size_t i = 0; i < cfg.window; ++i) ++counts[bytes[i]];
  out.push_back(entropy_from_counts(counts, cfg.window));
  for (std::size_t w = 1; w < n_windows; ++w) {
    const std::size_t old_start = (w - 1) * cfg.slide;
    const std::size_t new_start = w * cfg.slide;
    // Slide the histogram: drop [old_start, new_start), add the new tail.
    for (std::size_t i = old_start; i < new_start; ++i) --counts[bytes[i]];
    for (std::size_t i = std::max(new_start, old_start + cfg.window); i < new_start + cfg.window; ++i) {
      ++counts[bytes[i]];
    }
    out.push_back(entropy_from_counts(counts, cfg.window));
  }
  return ContinuousSequence::scalar(std::move(out));
}

std::string normalize_mnemonic(std::string_view raw) {
  const auto first = raw.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = raw.find_last_not_of(" \t\r\n");
  std::string out(raw.substr(first, last - first + 1));
  std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) { return std::tolower(c); });
  return out;
}

OpcodeVocab::OpcodeVocab(std::vector<std::string> ranked_opcodes) : ranked_(std::move(ranked_opcodes)) {
  for (std::size_t i = 0; i < ranked_.size(); ++i) {
    if (ranked_[i].empty()) throw InputDomainError(fmt::format("empty mnemonic at vocabulary rank {}", i), i);
    if (!index_.emplace(ranked_[i], static_cast<Symbol>(i)).second) {
      throw InputDomainError(fmt::format("duplicate mnemonic '{}' in vocabulary", ranked_[i]), i);
    }
  }
}

Symbol OpcodeVocab::lookup(std::string_view mnemonic) const {
  const auto it = index_.find(std::string(mnemonic));
  return it == index_.end() ? other_index() : it->second;
}

VocabBuild build_opcode_vocab(std::span<const std::vector<std::string>> streams, std::size_t k) {
  std::map<std::string, std::size_t> counts;
  std::size_t total = 0;
  for (const auto& stream : streams) {
    for (const auto& raw : stream) {
      auto m = normalize_mnemonic(raw);
      if (m.empty()) continue;
      ++counts[std::move(m)];
      ++total;
    }
  }
  if (total == 0) throw TooShortInputError("opcode corpus is empty", 0, 1);

  std::vector<std::pair<std::string, std::size_t>> ranked(counts.begin(), counts.end());
  // counts is already in lexicographic order, so a stable sort by count keeps the tie rule
  std::stable_sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) { return a.second > b.second; });
  if (ranked.size() > k) ranked.resize(k);

  std::vector<std::string> names;
  std::size_t covered = 0;
  for (auto& [name, count] : ranked) {
    covered += count;
    names.push_back(name);
  }
  return VocabBuild{OpcodeVocab(std::move(names)), static_cast<double>(covered) / static_cast<double>(total)};
}

DiscreteSequence encode_opcodes(std::span<const std::string> stream, const OpcodeVocab& vocab, std::size_t t_cap) {
  std::vector<Symbol> out;
  for (const auto& raw : stream) {
    if (t_cap != 0 && out.size() >= t_cap) break;
    const auto m = normalize_mnemonic(raw);
    if (m.empty()) continue;
    out.push_back(vocab.lookup(m));
  }
  if (out.empty()) throw TooShortInputError("opcode stream is empty", 0, 1);
  return DiscreteSequence(std::move(out));
}

namespace {

std::size_t sample_index(const double* probs, std::size_t n, std::ptrdiff_t stride, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  const double u = u01(rng);
  double acc = 0.0;
  std::size_t last_positive = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double p = probs[static_cast<std::ptrdiff_t>(i) * stride];
    if (p > 0.0) last_positive = i;
    acc += p;
    if (u < acc) return i;
  }
  return last_positive;  // rounding left u above the cumulative sum
}

std::size_t sample_row(const Eigen::MatrixXd& m, Eigen::Index row, std::mt19937_64& rng) {
  return sample_index(&m(row, 0), static_cast<std::size_t>(m.cols()), m.rows(), rng);
}

std::vector<std::size_t> sample_path(const Eigen::VectorXd& pi, const Eigen::MatrixXd& a, std::size_t t,
                                     std::mt19937_64& rng) {
  std::vector<std::size_t> path(t);
  for (std::size_t s = 0; s < t; ++s) {
    path[s] = s == 0 ? sample_index(pi.data(), static_cast<std::size_t>(pi.size()), 1, rng)
                     : sample_row(a, static_cast<Eigen::Index>(path[s - 1]), rng);
  }
  return path;
}

}  // namespace

DiscreteSequence synth_generate(const DiscreteHmm& model, std::size_t t, std::uint64_t seed) {
  if (t < 1) throw InputDomainError("synthetic sequence length must be >= 1");
  std::mt19937_64 rng(seed);
  const auto path = sample_path(model.pi(), model.transitions(), t, rng);
  std::vector<Symbol> out(t);
  for (std::size_t s = 0; s < t; ++s) {
    out[s] = static_cast<Symbol>(sample_row(model.emissions(), static_cast<Eigen::Index>(path[s]), rng));
  }
  return DiscreteSequence(std::move(out));
}

ContinuousSequence synth_generate(const GmmHmm& model, std::size_t t, std::uint64_t seed) {
  if (t < 1) throw InputDomainError("synthetic sequence length must be >= 1");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  const auto path = sample_path(model.pi(), model.transitions(), t, rng);
  const auto D = static_cast<Eigen::Index>(model.dim());
  std::vector<double> out;
  out.reserve(t * model.dim());
  Eigen::VectorXd z(D);
  for (std::size_t s = 0; s < t; ++s) {
    const auto& mix = model.emission(path[s]);
    const auto k = sample_index(mix.weights().data(), mix.size(), 1, rng);
    const auto& comp = mix.component(k);
    for (auto& v : z) v = normal(rng);
    const Eigen::VectorXd x = comp.mean() + comp.cholesky_lower() * z;
    out.insert(out.end(), x.data(), x.data() + D);
  }
  return ContinuousSequence(model.dim(), std::move(out));
}

}  // namespace gmmhmm

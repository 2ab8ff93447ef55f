#ifndef GMMHMM_SEQUENCE_HPP
#define GMMHMM_SEQUENCE_HPP

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace gmmhmm {

using Symbol = std::uint32_t;

/// Non-empty stream of symbol indices. The alphabet size is a property of
/// the model that scores it, so `symbol < K` is checked there.
class DiscreteSequence {
 public:
  DiscreteSequence() = default;
  explicit DiscreteSequence(std::vector<Symbol> symbols);

  std::size_t size() const { return symbols_.size(); }
  bool empty() const { return symbols_.empty(); }
  Symbol operator[](std::size_t t) const { return symbols_[t]; }
  std::span<const Symbol> symbols() const { return symbols_; }
  Symbol max_symbol() const;

  friend bool operator==(const DiscreteSequence&, const DiscreteSequence&) = default;

 private:
  std::vector<Symbol> symbols_;
};

/// Non-empty sequence of finite D-vectors, stored row-major.
class ContinuousSequence {
 public:
  ContinuousSequence() = default;
  ContinuousSequence(std::size_t dim, std::vector<double> values);
  /// D = 1 convenience.
  static ContinuousSequence scalar(std::vector<double> values);

  std::size_t size() const { return dim_ == 0 ? 0 : values_.size() / dim_; }
  bool empty() const { return values_.empty(); }
  std::size_t dim() const { return dim_; }
  std::span<const double> operator[](std::size_t t) const { return {values_.data() + t * dim_, dim_}; }
  std::span<const double> values() const { return values_; }

  friend bool operator==(const ContinuousSequence&, const ContinuousSequence&) = default;

 private:
  std::size_t dim_ = 0;
  std::vector<double> values_;
};

inline std::size_t sequence_length(const DiscreteSequence& s) { return s.size(); }
inline std::size_t sequence_length(const ContinuousSequence& s) { return s.size(); }

/// Concatenates sequences in order, stopping once `cap` observations have
/// been taken (cap == 0 means unlimited).
DiscreteSequence concatenate(std::span<const DiscreteSequence> parts, std::size_t cap = 0);
ContinuousSequence concatenate(std::span<const ContinuousSequence> parts, std::size_t cap = 0);

}  // namespace gmmhmm

#endif  // GMMHMM_SEQUENCE_HPP

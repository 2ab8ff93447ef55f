#include "gmmhmm/sequence.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "gmmhmm/error.hpp"

namespace gmmhmm {

DiscreteSequence::DiscreteSequence(std::vector<Symbol> symbols) : symbols_(std::move(symbols)) {
  if (symbols_.empty()) throw TooShortInputError("observation sequence is empty", 0, 1);
}

Symbol DiscreteSequence::max_symbol() const {
  return symbols_.empty() ? 0 : *std::max_element(symbols_.begin(), symbols_.end());
}

ContinuousSequence::ContinuousSequence(std::size_t dim, std::vector<double> values)
    : dim_(dim), values_(std::move(values)) {
  if (dim_ == 0) throw InputDomainError("observation dimension must be >= 1");
  if (values_.empty()) throw TooShortInputError("observation sequence is empty", 0, 1);
  if (values_.size() % dim_ != 0) {
    throw InputDomainError(fmt::format("{} values do not form rows of dimension {}", values_.size(), dim_));
  }
  for (std::size_t i = 0; i < values_.size(); ++i) {
    if (!std::isfinite(values_[i])) {
      throw InputDomainError(fmt::format("non-finite observation at t={}", i / dim_), i / dim_);
    }
  }
}

ContinuousSequence ContinuousSequence::scalar(std::vector<double> values) {
  return ContinuousSequence(1, std::move(values));
}

DiscreteSequence concatenate(std::span<const DiscreteSequence> parts, std::size_t cap) {
  std::vector<Symbol> out;
  for (const auto& p : parts) {
    for (Symbol s : p.symbols()) {
      if (cap != 0 && out.size() >= cap) return DiscreteSequence(std::move(out));
      out.push_back(s);
    }
  }
  return DiscreteSequence(std::move(out));
}

ContinuousSequence concatenate(std::span<const ContinuousSequence> parts, std::size_t cap) {
  if (parts.empty()) throw TooShortInputError("nothing to concatenate", 0, 1);
  const std::size_t dim = parts.front().dim();
  std::vector<double> out;
  for (const auto& p : parts) {
    if (p.dim() != dim) throw InputDomainError("cannot concatenate sequences of different dimension");
    for (std::size_t t = 0; t < p.size(); ++t) {
      if (cap != 0 && out.size() / dim >= cap) return ContinuousSequence(dim, std::move(out));
      const auto row = p[t];
      out.insert(out.end(), row.begin(), row.end());
    }
  }
  return ContinuousSequence(dim, std::move(out));
}

}  // namespace gmmhmm

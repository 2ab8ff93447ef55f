#ifndef GMMHMM_FEATURE_IO_HPP
#define GMMHMM_FEATURE_IO_HPP

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <variant>
#include <vector>

#include "gmmhmm/features.hpp"
#include "gmmhmm/sequence.hpp"

namespace gmmhmm {

// Text formats, one observation per line after a single header line:
//
//   # entropy window=<w> slide=<s>     real values (D = 1, bits)
//   # continuous dim=<D>               D whitespace-separated reals per line
//   # opcodes k=<K>                    integer symbols in [0, K)
//
// Reals are written in shortest round-trip form so reading a file back
// reproduces the sequence bit for bit.

enum class FeatureKind { kEntropy, kContinuous, kOpcodes };

struct FeatureFile {
  FeatureKind kind = FeatureKind::kEntropy;
  EntropyConfig entropy;     // kEntropy only
  std::size_t alphabet = 0;  // kOpcodes only: K
  std::variant<ContinuousSequence, DiscreteSequence> data;

  bool is_discrete() const { return kind == FeatureKind::kOpcodes; }
  const ContinuousSequence& continuous() const { return std::get<ContinuousSequence>(data); }
  const DiscreteSequence& discrete() const { return std::get<DiscreteSequence>(data); }
};

void write_entropy_file(std::ostream& out, const ContinuousSequence& seq, const EntropyConfig& cfg);
void write_continuous_file(std::ostream& out, const ContinuousSequence& seq);
void write_opcode_file(std::ostream& out, const DiscreteSequence& seq, std::size_t alphabet);

/// Throws FormatError on an unknown header, a malformed line, or a symbol >= K.
FeatureFile read_feature_file(std::istream& in);
FeatureFile read_feature_file(const std::filesystem::path& path);

/// One mnemonic per line, rank order.
void write_vocab(std::ostream& out, const OpcodeVocab& vocab);
OpcodeVocab read_vocab(std::istream& in);
OpcodeVocab read_vocab(const std::filesystem::path& path);

/// One mnemonic per line; blank lines skipped, each entry normalised.
std::vector<std::string> read_mnemonics(std::istream& in);
std::vector<std::string> read_mnemonics(const std::filesystem::path& path);

std::vector<std::uint8_t> read_bytes(const std::filesystem::path& path);

}  // namespace gmmhmm

#endif  // GMMHMM_FEATURE_IO_HPP

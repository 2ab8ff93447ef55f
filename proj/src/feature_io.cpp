#include "gmmhmm/feature_io.hpp"

#include <charconv>
#include <fstream>
#include <iterator>
#include <sstream>

#include <fmt/format.h>
#include <fmt/ostream.h>

#include "gmmhmm/error.hpp"

namespace gmmhmm {

namespace {

std::ifstream open_input(const std::filesystem::path& path, std::ios::openmode mode = std::ios::in) {
  std::ifstream in(path, mode);
  if (!in) throw FormatError(fmt::format("cannot open {}", path.string()));
  return in;
}

/// Value of `key=<n>` inside a header line.
std::size_t header_field(const std::string& header, std::string_view key) {
  const auto pos = header.find(std::string(key) + "=");
  if (pos == std::string::npos) throw FormatError(fmt::format("header '{}' lacks {}=", header, key));
  const char* begin = header.data() + pos + key.size() + 1;
  std::size_t value = 0;
  const auto [ptr, ec] = std::from_chars(begin, header.data() + header.size(), value);
  if (ec != std::errc{} || ptr == begin) throw FormatError(fmt::format("bad {} in header '{}'", key, header));
  return value;
}

double parse_real(std::string_view token, std::size_t line_no) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), v);
  if (ec != std::errc{} || ptr != token.data() + token.size()) {
    throw FormatError(fmt::format("line {}: '{}' is not a number", line_no, token));
  }
  return v;
}

bool blank(const std::string& line) { return line.find_first_not_of(" \t\r") == std::string::npos; }

}  // namespace

void write_entropy_file(std::ostream& out, const ContinuousSequence& seq, const EntropyConfig& cfg) {
  if (seq.dim() != 1) throw InputDomainError("entropy files hold one value per line");
  fmt::print(out, "# entropy window={} slide={}\n", cfg.window, cfg.slide);
  for (double v : seq.values()) fmt::print(out, "{}\n", v);
}

void write_continuous_file(std::ostream& out, const ContinuousSequence& seq) {
  fmt::print(out, "# continuous dim={}\n", seq.dim());
  for (std::size_t t = 0; t < seq.size(); ++t) fmt::print(out, "{}\n", fmt::join(seq[t], " "));
}

void write_opcode_file(std::ostream& out, const DiscreteSequence& seq, std::size_t alphabet) {
  fmt::print(out, "# opcodes k={}\n", alphabet);
  for (Symbol s : seq.symbols()) fmt::print(out, "{}\n", s);
}

FeatureFile read_feature_file(std::istream& in) {
  std::string header;
  if (!std::getline(in, header)) throw FormatError("feature file is empty");
  FeatureFile file;
  std::size_t dim = 1;
  if (header.rfind("# entropy", 0) == 0) {
    file.kind = FeatureKind::kEntropy;
    file.entropy = EntropyConfig{header_field(header, "window"), header_field(header, "slide")};
  } else if (header.rfind("# continuous", 0) == 0) {
    file.kind = FeatureKind::kContinuous;
    dim = header_field(header, "dim");
    if (dim == 0) throw FormatError("continuous feature file with dim=0");
  } else if (header.rfind("# opcodes", 0) == 0) {
    file.kind = FeatureKind::kOpcodes;
    file.alphabet = header_field(header, "k");
  } else {
    throw FormatError(fmt::format("unrecognised feature header '{}'", header));
  }

  std::string line;
  std::size_t line_no = 1;
  if (file.is_discrete()) {
    std::vector<Symbol> symbols;
    while (std::getline(in, line)) {
      ++line_no;
      if (blank(line)) continue;
      Symbol s = 0;
      const auto [ptr, ec] = std::from_chars(line.data(), line.data() + line.size(), s);
      if (ec != std::errc{} || ptr == line.data()) {
        throw FormatError(fmt::format("line {}: '{}' is not a symbol index", line_no, line));
      }
      if (s >= file.alphabet) {
        throw FormatError(fmt::format("line {}: symbol {} outside alphabet of size {}", line_no, s, file.alphabet));
      }
      symbols.push_back(s);
    }
    if (symbols.empty()) throw FormatError("feature file has no observations");
    file.data = DiscreteSequence(std::move(symbols));
    return file;
  }

  std::vector<double> values;
  while (std::getline(in, line)) {
    ++line_no;
    if (blank(line)) continue;
    std::istringstream tokens(line);
    std::string token;
    std::size_t count = 0;
    while (tokens >> token) {
      values.push_back(parse_real(token, line_no));
      ++count;
    }
    if (count != dim) throw FormatError(fmt::format("line {}: expected {} values, found {}", line_no, dim, count));
  }
  if (values.empty()) throw FormatError("feature file has no observations");
  try {
    file.data = ContinuousSequence(dim, std::move(values));
  } catch (const InputDomainError& e) {
    throw FormatError(e.what());
  }
  return file;
}

FeatureFile read_feature_file(const std::filesystem::path& path) {
  auto in = open_input(path);
  try {
    return read_feature_file(in);
  } catch (const FormatError& e) {
    throw FormatError(fmt::format("{}: {}", path.string(), e.what()));
  }
}

void write_vocab(std::ostream& out, const OpcodeVocab& vocab) {
  for (const auto& m : vocab.ranked_opcodes()) fmt::print(out, "{}\n", m);
}

OpcodeVocab read_vocab(std::istream& in) { return OpcodeVocab(read_mnemonics(in)); }

OpcodeVocab read_vocab(const std::filesystem::path& path) {
  auto in = open_input(path);
  return read_vocab(in);
}

std::vector<std::string> read_mnemonics(std::istream& in) {
  std::vector<std::string> out;
  std::string line;
  while (std::getline(in, line)) {
    auto m = normalize_mnemonic(line);
    if (!m.empty()) out.push_back(std::move(m));
  }
  return out;
}

std::vector<std::string> read_mnemonics(const std::filesystem::path& path) {
  auto in = open_input(path);
  return read_mnemonics(in);
}

std::vector<std::uint8_t> read_bytes(const std::filesystem::path& path) {
  auto in = open_input(path, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

}  // namespace gmmhmm

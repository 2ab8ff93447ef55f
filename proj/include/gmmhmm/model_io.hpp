#ifndef GMMHMM_MODEL_IO_HPP
#define GMMHMM_MODEL_IO_HPP

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "gmmhmm/discrete_hmm.hpp"
#include "gmmhmm/gmm_hmm.hpp"

namespace gmmhmm {

inline constexpr int kModelFormatVersion = 1;

struct TrainingMetadata {
  std::uint64_t seed = 0;
  std::size_t iterations = 0;
  double final_log_likelihood = 0.0;
};

/// A trained model plus how it was obtained. Saved as JSON; doubles are
/// written with 17 significant digits, so loading reproduces every
/// parameter (and therefore every score) exactly.
struct ModelFile {
  std::variant<DiscreteHmm, GmmHmm> model;
  TrainingMetadata training;
  /// Effective configuration, echoed as given.
  std::vector<std::pair<std::string, std::string>> config;

  bool is_discrete() const { return std::holds_alternative<DiscreteHmm>(model); }
  const DiscreteHmm& discrete() const { return std::get<DiscreteHmm>(model); }
  const GmmHmm& gmm() const { return std::get<GmmHmm>(model); }
};

void write_model(std::ostream& out, const ModelFile& file);
void save_model(const std::filesystem::path& path, const ModelFile& file);

/// Throws FormatError for malformed JSON, an unknown version or kind, or
/// arrays of the wrong shape; invalid parameters surface as the model
/// constructors' errors.
ModelFile read_model(std::istream& in);
ModelFile load_model(const std::filesystem::path& path);

}  // namespace gmmhmm

#endif  // GMMHMM_MODEL_IO_HPP

#ifndef GMMHMM_REPORT_HPP
#define GMMHMM_REPORT_HPP

#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "gmmhmm/demo.hpp"
#include "gmmhmm/eval.hpp"

namespace gmmhmm {

using ConfigEcho = std::vector<std::pair<std::string, std::string>>;

/// Human-readable evaluation table (AUCs to 4 decimals) followed by the
/// per-fold breakdown and the configuration echo.
void write_eval_text(std::ostream& out, const EvalReport& report, const std::string& train_name,
                     const std::string& test_name, const std::string& model_label);

/// Machine record: every number at full (round-trip) precision.
void write_eval_json(std::ostream& out, const EvalReport& report, const std::string& train_name,
                     const std::string& test_name, const std::string& model_label);

void write_demo_text(std::ostream& out, const DemoResult& result, const ConfigEcho& config);
void write_demo_json(std::ostream& out, const DemoResult& result, const ConfigEcho& config);

void write_kl_text(std::ostream& out, const KlEstimate& kl, const ConfigEcho& config);
void write_kl_json(std::ostream& out, const KlEstimate& kl, const ConfigEcho& config);

/// Letters ordered by how much more likely they are in `state` than on
/// average over the other states (discrete demo model).
std::string letters_by_affinity(const DiscreteHmm& model, std::size_t state);

}  // namespace gmmhmm

#endif  // GMMHMM_REPORT_HPP

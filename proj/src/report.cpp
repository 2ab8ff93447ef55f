#include "gmmhmm/report.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>

#include <fmt/format.h>
#include <fmt/ostream.h>
#include <json.hpp>

namespace gmmhmm {
namespace {

using nlohmann::ordered_json;

// JSON has no infinities; spell them out rather than emitting null.
ordered_json real(double x) {
  if (std::isfinite(x)) return x;
  if (std::isnan(x)) return "nan";
  return x > 0 ? "inf" : "-inf";
}

ordered_json config_json(const ConfigEcho& config) {
  ordered_json c = ordered_json::object();
  for (const auto& [k, v] : config) c[k] = v;
  return c;
}

void write_config_text(std::ostream& out, const ConfigEcho& config) {
  out << "configuration:\n";
  std::size_t width = 0;
  for (const auto& kv : config) width = std::max(width, kv.first.size());
  for (const auto& [k, v] : config) fmt::print(out, "  {:<{}} = {}\n", k, width, v);
}

char letter(std::size_t symbol) { return symbol == kWordSpace ? '_' : static_cast<char>('a' + symbol); }

}  // namespace

void write_eval_text(std::ostream& out, const EvalReport& report, const std::string& train_name,
                     const std::string& test_name, const std::string& model_label) {
  const std::size_t wt = std::max<std::size_t>(5, train_name.size());
  const std::size_t ws = std::max<std::size_t>(4, test_name.size());
  const std::size_t wm = std::max<std::size_t>(5, model_label.size());
  fmt::print(out, "{:<{}}  {:<{}}  {:<{}}  {}\n", "Train", wt, "Test", ws, "Model", wm, "AUC");
  fmt::print(out, "{:<{}}  {:<{}}  {:<{}}  {:.4f}\n\n", train_name, wt, test_name, ws, model_label, wm,
             report.mean_auc);
  out << "fold  train  positives  negatives  AUC\n";
  for (const auto& f : report.folds) {
    fmt::print(out, "{:>4}  {:>5}  {:>9}  {:>9}  {:.4f}\n", f.fold, f.n_train, f.n_positive, f.n_negative, f.auc);
  }
  fmt::print(out, "mean{:>33.4f}\n\n", report.mean_auc);
  write_config_text(out, report.config);
}

void write_eval_json(std::ostream& out, const EvalReport& report, const std::string& train_name,
                     const std::string& test_name, const std::string& model_label) {
  ordered_json j;
  j["train"] = train_name;
  j["test"] = test_name;
  j["model"] = model_label;
  j["mean_auc"] = report.mean_auc;
  j["per_fold_auc"] = report.per_fold_auc;
  ordered_json folds = ordered_json::array();
  for (const auto& f : report.folds) {
    ordered_json samples = ordered_json::array();
    for (const auto& s : f.samples) {
      samples.push_back(ordered_json{{"id", s.id},
                                     {"score", real(s.score)},
                                     {"label", s.label == Label::kPositive ? "positive" : "negative"}});
    }
    folds.push_back(ordered_json{{"fold", f.fold},
                                 {"auc", f.auc},
                                 {"n_train", f.n_train},
                                 {"n_positive", f.n_positive},
                                 {"n_negative", f.n_negative},
                                 {"samples", std::move(samples)}});
  }
  j["folds"] = std::move(folds);
  j["config"] = config_json(report.config);
  out << j.dump(2) << '\n';
}

std::string letters_by_affinity(const DiscreteHmm& model, std::size_t state) {
  const auto& b = model.emissions();
  const auto s = static_cast<Eigen::Index>(state);
  std::vector<std::size_t> order(static_cast<std::size_t>(b.cols()));
  std::iota(order.begin(), order.end(), std::size_t{0});
  auto affinity = [&](std::size_t v) {
    const auto c = static_cast<Eigen::Index>(v);
    double other = 0.0;
    for (Eigen::Index o = 0; o < b.rows(); ++o) {
      if (o != s) other += b(o, c);
    }
    other /= static_cast<double>(std::max<Eigen::Index>(1, b.rows() - 1));
    return b(s, c) - other;
  };
  std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) { return affinity(x) > affinity(y); });
  std::string out;
  for (std::size_t v : order) {
    if (affinity(v) > 0.0) out += letter(v);
  }
  return out;
}

void write_demo_text(std::ostream& out, const DemoResult& result, const ConfigEcho& config) {
  const auto& g = result.gmm.best.model;
  fmt::print(out, "GMM-HMM: best of {} restarts is #{} (log-likelihood {:.4f}, {} iterations)\n",
             result.gmm.records.size(), result.gmm.best_index, result.gmm.best.final_log_likelihood(),
             result.gmm.best.iterations());
  out << "component means by state (weight, variance):\n";
  for (std::size_t j = 0; j < g.n_states(); ++j) {
    const auto& mix = g.emission(j);
    std::vector<std::size_t> order(mix.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return mix.weights()[a] > mix.weights()[b]; });
    fmt::print(out, "  {}:", j);
    for (std::size_t k : order) fmt::print(out, " {:7.2f}", mix.component(k).mean()[0]);
    out << "\n    ";
    for (std::size_t k : order) {
      fmt::print(out, " ({:.3f}, {:.3g})", mix.weights()[k], mix.component(k).covariance()(0, 0));
    }
    out << '\n';
  }
  if (result.gmm_vowel_state) {
    fmt::print(out, "GMM-HMM vowel separation: SUCCESS (state {} holds a e i o u and space)\n\n",
               *result.gmm_vowel_state);
  } else {
    out << "GMM-HMM vowel separation: FAILURE (no state has a component within 1.0 of each of a e i o u space)\n\n";
  }

  const auto& d = result.discrete.best.model;
  fmt::print(out, "discrete HMM: best of {} restarts is #{} (log-likelihood {:.4f}, {} iterations)\n",
             result.discrete.records.size(), result.discrete.best_index, result.discrete.best.final_log_likelihood(),
             result.discrete.best.iterations());
  out << "letter probabilities by state ('_' is the word-space):\n";
  out << "      ";
  for (Eigen::Index s = 0; s < d.emissions().rows(); ++s) fmt::print(out, "  state {}", s);
  out << '\n';
  for (Eigen::Index v = 0; v < d.emissions().cols(); ++v) {
    fmt::print(out, "    {} ", letter(static_cast<std::size_t>(v)));
    for (Eigen::Index s = 0; s < d.emissions().rows(); ++s) fmt::print(out, "  {:7.4f}", d.emissions()(s, v));
    out << '\n';
  }
  for (std::size_t s = 0; s < d.n_states(); ++s) {
    fmt::print(out, "  state {} favours: {}\n", s, letters_by_affinity(d, s));
  }
  if (result.discrete_vowel_state) {
    fmt::print(out, "discrete HMM vowel separation: SUCCESS (state {})\n\n", *result.discrete_vowel_state);
  } else {
    out << "discrete HMM vowel separation: FAILURE\n\n";
  }
  write_config_text(out, config);
}

void write_demo_json(std::ostream& out, const DemoResult& result, const ConfigEcho& config) {
  ordered_json j;
  auto restarts = [](const std::vector<RestartRecord>& records) {
    ordered_json a = ordered_json::array();
    for (const auto& r : records) {
      ordered_json e{{"index", r.index}, {"seed", r.seed}, {"ok", r.ok}};
      if (r.ok) {
        e["final_log_likelihood"] = r.final_log_likelihood;
        e["iterations"] = r.iterations;
      } else {
        e["error"] = r.error;
      }
      a.push_back(std::move(e));
    }
    return a;
  };
  const auto& g = result.gmm.best.model;
  ordered_json states = ordered_json::array();
  for (std::size_t s = 0; s < g.n_states(); ++s) {
    ordered_json comps = ordered_json::array();
    const auto& mix = g.emission(s);
    for (std::size_t k = 0; k < mix.size(); ++k) {
      comps.push_back(ordered_json{{"weight", mix.weights()[k]},
                                   {"mean", mix.component(k).mean()[0]},
                                   {"variance", mix.component(k).covariance()(0, 0)}});
    }
    states.push_back(std::move(comps));
  }
  j["gmm"] = ordered_json{{"best_restart", result.gmm.best_index},
                          {"final_log_likelihood", result.gmm.best.final_log_likelihood()},
                          {"states", std::move(states)},
                          {"vowel_state", result.gmm_vowel_state ? ordered_json(*result.gmm_vowel_state) : nullptr},
                          {"restarts", restarts(result.gmm.records)}};
  const auto& b = result.discrete.best.model.emissions();
  ordered_json rows = ordered_json::array();
  for (Eigen::Index s = 0; s < b.rows(); ++s) {
    ordered_json r = ordered_json::array();
    for (Eigen::Index v = 0; v < b.cols(); ++v) r.push_back(b(s, v));
    rows.push_back(std::move(r));
  }
  j["discrete"] = ordered_json{
      {"best_restart", result.discrete.best_index},
      {"final_log_likelihood", result.discrete.best.final_log_likelihood()},
      {"B", std::move(rows)},
      {"vowel_state", result.discrete_vowel_state ? ordered_json(*result.discrete_vowel_state) : nullptr},
      {"restarts", restarts(result.discrete.records)}};
  j["config"] = config_json(config);
  out << j.dump(2) << '\n';
}

void write_kl_text(std::ostream& out, const KlEstimate& kl, const ConfigEcho& config) {
  if (kl.is_infinite()) {
    fmt::print(out, "symmetric KL divergence: inf ({} of {} samples fell where the other model has zero density)\n\n",
               kl.n_infinite, 2 * kl.n_samples);
  } else {
    fmt::print(out, "symmetric KL divergence: {:.4f} +/- {:.4f} nats (natural log, {} samples per direction)\n\n",
               kl.value, kl.std_error, kl.n_samples);
  }
  write_config_text(out, config);
}

void write_kl_json(std::ostream& out, const KlEstimate& kl, const ConfigEcho& config) {
  ordered_json j{{"kl_nats", real(kl.value)},
                 {"std_error", real(kl.std_error)},
                 {"n_samples", kl.n_samples},
                 {"n_infinite", kl.n_infinite},
                 {"config", config_json(config)}};
  out << j.dump(2) << '\n';
}

}  // namespace gmmhmm

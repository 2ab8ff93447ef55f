#ifndef GMMHMM_RESTARTS_HPP
#define GMMHMM_RESTARTS_HPP

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <exception>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "gmmhmm/error.hpp"
#include "gmmhmm/markov.hpp"
#include "gmmhmm/parallel.hpp"

namespace gmmhmm {

/// Outcome of one seeded training among several restarts.
struct RestartRecord {
  std::size_t index = 0;
  std::uint64_t seed = 0;
  bool ok = false;
  double final_log_likelihood = -std::numeric_limits<double>::infinity();
  std::size_t iterations = 0;
  std::string error;  // set when !ok
};

template <class Result>
struct RestartOutcome {
  Result best;
  std::size_t best_index = 0;
  std::vector<RestartRecord> records;
};

/// Runs train(seed) for `restarts` seeds derived from `seed` and keeps the
/// run with the highest final log-likelihood (lowest index on ties). Failed
/// restarts are recorded and skipped; if all fail, a ModelDegeneracyError
/// lists them.
template <class Result, class TrainFn>
RestartOutcome<Result> best_of_restarts(std::size_t restarts, std::uint64_t seed, std::size_t jobs, TrainFn&& train) {
  if (restarts < 1) throw InputDomainError("restarts must be >= 1");
  std::vector<std::optional<Result>> results(restarts);
  std::vector<RestartRecord> records(restarts);
  parallel_for(restarts, jobs, [&](std::size_t r) {
    auto& rec = records[r];
    rec.index = r;
    rec.seed = derive_seed(seed, r);
    try {
      results[r].emplace(train(rec.seed));
      rec.ok = true;
      rec.final_log_likelihood = results[r]->final_log_likelihood();
      rec.iterations = results[r]->iterations();
    } catch (const Error& e) {
      rec.error = e.what();
    }
  });

  std::optional<std::size_t> best;
  for (std::size_t r = 0; r < restarts; ++r) {
    if (!records[r].ok || std::isnan(records[r].final_log_likelihood)) continue;
    if (!best || records[r].final_log_likelihood > records[*best].final_log_likelihood) best = r;
  }
  if (!best) {
    std::string msg = "every training restart failed:";
    for (const auto& rec : records) msg += fmt::format(" [restart {}: {}]", rec.index, rec.error);
    throw ModelDegeneracyError(msg);
  }
  return RestartOutcome<Result>{std::move(*results[*best]), *best, std::move(records)};
}

}  // namespace gmmhmm

#endif  // GMMHMM_RESTARTS_HPP

#include "gmmhmm/cli.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <optional>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <fmt/ostream.h>

#include "gmmhmm/demo.hpp"
#include "gmmhmm/error.hpp"
#include "gmmhmm/eval.hpp"
#include "gmmhmm/feature_io.hpp"
#include "gmmhmm/features.hpp"
#include "gmmhmm/model_io.hpp"
#include "gmmhmm/report.hpp"
#include "gmmhmm/restarts.hpp"

namespace gmmhmm {
namespace {

namespace fs = std::filesystem;

/// Thrown for bad invocations that CLI11 cannot detect on its own.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Shared {
  std::uint64_t seed = 0;
  std::size_t jobs = 1;
  std::string out_dir = ".";
};

struct ModelFlags {
  std::size_t states = 2;
  std::size_t components = 2;
  double eps = kDefaultEps;
  TrainConfig train;
  std::size_t restarts = 1;
  std::size_t t_cap = 0;  // 0: 100000 for opcodes, unlimited otherwise
};

void add_shared(CLI::App* cmd, Shared& s) {
  cmd->add_option("--seed", s.seed, "random seed")->capture_default_str();
  cmd->add_option("--jobs", s.jobs, "worker threads")->capture_default_str()->check(CLI::PositiveNumber);
  cmd->add_option("--out-dir", s.out_dir, "output directory")->capture_default_str();
}

void add_model_flags(CLI::App* cmd, ModelFlags& m) {
  cmd->add_option("--states", m.states, "hidden states N")->capture_default_str()->check(CLI::PositiveNumber);
  cmd->add_option("--components", m.components, "mixture components M (GMM-HMM)")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  cmd->add_option("--eps", m.eps, "integration half-width (GMM-HMM)")->capture_default_str();
  cmd->add_option("--max-iters", m.train.max_iters, "EM iteration limit")->capture_default_str();
  cmd->add_option("--tol", m.train.tol, "stop when the log-likelihood gain is below this")->capture_default_str();
  cmd->add_option("--init-noise", m.train.init_noise, "relative perturbation of initial rows, at most 0.1")
      ->capture_default_str();
  cmd->add_option("--mean-jitter", m.train.mean_jitter, "initial mean jitter in standard deviations (GMM-HMM)")
      ->capture_default_str();
  cmd->add_option("--variance-floor", m.train.variance_floor, "lower bound on variances (GMM-HMM)")
      ->capture_default_str();
  cmd->add_option("--restarts", m.restarts, "seeded trainings; the likeliest is kept")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  cmd->add_option("--t-cap", m.t_cap, "training stream length cap (0: 100000 for opcodes, else none)")
      ->capture_default_str();
}

std::string num(double x) { return fmt::format("{}", x); }

ConfigEcho model_echo(const ModelFlags& m, bool discrete, std::size_t t_cap) {
  ConfigEcho c{{"model", discrete ? "discrete" : "gmm"}, {"states", std::to_string(m.states)}};
  if (!discrete) {
    c.emplace_back("components", std::to_string(m.components));
    c.emplace_back("eps", num(m.eps));
  }
  c.emplace_back("max_iters", std::to_string(m.train.max_iters));
  c.emplace_back("tol", num(m.train.tol));
  c.emplace_back("init_noise", num(m.train.init_noise));
  if (!discrete) {
    c.emplace_back("mean_jitter", num(m.train.mean_jitter));
    c.emplace_back("variance_floor", num(m.train.variance_floor));
  }
  c.emplace_back("restarts", std::to_string(m.restarts));
  c.emplace_back("t_cap", t_cap == 0 ? "none" : std::to_string(t_cap));
  return c;
}

std::size_t effective_t_cap(const ModelFlags& m, bool discrete) {
  if (m.t_cap != 0) return m.t_cap;
  return discrete ? 100000 : 0;
}

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error(fmt::format("cannot create directory {}: {}", dir.string(), ec.message()));
}

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  out << content;
  if (!out) throw Error(fmt::format("cannot write {}", path.string()));
}

/// Directories expand to their regular files in lexicographic order, minus
/// the manifest and vocabulary that `extract` leaves beside its outputs.
std::vector<std::string> expand_inputs(const std::vector<std::string>& inputs) {
  std::vector<std::string> out;
  for (const auto& in : inputs) {
    if (fs::is_directory(in)) {
      std::vector<std::string> found;
      for (const auto& e : fs::directory_iterator(in)) {
        const auto name = e.path().filename();
        if (e.is_regular_file() && name != "manifest.tsv" && name != "vocab.txt") found.push_back(e.path().string());
      }
      std::sort(found.begin(), found.end());
      out.insert(out.end(), found.begin(), found.end());
    } else {
      out.push_back(in);
    }
  }
  return out;
}

std::string describe(const FeatureFile& f) {
  switch (f.kind) {
    case FeatureKind::kEntropy:
      return fmt::format("entropy window={} slide={}", f.entropy.window, f.entropy.slide);
    case FeatureKind::kContinuous:
      return fmt::format("continuous dim={}", f.continuous().dim());
    case FeatureKind::kOpcodes:
      return fmt::format("opcodes k={}", f.alphabet);
  }
  return "?";
}

/// Loads feature files that must agree in kind and shape.
struct FeatureSet {
  std::vector<std::string> paths;
  std::vector<FeatureFile> files;

  bool discrete() const { return files.front().is_discrete(); }
  std::string signature() const { return describe(files.front()); }

  std::vector<ContinuousSequence> continuous() const {
    std::vector<ContinuousSequence> v;
    for (const auto& f : files) v.push_back(f.continuous());
    return v;
  }
  std::vector<DiscreteSequence> discrete_seqs() const {
    std::vector<DiscreteSequence> v;
    for (const auto& f : files) v.push_back(f.discrete());
    return v;
  }
};

FeatureSet load_features(const std::vector<std::string>& inputs, std::string_view what) {
  FeatureSet set;
  set.paths = expand_inputs(inputs);
  if (set.paths.empty()) throw UsageError(fmt::format("no {} given", what));
  for (const auto& p : set.paths) {
    try {
      set.files.push_back(read_feature_file(fs::path(p)));
    } catch (const Error& e) {
      throw Error(fmt::format("{}: {}", p, e.what()));
    }
    if (describe(set.files.back()) != describe(set.files.front())) {
      throw InputDomainError(fmt::format("{} holds '{}' features but {} holds '{}'; feature kinds must not be mixed", p,
                                         describe(set.files.back()), set.paths.front(), describe(set.files.front())));
    }
  }
  return set;
}

// ---------------------------------------------------------------------------
// extract

struct ExtractOpts {
  Shared shared;
  std::vector<std::string> inputs;
  std::string mode = "entropy";
  std::size_t window = 512;
  std::size_t slide = 256;
  std::string vocab;
  std::size_t top_k = 30;
  std::size_t t_cap = 100000;
};

int cmd_extract(const ExtractOpts& o, std::ostream& out, std::ostream& err) {
  const auto inputs = expand_inputs(o.inputs);
  if (inputs.empty()) throw UsageError("extract: no input files given");
  const fs::path dir(o.shared.out_dir);
  ensure_dir(dir);

  const std::string suffix = o.mode == "entropy" ? ".entropy.txt" : ".opcodes.txt";
  std::vector<fs::path> outputs;
  for (const auto& in : inputs) {
    outputs.push_back(dir / (fs::path(in).filename().string() + suffix));
    if (std::count(outputs.begin(), outputs.end(), outputs.back()) > 1) {
      throw UsageError(fmt::format("extract: two inputs map to the same output {}", outputs.back().string()));
    }
  }

  std::vector<std::string> status(inputs.size());
  std::string params;
  if (o.mode == "entropy") {
    const EntropyConfig cfg{o.window, o.slide};
    cfg.validate();
    params = fmt::format("window={} slide={}", cfg.window, cfg.slide);
    parallel_for(inputs.size(), o.shared.jobs, [&](std::size_t i) {
      try {
        const auto series = entropy_series(read_bytes(inputs[i]), cfg);
        std::ostringstream s;
        write_entropy_file(s, series, cfg);
        write_file(outputs[i], s.str());
        status[i] = fmt::format("ok T={}", sequence_length(series));
      } catch (const TooShortInputError& e) {
        status[i] = fmt::format("too-short: {}", e.what());
      } catch (const Error& e) {
        status[i] = fmt::format("error: {}", e.what());
      }
    });
  } else {
    std::vector<std::optional<std::vector<std::string>>> streams(inputs.size());
    parallel_for(inputs.size(), o.shared.jobs, [&](std::size_t i) {
      try {
        streams[i] = read_mnemonics(fs::path(inputs[i]));
        if (streams[i]->empty()) {
          streams[i].reset();
          status[i] = "too-short: no mnemonics";
        }
      } catch (const Error& e) {
        status[i] = fmt::format("error: {}", e.what());
      }
    });
    std::optional<OpcodeVocab> vocab;
    std::string vocab_note;
    if (!o.vocab.empty()) {
      vocab = read_vocab(fs::path(o.vocab));
      vocab_note = fmt::format("vocab={}", o.vocab);
    } else {
      std::vector<std::vector<std::string>> ok;
      for (const auto& s : streams) {
        if (s) ok.push_back(*s);
      }
      if (!ok.empty()) {
        auto built = build_opcode_vocab(ok, o.top_k);
        const fs::path vpath = dir / "vocab.txt";
        std::ostringstream s;
        write_vocab(s, built.vocab);
        write_file(vpath, s.str());
        fmt::print(out, "vocabulary: top {} mnemonics cover {:.4f} of training mnemonics -> {}\n",
                   built.vocab.ranked_opcodes().size(), built.coverage, vpath.string());
        vocab_note = fmt::format("vocab={}", vpath.string());
        vocab = std::move(built.vocab);
      }
    }
    if (vocab) {
      params = fmt::format("{} k={} t_cap={}", vocab_note, vocab->alphabet_size(), o.t_cap);
      parallel_for(inputs.size(), o.shared.jobs, [&](std::size_t i) {
        if (!streams[i]) return;
        try {
          const auto seq = encode_opcodes(*streams[i], *vocab, o.t_cap);
          std::ostringstream s;
          write_opcode_file(s, seq, vocab->alphabet_size());
          write_file(outputs[i], s.str());
          status[i] = fmt::format("ok T={}", sequence_length(seq));
        } catch (const Error& e) {
          status[i] = fmt::format("error: {}", e.what());
        }
      });
    }
  }

  std::ostringstream manifest;
  manifest << "input\toutput\tstatus\tparameters\n";
  std::size_t ok = 0;
  for (std::size_t i = 0; i < inputs.size(); ++i) {
    const bool good = status[i].rfind("ok", 0) == 0;
    ok += good ? 1 : 0;
    if (!good) fmt::print(err, "warning: {}: {}\n", inputs[i], status[i]);
    fmt::print(manifest, "{}\t{}\t{}\t{}\n", inputs[i], good ? outputs[i].string() : "-", status[i], params);
  }
  write_file(dir / "manifest.tsv", manifest.str());
  fmt::print(out, "extracted {} of {} inputs ({}) -> {}\n", ok, inputs.size(), o.mode, (dir / "manifest.tsv").string());
  return ok == 0 ? kExitFailure : kExitOk;
}

// ---------------------------------------------------------------------------
// train

struct TrainOpts {
  Shared shared;
  ModelFlags model;
  std::vector<std::string> inputs;
  std::string out;
};

void print_restarts(std::ostream& out, const std::vector<RestartRecord>& records, std::size_t best) {
  for (const auto& r : records) {
    if (r.ok) {
      fmt::print(out, "restart {:>3}  seed {:>20}  iterations {:>5}  log-likelihood {}{}\n", r.index, r.seed,
                 r.iterations, r.final_log_likelihood, r.index == best ? "  *" : "");
    } else {
      fmt::print(out, "restart {:>3}  seed {:>20}  failed: {}\n", r.index, r.seed, r.error);
    }
  }
}

int cmd_train(const TrainOpts& o, std::ostream& out) {
  o.model.train.validate();
  const auto set = load_features(o.inputs, "feature files");
  const bool discrete = set.discrete();
  const std::size_t t_cap = effective_t_cap(o.model, discrete);
  ConfigEcho echo = model_echo(o.model, discrete, t_cap);
  echo.emplace_back("seed", std::to_string(o.shared.seed));
  echo.emplace_back("features", set.signature());
  echo.emplace_back("inputs", std::to_string(set.paths.size()));

  auto trained = [&]() -> ModelFile {
    if (discrete) {
      const auto seqs = set.discrete_seqs();
      const auto stream = concatenate(std::span<const DiscreteSequence>(seqs), t_cap);
      const std::size_t k = set.files.front().alphabet;
      auto res = best_of_restarts<DiscreteTrainResult>(
          o.model.restarts, o.shared.seed, o.shared.jobs,
          [&](std::uint64_t s) { return dhmm_train(stream, o.model.states, k, o.model.train, s); });
      print_restarts(out, res.records, res.best_index);
      const TrainingMetadata meta{res.records[res.best_index].seed, res.best.iterations(),
                                  res.best.final_log_likelihood()};
      return ModelFile{std::move(res.best.model), meta, {}};
    }
    const auto seqs = set.continuous();
    const auto stream = concatenate(std::span<const ContinuousSequence>(seqs), t_cap);
    auto res = best_of_restarts<GmmTrainResult>(
        o.model.restarts, o.shared.seed, o.shared.jobs, [&](std::uint64_t s) {
          return ghmm_train(stream, o.model.states, o.model.components, o.model.eps, o.model.train, s);
        });
    print_restarts(out, res.records, res.best_index);
    const TrainingMetadata meta{res.records[res.best_index].seed, res.best.iterations(),
                                res.best.final_log_likelihood()};
    return ModelFile{std::move(res.best.model), meta, {}};
  };
  ModelFile file = trained();
  file.config = std::move(echo);
  fs::path path = o.out.empty() ? fs::path(o.shared.out_dir) / "model.json" : fs::path(o.out);
  if (path.has_parent_path()) ensure_dir(path.parent_path());
  save_model(path, file);
  fmt::print(out, "model -> {}\n", path.string());
  return kExitOk;
}

// ---------------------------------------------------------------------------
// score

struct ScoreOpts {
  std::string model;
  std::vector<std::string> inputs;
  std::string out;
};

double score_with(const ModelFile& m, const FeatureFile& f, const std::string& id) {
  if (m.is_discrete() != f.is_discrete()) {
    throw InputDomainError(fmt::format("{}: {} model cannot score '{}' features", id,
                                       m.is_discrete() ? "discrete" : "GMM-HMM", describe(f)));
  }
  if (m.is_discrete()) {
    if (f.alphabet > m.discrete().n_symbols()) {
      throw InputDomainError(fmt::format("{}: features use {} symbols but the model has K={}", id, f.alphabet,
                                         m.discrete().n_symbols()));
    }
    return dhmm_log_score(m.discrete(), f.discrete());
  }
  if (f.continuous().dim() != m.gmm().dim()) {
    throw InputDomainError(
        fmt::format("{}: features have dimension {} but the model has D={}", id, f.continuous().dim(), m.gmm().dim()));
  }
  return ghmm_log_score(m.gmm(), f.continuous());
}

int cmd_score(const ScoreOpts& o, std::ostream& out) {
  const auto model = load_model(o.model);
  const auto paths = expand_inputs(o.inputs);
  if (paths.empty()) throw UsageError("score: no feature files given");
  std::ostringstream table;
  table << "id\tT\tlog_prob\tlog_prob_per_symbol\n";
  for (const auto& p : paths) {
    const auto f = read_feature_file(fs::path(p));
    const std::size_t t = f.is_discrete() ? sequence_length(f.discrete()) : sequence_length(f.continuous());
    const double lp = score_with(model, f, p);
    fmt::print(table, "{}\t{}\t{}\t{}\n", p, t, lp, lp / static_cast<double>(t));
  }
  out << table.str();
  if (!o.out.empty()) write_file(o.out, table.str());
  return kExitOk;
}

// ---------------------------------------------------------------------------
// evaluate

struct EvaluateOpts {
  Shared shared;
  ModelFlags model;
  std::vector<std::string> family_a;
  std::vector<std::string> family_b;
  std::string name_a = "A";
  std::string name_b = "B";
  std::size_t folds = 5;
  std::size_t test_per_family = 100;
};

int cmd_evaluate(const EvaluateOpts& o, std::ostream& out) {
  o.model.train.validate();
  const auto a = load_features(o.family_a, "family A feature files");
  const auto b = load_features(o.family_b, "family B feature files");
  if (a.signature() != b.signature()) {
    throw InputDomainError(
        fmt::format("family A holds '{}' features but family B holds '{}'", a.signature(), b.signature()));
  }
  const bool discrete = a.discrete();
  const std::size_t t_cap = effective_t_cap(o.model, discrete);
  const CrossValidationConfig cv{o.folds, o.test_per_family, o.shared.seed, o.shared.jobs};

  ConfigEcho echo{{"train", o.name_a}, {"test", o.name_b}, {"features", a.signature()}};
  for (auto& kv : model_echo(o.model, discrete, t_cap)) echo.push_back(std::move(kv));
  echo.emplace_back("folds", std::to_string(o.folds));
  echo.emplace_back("test_per_family", std::to_string(o.test_per_family));
  echo.emplace_back("seed", std::to_string(o.shared.seed));
  echo.emplace_back("family_a_files", std::to_string(a.paths.size()));
  echo.emplace_back("family_b_files", std::to_string(b.paths.size()));
  echo.emplace_back("score", "log-probability per symbol");

  EvalReport report;
  std::string label;
  if (discrete) {
    DiscreteRecipe r{o.model.states, a.files.front().alphabet, o.model.train, o.model.restarts, t_cap};
    const auto sa = a.discrete_seqs();
    const auto sb = b.discrete_seqs();
    report = cross_validate<DiscreteSequence>(sa, sb, make_trainer(r), cv);
    label = "Opcode HMM";
  } else {
    GmmRecipe r{o.model.states, o.model.components, o.model.eps, o.model.train, o.model.restarts, t_cap};
    const auto sa = a.continuous();
    const auto sb = b.continuous();
    report = cross_validate<ContinuousSequence>(sa, sb, make_trainer(r), cv);
    label = a.files.front().kind == FeatureKind::kEntropy ? "Entropy GMM-HMM" : "GMM-HMM";
  }
  report.config = std::move(echo);

  std::ostringstream text;
  write_eval_text(text, report, o.name_a, o.name_b, label);
  std::ostringstream json;
  write_eval_json(json, report, o.name_a, o.name_b, label);
  const fs::path dir(o.shared.out_dir);
  ensure_dir(dir);
  write_file(dir / "report.txt", text.str());
  write_file(dir / "report.json", json.str());
  out << text.str();
  return kExitOk;
}

// ---------------------------------------------------------------------------
// kl

struct KlOpts {
  Shared shared;
  std::string model1;
  std::string model2;
  std::size_t samples = 100000;
  bool write_files = false;  // only when --out-dir is given
};

int cmd_kl(const KlOpts& o, std::ostream& out) {
  const auto m1 = load_model(o.model1);
  const auto m2 = load_model(o.model2);
  for (const auto* m : {&m1, &m2}) {
    if (m->is_discrete()) {
      throw InputDomainError(fmt::format("{} is a discrete HMM; KL divergence needs GMM-HMM models",
                                         m == &m1 ? o.model1 : o.model2));
    }
  }
  const auto kl = kl_models(m1.gmm(), m2.gmm(), o.samples, o.shared.seed);
  const ConfigEcho echo{{"model1", o.model1},
                        {"model2", o.model2},
                        {"samples", std::to_string(o.samples)},
                        {"seed", std::to_string(o.shared.seed)},
                        {"density", "stationary-weighted pooled emission mixture"},
                        {"units", "nats"}};
  std::ostringstream text;
  write_kl_text(text, kl, echo);
  out << text.str();
  if (o.write_files) {
    ensure_dir(o.shared.out_dir);
    std::ostringstream json;
    write_kl_json(json, kl, echo);
    write_file(fs::path(o.shared.out_dir) / "kl.txt", text.str());
    write_file(fs::path(o.shared.out_dir) / "kl.json", json.str());
  }
  return kExitOk;
}

// ---------------------------------------------------------------------------
// demo

struct DemoOpts {
  Shared shared;
  std::string corpus;
  DemoConfig cfg;
};

int cmd_demo(DemoOpts o, std::ostream& out) {
  o.cfg.gmm.validate();
  o.cfg.discrete.validate();
  o.cfg.seed = o.shared.seed;
  o.cfg.jobs = o.shared.jobs;
  std::ifstream in(o.corpus, std::ios::binary);
  if (!in) throw Error(fmt::format("cannot read corpus {}", o.corpus));
  const std::string corpus((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  const auto result = run_english_demo(corpus, o.cfg);

  const ConfigEcho echo{{"corpus", o.corpus},
                        {"length", std::to_string(o.cfg.length)},
                        {"states", std::to_string(o.cfg.n_states)},
                        {"components", std::to_string(o.cfg.n_components)},
                        {"eps", num(o.cfg.eps)},
                        {"restarts", std::to_string(o.cfg.restarts)},
                        {"seed", std::to_string(o.cfg.seed)},
                        {"gmm_max_iters", std::to_string(o.cfg.gmm.max_iters)},
                        {"gmm_tol", num(o.cfg.gmm.tol)},
                        {"gmm_init_noise", num(o.cfg.gmm.init_noise)},
                        {"gmm_mean_jitter", num(o.cfg.gmm.mean_jitter)},
                        {"variance_floor", num(o.cfg.gmm.variance_floor)},
                        {"discrete_max_iters", std::to_string(o.cfg.discrete.max_iters)},
                        {"discrete_tol", num(o.cfg.discrete.tol)},
                        {"discrete_init_noise", num(o.cfg.discrete.init_noise)}};
  std::ostringstream text;
  write_demo_text(text, result, echo);
  std::ostringstream json;
  write_demo_json(json, result, echo);
  const fs::path dir(o.shared.out_dir);
  ensure_dir(dir);
  write_file(dir / "demo.txt", text.str());
  write_file(dir / "demo.json", json.str());
  out << text.str();
  return kExitOk;
}

// ---------------------------------------------------------------------------
// synth

struct SynthOpts {
  Shared shared;
  std::string model;
  std::size_t length = 1000;
  std::size_t count = 1;
  std::string prefix = "synth";
};

int cmd_synth(const SynthOpts& o, std::ostream& out) {
  const auto model = load_model(o.model);
  const fs::path dir(o.shared.out_dir);
  ensure_dir(dir);
  const int digits = static_cast<int>(std::to_string(std::max<std::size_t>(1, o.count - 1)).size());
  std::vector<std::string> names(o.count);
  parallel_for(o.count, o.shared.jobs, [&](std::size_t i) {
    const auto seed = derive_seed(o.shared.seed, i);
    std::ostringstream s;
    if (model.is_discrete()) {
      write_opcode_file(s, synth_generate(model.discrete(), o.length, seed), model.discrete().n_symbols());
    } else {
      write_continuous_file(s, synth_generate(model.gmm(), o.length, seed));
    }
    names[i] = (dir / fmt::format("{}_{:0{}}.txt", o.prefix, i, digits)).string();
    write_file(names[i], s.str());
  });
  fmt::print(out, "wrote {} sequences of length {} to {}\n", o.count, o.length, dir.string());
  return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Hidden Markov models with Gaussian-mixture emissions: feature extraction, training, scoring, "
               "cross-validated evaluation and KL comparison.",
               "gmmhmm"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "gmmhmm 1.0");

  ExtractOpts ex;
  auto* extract = app.add_subcommand("extract", "turn raw inputs into feature files");
  add_shared(extract, ex.shared);
  extract->add_option("inputs", ex.inputs, "input files or directories");
  extract->add_option("--mode", ex.mode, "feature type")
      ->capture_default_str()
      ->check(CLI::IsMember({"entropy", "opcodes"}));
  extract->add_option("--window", ex.window, "entropy window in bytes")->capture_default_str();
  extract->add_option("--slide", ex.slide, "entropy slide in bytes")->capture_default_str();
  extract->add_option("--vocab", ex.vocab, "existing vocabulary file (default: build one from the inputs)");
  extract->add_option("--top-k", ex.top_k, "vocabulary size before 'other'")->capture_default_str();
  extract->add_option("--t-cap", ex.t_cap, "opcode sequence length cap")->capture_default_str();

  TrainOpts tr;
  auto* train = app.add_subcommand("train", "train a model on feature files");
  add_shared(train, tr.shared);
  add_model_flags(train, tr.model);
  train->add_option("inputs", tr.inputs, "feature files or directories");
  train->add_option("--out", tr.out, "model path (default <out-dir>/model.json)");

  ScoreOpts sc;
  auto* score = app.add_subcommand("score", "log-probability of feature files under a model");
  score->add_option("--model", sc.model, "model file")->required();
  score->add_option("inputs", sc.inputs, "feature files or directories");
  score->add_option("--out", sc.out, "also write the table here");

  EvaluateOpts ev;
  auto* evaluate = app.add_subcommand("evaluate", "cross-validated AUC of family A against family B");
  add_shared(evaluate, ev.shared);
  add_model_flags(evaluate, ev.model);
  evaluate->add_option("--family-a", ev.family_a, "training family feature files or directories")->required();
  evaluate->add_option("--family-b", ev.family_b, "other family feature files or directories")->required();
  evaluate->add_option("--name-a", ev.name_a, "label of family A")->capture_default_str();
  evaluate->add_option("--name-b", ev.name_b, "label of family B")->capture_default_str();
  evaluate->add_option("--folds", ev.folds, "cross-validation folds")->capture_default_str();
  evaluate->add_option("--test-per-family", ev.test_per_family, "test sequences per family and fold")
      ->capture_default_str();

  KlOpts kl;
  auto* klc = app.add_subcommand("kl", "symmetric KL divergence between two GMM-HMM models");
  add_shared(klc, kl.shared);
  klc->add_option("model1", kl.model1, "first model file")->required();
  klc->add_option("model2", kl.model2, "second model file")->required();
  klc->add_option("--samples", kl.samples, "Monte Carlo samples per direction")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);

  DemoOpts de;
  auto* demo = app.add_subcommand("demo", "English-text experiment: do the states separate vowels?");
  add_shared(demo, de.shared);
  demo->add_option("corpus", de.corpus, "plain-text English corpus")->required();
  demo->add_option("--restarts", de.cfg.restarts, "seeded trainings per model family")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  demo->add_option("--length", de.cfg.length, "symbols used (T)")->capture_default_str();
  demo->add_option("--eps", de.cfg.eps, "integration half-width")->capture_default_str();
  demo->add_option("--max-iters", de.cfg.gmm.max_iters, "GMM-HMM EM iteration limit")->capture_default_str();
  demo->add_option("--tol", de.cfg.gmm.tol, "GMM-HMM convergence tolerance")->capture_default_str();
  demo->add_option("--mean-jitter", de.cfg.gmm.mean_jitter, "initial mean jitter in standard deviations")
      ->capture_default_str();

  SynthOpts sy;
  auto* synth = app.add_subcommand("synth", "sample feature files from a model");
  add_shared(synth, sy.shared);
  synth->add_option("--model", sy.model, "model file")->required();
  synth->add_option("--length", sy.length, "observations per sequence")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  synth->add_option("--count", sy.count, "number of sequences")->capture_default_str()->check(CLI::PositiveNumber);
  synth->add_option("--prefix", sy.prefix, "output file name prefix")->capture_default_str();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::CallForVersion&) {
    out << app.version() << '\n';
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    fmt::print(err, "error: {}\n", e.what());
    fmt::print(err, "run 'gmmhmm --help' for usage\n");
    return kExitUsage;
  }

  try {
    if (*extract) return cmd_extract(ex, out, err);
    if (*train) return cmd_train(tr, out);
    if (*score) return cmd_score(sc, out);
    if (*evaluate) return cmd_evaluate(ev, out);
    if (*klc) {
      kl.write_files = klc->get_option("--out-dir")->count() > 0;
      return cmd_kl(kl, out);
    }
    if (*demo) return cmd_demo(de, out);
    if (*synth) return cmd_synth(sy, out);
  } catch (const UsageError& e) {
    fmt::print(err, "error: {}\n", e.what());
    return kExitUsage;
  } catch (const std::exception& e) {
    fmt::print(err, "error: {}\n", e.what());
    return kExitFailure;
  }
  return kExitUsage;
}

}  // namespace gmmhmm

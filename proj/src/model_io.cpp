#include "gmmhmm/model_io.hpp"

#include <fstream>
#include <istream>
#include <ostream>

#include <fmt/format.h>
#include <json.hpp>

#include "gmmhmm/error.hpp"

namespace gmmhmm {
namespace {

using nlohmann::json;
using Eigen::Index;

json to_json(const Eigen::VectorXd& v) {
  json a = json::array();
  for (double x : v) a.push_back(x);
  return a;
}

json to_json(const Eigen::MatrixXd& m) {
  json rows = json::array();
  for (Index i = 0; i < m.rows(); ++i) {
    json r = json::array();
    for (Index j = 0; j < m.cols(); ++j) r.push_back(m(i, j));
    rows.push_back(std::move(r));
  }
  return rows;
}

const json& field(const json& obj, const char* key) {
  const auto it = obj.find(key);
  if (it == obj.end()) throw FormatError(fmt::format("model file: missing field '{}'", key));
  return *it;
}

std::size_t size_field(const json& obj, const char* key) {
  const auto& v = field(obj, key);
  if (!v.is_number_unsigned()) throw FormatError(fmt::format("model file: '{}' must be a non-negative integer", key));
  return v.get<std::size_t>();
}

double number(const json& v, std::string_view where) {
  if (!v.is_number()) throw FormatError(fmt::format("model file: {} must be a number", where));
  return v.get<double>();
}

Eigen::VectorXd vector_of(const json& v, std::size_t n, std::string_view where) {
  if (!v.is_array() || v.size() != n) {
    throw FormatError(fmt::format("model file: {} must be an array of {} numbers", where, n));
  }
  Eigen::VectorXd out(static_cast<Index>(n));
  for (std::size_t i = 0; i < n; ++i) out[static_cast<Index>(i)] = number(v[i], where);
  return out;
}

Eigen::MatrixXd matrix_of(const json& v, std::size_t rows, std::size_t cols, std::string_view where) {
  if (!v.is_array() || v.size() != rows) {
    throw FormatError(fmt::format("model file: {} must have {} rows", where, rows));
  }
  Eigen::MatrixXd out(static_cast<Index>(rows), static_cast<Index>(cols));
  for (std::size_t i = 0; i < rows; ++i) out.row(static_cast<Index>(i)) = vector_of(v[i], cols, where).transpose();
  return out;
}

json discrete_json(const DiscreteHmm& m) {
  return json{{"kind", "discrete"},
              {"N", m.n_states()},
              {"K", m.n_symbols()},
              {"pi", to_json(m.pi())},
              {"A", to_json(m.transitions())},
              {"B", to_json(m.emissions())}};
}

json gmm_json(const GmmHmm& m) {
  json c = json::array();
  json mu = json::array();
  json sigma = json::array();
  for (const auto& mix : m.emissions()) {
    json cs = json::array();
    json ms = json::array();
    json ss = json::array();
    for (std::size_t k = 0; k < mix.size(); ++k) {
      cs.push_back(mix.weights()[k]);
      ms.push_back(to_json(mix.component(k).mean()));
      ss.push_back(to_json(mix.component(k).covariance()));
    }
    c.push_back(std::move(cs));
    mu.push_back(std::move(ms));
    sigma.push_back(std::move(ss));
  }
  return json{{"kind", "gmm"},
              {"N", m.n_states()},
              {"M", m.n_components()},
              {"D", m.dim()},
              {"eps", m.eps()},
              {"pi", to_json(m.pi())},
              {"A", to_json(m.transitions())},
              {"c", std::move(c)},
              {"mu", std::move(mu)},
              {"sigma", std::move(sigma)}};
}

DiscreteHmm discrete_from(const json& j) {
  const auto n = size_field(j, "N");
  const auto k = size_field(j, "K");
  return DiscreteHmm(vector_of(field(j, "pi"), n, "pi"), matrix_of(field(j, "A"), n, n, "A"),
                     matrix_of(field(j, "B"), n, k, "B"));
}

GmmHmm gmm_from(const json& j) {
  const auto n = size_field(j, "N");
  const auto m = size_field(j, "M");
  const auto d = size_field(j, "D");
  const double eps = number(field(j, "eps"), "eps");
  const auto& c = field(j, "c");
  const auto& mu = field(j, "mu");
  const auto& sigma = field(j, "sigma");
  if (!c.is_array() || c.size() != n || !mu.is_array() || mu.size() != n || !sigma.is_array() || sigma.size() != n) {
    throw FormatError(fmt::format("model file: c, mu and sigma must have {} state entries", n));
  }
  std::vector<GaussianMixture> mixtures;
  for (std::size_t s = 0; s < n; ++s) {
    const Eigen::VectorXd w = vector_of(c[s], m, "c");
    if (!mu[s].is_array() || mu[s].size() != m || !sigma[s].is_array() || sigma[s].size() != m) {
      throw FormatError(fmt::format("model file: state {} must have {} means and covariances", s, m));
    }
    std::vector<Eigen::VectorXd> means;
    std::vector<Eigen::MatrixXd> covs;
    for (std::size_t k = 0; k < m; ++k) {
      means.push_back(vector_of(mu[s][k], d, "mu"));
      covs.push_back(matrix_of(sigma[s][k], d, d, "sigma"));
    }
    try {
      mixtures.push_back(GaussianMixture::from_parameters(std::vector<double>(w.begin(), w.end()), means, covs));
    } catch (const ModelDegeneracyError& e) {
      throw ModelDegeneracyError(fmt::format("state {}: {}", s, e.what()), s, e.component());
    }
  }
  return GmmHmm(vector_of(field(j, "pi"), n, "pi"), matrix_of(field(j, "A"), n, n, "A"), std::move(mixtures), eps);
}

}  // namespace

void write_model(std::ostream& out, const ModelFile& file) {
  json j = std::visit(
      [](const auto& m) {
        if constexpr (std::is_same_v<std::decay_t<decltype(m)>, DiscreteHmm>) {
          return discrete_json(m);
        } else {
          return gmm_json(m);
        }
      },
      file.model);
  j["format_version"] = kModelFormatVersion;
  j["training"] = json{{"seed", file.training.seed},
                       {"iterations", file.training.iterations},
                       {"final_log_likelihood", file.training.final_log_likelihood}};
  json cfg = json::array();
  for (const auto& [k, v] : file.config) cfg.push_back(json::array({k, v}));
  j["config"] = std::move(cfg);
  out << j.dump(2) << '\n';
}

void save_model(const std::filesystem::path& path, const ModelFile& file) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(fmt::format("cannot write {}", path.string()));
  write_model(out, file);
  if (!out) throw Error(fmt::format("error writing {}", path.string()));
}

ModelFile read_model(std::istream& in) {
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    throw FormatError(fmt::format("model file: {}", e.what()));
  }
  if (!j.is_object()) throw FormatError("model file: top level must be an object");
  const auto& version = field(j, "format_version");
  if (!version.is_number_integer() || version.get<int>() != kModelFormatVersion) {
    throw FormatError(fmt::format("model file: unsupported format_version {}", version.dump()));
  }
  const auto& kind = field(j, "kind");
  auto model = [&]() -> std::variant<DiscreteHmm, GmmHmm> {
    if (kind == "discrete") return discrete_from(j);
    if (kind == "gmm") return gmm_from(j);
    throw FormatError(fmt::format("model file: unknown kind {}", kind.dump()));
  }();
  ModelFile file{std::move(model), {}, {}};
  if (const auto it = j.find("training"); it != j.end()) {
    file.training.seed = it->value("seed", std::uint64_t{0});
    file.training.iterations = it->value("iterations", std::size_t{0});
    file.training.final_log_likelihood = number(field(*it, "final_log_likelihood"), "final_log_likelihood");
  }
  if (const auto it = j.find("config"); it != j.end()) {
    for (const auto& kv : *it) {
      if (!kv.is_array() || kv.size() != 2 || !kv[0].is_string() || !kv[1].is_string()) {
        throw FormatError("model file: config entries must be [key, value] string pairs");
      }
      file.config.emplace_back(kv[0].get<std::string>(), kv[1].get<std::string>());
    }
  }
  return file;
}

ModelFile load_model(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(fmt::format("cannot read {}", path.string()));
  return read_model(in);
}

}  // namespace gmmhmm

#include "io.hpp"

#include <charconv>
#include <set>

#include "permchar/error.hpp"

namespace permchar::io {

using nlohmann::json;

namespace {

[[noreturn]] void bad(const std::string& what) { fail(ErrorCode::kConfig, what); }

void allow_keys(const json& j, std::initializer_list<const char*> keys,
                const std::string& where) {
  if (!j.is_object()) bad(where + " must be an object");
  std::set<std::string> allowed(keys.begin(), keys.end());
  for (const auto& [key, value] : j.items()) {
    if (!allowed.count(key)) bad("unknown key '" + key + "' in " + where);
  }
}

const json& require(const json& j, const char* key, const std::string& where) {
  if (!j.contains(key)) bad(where + " is missing '" + key + "'");
  return j.at(key);
}

double number(const json& j, const std::string& what) {
  if (!j.is_number()) bad(what + " must be a number");
  return j.get<double>();
}

std::uint64_t unsigned_int(const json& j, const std::string& what) {
  if (!j.is_number_unsigned() && !(j.is_number_integer() && j.get<std::int64_t>() >= 0)) {
    bad(what + " must be a nonnegative integer");
  }
  return j.get<std::uint64_t>();
}

Complex complex_value(const json& j, const std::string& what) {
  if (j.is_number()) return {j.get<double>(), 0.0};
  if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number()) {
    return {j[0].get<double>(), j[1].get<double>()};
  }
  bad(what + " must be a number or [re, im]");
}

std::vector<Complex> complex_list(const json& j, const std::string& what) {
  if (!j.is_array()) bad(what + " must be an array");
  std::vector<Complex> out;
  for (const auto& v : j) out.push_back(complex_value(v, what));
  return out;
}

json complex_json(Complex c) { return json::array({c.real(), c.imag()}); }

}  // namespace

double parse_point(const json& j) {
  if (j.is_string()) {
    const auto preset = finite_type_preset(j.get<std::string>());
    if (!preset || preset->phis.size() != 1) {
      bad("unknown point preset '" + j.get<std::string>() + "'");
    }
    return preset->phis[0];
  }
  const double phi = number(j, "point");
  if (!(phi >= 0.0 && phi < 1.0)) bad("points must lie in [0, 1)");
  return phi;
}

MultiplierModel parse_model(const json& j) {
  if (!j.is_object()) bad("model must be an object");
  const auto type = require(j, "type", "model");
  if (!type.is_string()) bad("model type must be a string");
  const auto t = type.get<std::string>();
  if (t == "uniform" || t == "trivial") {
    allow_keys(j, {"type"}, "model");
    return t == "uniform" ? MultiplierModel::uniform() : MultiplierModel::trivial();
  }
  if (t == "fourier") {
    allow_keys(j, {"type", "coeffs"}, "fourier model");
    const auto& c = require(j, "coeffs", "fourier model");
    if (!c.is_object()) bad("fourier coeffs must map indices to values");
    std::map<int, Complex> coeffs;
    for (const auto& [key, value] : c.items()) {
      int index = 0;
      auto res = std::from_chars(key.data(), key.data() + key.size(), index);
      if (res.ec != std::errc() || res.ptr != key.data() + key.size()) {
        bad("fourier coefficient index '" + key + "' is not an integer");
      }
      coeffs[index] = complex_value(value, "fourier coefficient");
    }
    if (!coeffs.count(0)) coeffs[0] = 1.0;
    return MultiplierModel::fourier(std::move(coeffs));
  }
  if (t == "discrete") {
    allow_keys(j, {"type", "rho", "probs", "coeffs"}, "discrete model");
    if (j.contains("coeffs")) {
      if (j.contains("probs")) bad("give either probs or coeffs, not both");
      auto coeffs = complex_list(j.at("coeffs"), "discrete coeffs");
      if (j.contains("rho") &&
          unsigned_int(j.at("rho"), "rho") != coeffs.size()) {
        bad("rho does not match the number of coefficients");
      }
      return MultiplierModel::discrete_from_fourier(std::move(coeffs));
    }
    const auto& p = require(j, "probs", "discrete model");
    if (!p.is_array()) bad("probs must be an array");
    std::vector<double> probs;
    for (const auto& v : p) probs.push_back(number(v, "probability"));
    const auto rho = j.contains("rho") ? unsigned_int(j.at("rho"), "rho")
                                       : probs.size();
    return MultiplierModel::discrete(static_cast<int>(rho), std::move(probs));
  }
  bad("unknown model type '" + t + "'");
}

JointMultiplierModel parse_joint_model(const json& j, std::size_t d) {
  if (!j.is_object()) bad("model must be an object");
  const auto& type = require(j, "type", "model");
  if (!type.is_string()) bad("model type must be a string");
  const auto t = type.get<std::string>();
  if (t == "independent") {
    allow_keys(j, {"type", "models"}, "independent model");
    const auto& ms = require(j, "models", "independent model");
    if (!ms.is_array()) bad("models must be an array");
    std::vector<MultiplierModel> models;
    for (const auto& m : ms) models.push_back(parse_model(m));
    return JointMultiplierModel::independent(std::move(models));
  }
  if (t == "shared") {
    allow_keys(j, {"type", "model"}, "shared model");
    return JointMultiplierModel::shared(d, parse_model(require(j, "model", "shared model")));
  }
  if (t == "pairwise_fourier") {
    allow_keys(j, {"type", "coeffs"}, "pairwise_fourier model");
    const auto& rows = require(j, "coeffs", "pairwise_fourier model");
    if (!rows.is_array()) bad("pairwise coeffs must be a table");
    std::vector<std::vector<Complex>> table;
    for (const auto& row : rows) table.push_back(complex_list(row, "pairwise coefficient"));
    return JointMultiplierModel::pairwise_fourier(std::move(table));
  }
  std::vector<MultiplierModel> copies(std::max<std::size_t>(d, 1), parse_model(j));
  return JointMultiplierModel::independent(std::move(copies));
}

ExperimentConfig parse_experiment_config(const json& j) {
  allow_keys(j,
             {"version", "n", "theta", "points", "functions", "model", "kind",
              "num_samples", "seed", "centering", "workers", "finite_type"},
             "config");
  const auto& version = require(j, "version", "config");
  if (!version.is_number_integer() || version.get<int>() != kConfigVersion) {
    bad("config version must be " + std::to_string(kConfigVersion));
  }
  ExperimentConfig cfg;
  cfg.n = unsigned_int(require(j, "n", "config"), "n");
  cfg.theta = j.contains("theta") ? number(j.at("theta"), "theta") : 1.0;
  if (!(cfg.theta > 0.0) || !std::isfinite(cfg.theta)) bad("theta must be positive");
  cfg.num_samples = unsigned_int(require(j, "num_samples", "config"), "num_samples");
  cfg.master_seed = j.contains("seed") ? unsigned_int(j.at("seed"), "seed") : 0;
  cfg.workers = j.contains("workers") ? unsigned_int(j.at("workers"), "workers") : 1;

  const std::string kind = j.contains("kind") ? j.at("kind").get<std::string>() : "logZ";
  if (kind == "logZ" || kind == "multipoint") {
    cfg.kind = StatisticKind::kLogZ;
  } else if (kind == "w1") {
    cfg.kind = StatisticKind::kW1;
  } else if (kind == "w2") {
    cfg.kind = StatisticKind::kW2;
  } else if (kind == "cycle_count") {
    cfg.kind = StatisticKind::kCycleCount;
  } else {
    bad("unknown kind '" + kind + "'");
  }

  const std::string centering =
      j.contains("centering") ? j.at("centering").get<std::string>() : "none";
  if (centering == "none") {
    cfg.centering = CenteringMode::kNone;
  } else if (centering == "theoretical") {
    cfg.centering = CenteringMode::kTheoretical;
  } else if (centering == "empirical") {
    cfg.centering = CenteringMode::kEmpirical;
  } else {
    bad("unknown centering '" + centering + "'");
  }

  if (j.contains("points")) {
    const auto& ps = j.at("points");
    if (!ps.is_array()) bad("points must be an array");
    for (const auto& p : ps) cfg.points.emplace_back(parse_point(p));
  }
  if (cfg.kind != StatisticKind::kCycleCount && cfg.points.empty()) {
    bad("config needs at least one point");
  }
  if (j.contains("functions")) {
    const auto& fs = j.at("functions");
    if (!fs.is_array() || fs.empty()) bad("functions must be a nonempty array");
    cfg.functions.clear();
    for (const auto& f : fs) {
      if (!f.is_string()) bad("function labels must be strings");
      cfg.functions.push_back(f.get<std::string>());
      (void)SpectralFunction::from_label(cfg.functions.back());
    }
  }
  const std::size_t d = std::max<std::size_t>(cfg.points.size(), 1);
  cfg.model = j.contains("model")
                  ? parse_joint_model(j.at("model"), d)
                  : JointMultiplierModel::independent(
                        std::vector<MultiplierModel>(d, MultiplierModel::uniform()));
  if (j.contains("finite_type")) {
    const auto& ft = j.at("finite_type");
    allow_keys(ft, {"K", "gamma", "H"}, "finite_type");
    FiniteTypeCertificate cert;
    cert.K = number(require(ft, "K", "finite_type"), "K");
    cert.gamma = number(require(ft, "gamma", "finite_type"), "gamma");
    cert.H_searched = static_cast<std::int64_t>(
        ft.contains("H") ? unsigned_int(ft.at("H"), "H") : 1000);
    if (!(cert.K > 0.0) || !(cert.gamma >= 1.0) || cert.H_searched < 1) {
      bad("finite_type needs K > 0, gamma >= 1 and H >= 1");
    }
    cfg.finite_type = cert;
  }
  return cfg;
}

json to_json(const LimitConstants& c) {
  return {{"m_R", c.m_R}, {"m_I", c.m_I}, {"V_R", c.V_R}, {"V_I", c.V_I},
          {"C_RI", c.C_RI}};
}

json to_json(const CovarianceSpec& c) {
  json rows = json::array();
  const std::size_t k = 2 * c.d;
  for (std::size_t r = 0; r < k; ++r) {
    json row = json::array();
    for (std::size_t col = 0; col < k; ++col) row.push_back(c.at(r, col));
    rows.push_back(std::move(row));
  }
  return {{"d", c.d}, {"matrix", rows}, {"min_eigenvalue", c.min_eigenvalue}};
}

json to_json(const DiscrepancyReport& r) {
  auto opt = [](const std::optional<double>& v) -> json {
    return v ? json(*v) : json(nullptr);
  };
  return {{"n", r.n},          {"d", r.d},
          {"exact", r.exact},  {"etk", opt(r.etk)},
          {"kh_bound", opt(r.kh_bound)}, {"delta", opt(r.delta)}};
}

namespace {

json model_json(const MultiplierModel& m) {
  return std::visit(
      [](const auto& v) -> json {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, TrivialMultiplier>) {
          return {{"type", "trivial"}};
        } else if constexpr (std::is_same_v<T, UniformMultiplier>) {
          return {{"type", "uniform"}};
        } else if constexpr (std::is_same_v<T, FourierDensity>) {
          json coeffs = json::object();
          for (const auto& [k, c] : v.coeffs) coeffs[std::to_string(k)] = complex_json(c);
          return {{"type", "fourier"}, {"coeffs", coeffs}};
        } else {
          return {{"type", "discrete"}, {"rho", v.rho}, {"probs", v.probs}};
        }
      },
      m.variant());
}

json joint_json(const JointMultiplierModel& m) {
  return std::visit(
      [](const auto& v) -> json {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, IndependentProduct>) {
          json models = json::array();
          for (const auto& mm : v.models) models.push_back(model_json(mm));
          return {{"type", "independent"}, {"models", models}};
        } else if constexpr (std::is_same_v<T, SharedMultiplier>) {
          return {{"type", "shared"}, {"model", model_json(v.model)}};
        } else {
          json rows = json::array();
          for (const auto& row : v.coeffs) {
            json r = json::array();
            for (const auto& c : row) r.push_back(complex_json(c));
            rows.push_back(std::move(r));
          }
          return {{"type", "pairwise_fourier"}, {"coeffs", rows}};
        }
      },
      m.variant());
}

}  // namespace

json to_json(const ExperimentConfig& cfg) {
  json points = json::array();
  for (const auto& p : cfg.points) points.push_back(p.phi());
  json j = {{"version", kConfigVersion},
            {"n", cfg.n},
            {"theta", cfg.theta},
            {"points", points},
            {"functions", cfg.functions},
            {"model", joint_json(cfg.model)},
            {"kind", std::string(to_string(cfg.kind))},
            {"num_samples", cfg.num_samples},
            {"seed", cfg.master_seed},
            {"centering", std::string(to_string(cfg.centering))}};
  if (cfg.finite_type) {
    j["finite_type"] = {{"K", cfg.finite_type->K},
                        {"gamma", cfg.finite_type->gamma},
                        {"H", cfg.finite_type->H_searched}};
  }
  return j;
}

json to_json(const ExperimentConfig& cfg, const ExperimentResult& r,
             bool include_samples, bool include_timing) {
  const std::size_t w = r.width();
  json cov = json::array();
  for (std::size_t a = 0; a < w; ++a) {
    json row = json::array();
    for (std::size_t b = 0; b < w; ++b) row.push_back(r.covariance[a * w + b]);
    cov.push_back(std::move(row));
  }
  json constants = json::array();
  for (const auto& c : r.constants) constants.push_back(to_json(c));
  json out = {{"config", to_json(cfg)},
              {"d", r.d},
              {"num_samples", r.num_samples},
              {"singular_samples", r.singular_samples},
              {"constants", constants},
              {"center", r.center},
              {"scale", r.scale},
              {"summary",
               {{"mean", r.mean},
                {"variance", r.variance},
                {"covariance", cov},
                {"ks", r.ks}}},
              {"notes", r.notes}};
  if (include_samples) {
    json samples = json::array();
    for (std::size_t i = 0; i < r.num_samples; ++i) {
      samples.push_back(std::vector<double>(r.normalized.begin() + i * w,
                                            r.normalized.begin() + (i + 1) * w));
    }
    out["samples"] = std::move(samples);
  }
  if (include_timing) out["wall_seconds"] = r.wall_seconds;
  return out;
}

void write_samples_csv(std::ostream& out, const ExperimentResult& r) {
  const std::size_t w = r.width();
  out << "sample_index,point_index,re,im\n";
  char buf[64];
  auto fmt = [&](double v) {
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
  };
  for (std::size_t i = 0; i < r.num_samples; ++i) {
    for (std::size_t j = 0; j < r.d; ++j) {
      out << i << ',' << j << ',' << fmt(r.normalized[i * w + 2 * j]) << ','
          << fmt(r.normalized[i * w + 2 * j + 1]) << '\n';
    }
  }
}

}  // namespace permchar::io

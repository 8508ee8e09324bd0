#include <CLI11.hpp>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <nlohmann/json.hpp>
#include <optional>

#include "io.hpp"
#include "permchar/class_functions.hpp"
#include "permchar/equidistribution.hpp"
#include "permchar/error.hpp"
#include "permchar/harness.hpp"
#include "permchar/limit_theory.hpp"
#include "permchar/permutation.hpp"
#include "permchar/random.hpp"

namespace {

using nlohmann::json;
using namespace permchar;

constexpr int kExitOk = 0;
constexpr int kExitRuntime = 1;
constexpr int kExitUsage = 2;

bool is_config_error(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument:
    case ErrorCode::kInvalidCycleType:
    case ErrorCode::kSizeLimit:
    case ErrorCode::kHorizonTooSmall:
    case ErrorCode::kInvalidCoefficients:
    case ErrorCode::kDimensionUnsupported:
    case ErrorCode::kResonantFrequency:
    case ErrorCode::kPointOutsideBox:
    case ErrorCode::kRegimeViolation:
    case ErrorCode::kConfig:
      return true;
    default:
      return false;
  }
}

struct Output {
  std::string path;  // empty or "-" for stdout

  template <class Fn>
  void with_stream(Fn&& fn) const {
    if (path.empty() || path == "-") {
      fn(std::cout);
      std::cout.flush();
      return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) fail(ErrorCode::kConfig, "cannot open output file '" + path + "'");
    fn(out);
  }

  void write(const std::string& text) const {
    with_stream([&](std::ostream& out) { out << text; });
  }
};

std::uint64_t default_seed() {
  if (const char* env = std::getenv("PERMCHAR_SEED")) {
    char* end = nullptr;
    const auto v = std::strtoull(env, &end, 10);
    if (end == env || *end != '\0') {
      fail(ErrorCode::kConfig, "PERMCHAR_SEED must be an unsigned integer");
    }
    return v;
  }
  return 0;
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

// ---------------------------------------------------------------------------

struct SampleArgs {
  std::size_t n = 0;
  double theta = 1.0;
  std::size_t count = 1;
  std::optional<std::uint64_t> seed;
  std::string format = "json";
  bool permutations = false;
  Output out;
};

int cmd_sample(const SampleArgs& a) {
  const EwensParameter theta(a.theta);
  if (a.n == 0) fail(ErrorCode::kConfig, "n must be positive");
  const std::uint64_t seed = a.seed ? *a.seed : default_seed();
  const bool csv = a.format == "csv";
  // Rows are written as they are drawn so that memory stays O(n).
  a.out.with_stream([&](std::ostream& out) {
    if (csv) {
      out << "sample_index";
      for (std::size_t m = 1; m <= a.n; ++m) out << ",c_" << m;
      out << "\n";
    } else {
      const json head = {{"n", a.n},
                         {"theta", a.theta},
                         {"seed", seed},
                         {"sampler", a.permutations ? "crp" : "feller"}};
      const std::string text = head.dump();
      out << text.substr(0, text.size() - 1) << ",\"samples\":[";
    }
    for (std::size_t i = 0; i < a.count; ++i) {
      Stream stream = derive_stream(seed, i);
      std::optional<Permutation> perm;
      CycleType ct;
      if (a.permutations) {
        perm = sample_permutation_crp(a.n, theta, stream);
        ct = perm->cycle_type();
      } else {
        ct = sample_cycle_type(a.n, theta, stream);
      }
      if (csv) {
        out << i;
        for (auto c : ct.counts()) out << ',' << c;
        out << "\n";
        continue;
      }
      json row = {{"sample_index", i},
                  {"counts", ct.counts()},
                  {"total_cycles", ct.total_cycles()}};
      if (perm) {
        std::vector<std::size_t> one_based;
        for (auto v : perm->images()) one_based.push_back(v + 1);
        row["permutation"] = one_based;
      }
      out << (i == 0 ? "\n" : ",\n") << row.dump();
    }
    if (!csv) out << "\n]}\n";
  });
  return kExitOk;
}

// ---------------------------------------------------------------------------

struct CltArgs {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> workers;
  std::string dump_samples;
  bool no_samples = false;
  bool timing = false;
  Output out;
};

int cmd_clt(const CltArgs& a) {
  json j;
  {
    std::ifstream in;
    std::istream* src = &std::cin;
    if (a.config != "-") {
      in.open(a.config);
      if (!in) fail(ErrorCode::kConfig, "cannot open config '" + a.config + "'");
      src = &in;
    }
    try {
      j = json::parse(*src);
    } catch (const json::exception& e) {
      fail(ErrorCode::kConfig, std::string("config is not valid JSON: ") + e.what());
    }
  }
  ExperimentConfig cfg;
  try {
    cfg = io::parse_experiment_config(j);
  } catch (const json::exception& e) {
    fail(ErrorCode::kConfig, std::string("config has a wrong type: ") + e.what());
  }
  if (a.seed) {
    cfg.master_seed = *a.seed;
  } else if (!j.contains("seed")) {
    cfg.master_seed = default_seed();
  }
  if (a.workers) cfg.workers = *a.workers;
  for (const auto& note : validate(cfg)) std::cerr << "note: " << note << "\n";

  const auto result = run_experiment(cfg);
  if (!a.dump_samples.empty()) {
    std::ofstream csv(a.dump_samples, std::ios::binary);
    if (!csv) fail(ErrorCode::kConfig, "cannot open '" + a.dump_samples + "'");
    io::write_samples_csv(csv, result);
  }
  a.out.write(dump(io::to_json(cfg, result, !a.no_samples, a.timing)));
  return kExitOk;
}

// ---------------------------------------------------------------------------

struct DiscrepancyArgs {
  std::vector<double> kronecker;
  std::string preset;
  std::size_t n = 0;
  std::optional<std::size_t> etk_H;
  bool kh = false;
  std::int64_t search_H = 1000;
  Output out;
};

int cmd_discrepancy(const DiscrepancyArgs& a) {
  std::vector<double> phis = a.kronecker;
  std::optional<FiniteTypeCertificate> cert;
  if (!a.preset.empty()) {
    if (!phis.empty()) fail(ErrorCode::kConfig, "give --kronecker or --preset, not both");
    const auto p = finite_type_preset(a.preset);
    if (!p) fail(ErrorCode::kConfig, "unknown preset '" + a.preset + "'");
    phis = p->phis;
    cert = p->certificate;
  }
  if (phis.empty()) fail(ErrorCode::kConfig, "give --kronecker or --preset");
  if (phis.size() > 2) {
    fail(ErrorCode::kDimensionUnsupported, "at most two Kronecker angles");
  }
  if (a.n == 0) fail(ErrorCode::kConfig, "n must be positive");
  for (double& p : phis) p = frac(p);

  const auto seq = kronecker(phis, a.n);
  DiscrepancyReport report;
  report.n = a.n;
  report.d = phis.size();
  report.exact = star_discrepancy_exact(seq);
  if (a.etk_H) report.etk = etk_bound(phis, a.n, *a.etk_H);
  json extra = json::object();
  if (a.kh) {
    if (!cert) {
      if (const auto p = match_finite_type_preset(phis)) {
        cert = p->certificate;
      } else {
        cert = finite_type_estimate(phis, a.search_H);
      }
    }
    if (!cert->valid()) {
      fail(ErrorCode::kRegimeViolation,
           "angles are not of finite type over the searched range");
    }
    report.delta = shrink_delta(*cert, a.n);
    const auto h = log_char_integrand();
    double sum = 0.0;
    double integral_value = 0.0;
    if (phis.size() == 1) {
      report.kh_bound = kh_error_bound(h, seq, *report.delta).total();
      sum = weighted_sum(h, seq);
      integral_value = integral(h);
    } else {
      report.kh_bound = kh_error_bound(h, h, seq, *report.delta).total();
      sum = weighted_sum(h, h, seq);
      integral_value = integral(h) * integral(h);
    }
    extra = {{"weighted_sum", sum},
             {"integral", integral_value},
             {"certificate",
              {{"K", cert->K},
               {"gamma", cert->gamma},
               {"H_searched", cert->H_searched},
               {"preset", cert->preset}}}};
  }
  json j = io::to_json(report);
  j["phis"] = phis;
  for (const auto& [k, v] : extra.items()) j[k] = v;
  a.out.write(dump(j));
  return kExitOk;
}

// ---------------------------------------------------------------------------

struct ConstantsArgs {
  std::vector<std::string> functions;
  double theta = 1.0;
  Output out;
};

int cmd_constants(const ConstantsArgs& a) {
  const EwensParameter theta(a.theta);
  std::vector<SpectralFunction> fs;
  for (const auto& label : a.functions) fs.push_back(SpectralFunction::from_label(label));
  std::vector<LimitConstants> constants;
  json list = json::array();
  for (const auto& f : fs) {
    constants.push_back(limit_constants(f));
    json entry = io::to_json(constants.back());
    entry["function"] = f.label();
    list.push_back(std::move(entry));
  }
  json j = {{"theta", a.theta},
            {"functions", list},
            {"covariance", io::to_json(covariance_matrix(constants, theta))}};
  if (constants.size() == 1) {
    const json single = io::to_json(constants[0]);
    for (const auto& [key, value] : single.items()) j[key] = value;
    j["function"] = fs[0].label();
  }
  a.out.write(dump(j));
  return kExitOk;
}

// ---------------------------------------------------------------------------

struct FellerArgs {
  std::size_t n = 0;
  double theta = 1.0;
  double tolerance = 1e-12;
  Output out;
};

int cmd_feller_check(const FellerArgs& a) {
  const EwensParameter theta(a.theta);
  const auto exact = exact_feller_distribution(a.n, theta);
  double max_diff = 0.0;
  double mass_feller = 0.0;
  double mass_esf = 0.0;
  std::size_t types = 0;
  for (const auto& ct : all_cycle_types(a.n)) {
    const double esf = esf_probability(ct, theta);
    const auto it = exact.find(ct);
    const double feller = it == exact.end() ? 0.0 : it->second;
    max_diff = std::max(max_diff, std::abs(esf - feller));
    mass_feller += feller;
    mass_esf += esf;
    ++types;
  }
  const bool pass = max_diff <= a.tolerance;
  a.out.write(dump({{"n", a.n},
                    {"theta", a.theta},
                    {"num_cycle_types", types},
                    {"max_abs_diff", max_diff},
                    {"total_mass_feller", mass_feller},
                    {"total_mass_esf", mass_esf},
                    {"tolerance", a.tolerance},
                    {"pass", pass}}));
  return pass ? kExitOk : kExitRuntime;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"permchar: random permutation matrices, class functions and "
               "their limit laws"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "permchar 0.1.0");

  SampleArgs sample;
  auto* s = app.add_subcommand("sample", "Sample Ewens cycle types");
  s->add_option("--n", sample.n, "Permutation size")->required();
  s->add_option("--theta", sample.theta, "Ewens parameter (> 0)");
  s->add_option("--count", sample.count, "Number of samples");
  s->add_option("--seed", sample.seed, "Master seed (default: PERMCHAR_SEED or 0)");
  s->add_option("--format", sample.format, "json or csv")
      ->check(CLI::IsMember({"json", "csv"}));
  s->add_flag("--permutations", sample.permutations,
              "Sample full permutations (Chinese restaurant) instead of "
              "cycle types from the Feller coupling");
  s->add_option("-o,--output", sample.out.path, "Output file (default stdout)");

  CltArgs clt;
  auto* c = app.add_subcommand("clt", "Run a Monte Carlo limit-law experiment");
  c->add_option("--config", clt.config, "Experiment config JSON ('-' for stdin)")
      ->required();
  c->add_option("--seed", clt.seed, "Override the master seed");
  c->add_option("--workers", clt.workers, "Worker threads (does not change results)");
  c->add_option("--dump-samples", clt.dump_samples, "Write per-sample CSV");
  c->add_flag("--no-samples", clt.no_samples, "Omit per-sample values from JSON");
  c->add_flag("--timing", clt.timing, "Include wall time in the JSON");
  c->add_option("-o,--output", clt.out.path, "Output file (default stdout)");

  DiscrepancyArgs disc;
  auto* d = app.add_subcommand("discrepancy", "Star discrepancy of a Kronecker sequence");
  d->add_option("--kronecker", disc.kronecker, "Angle(s) phi; repeat for d = 2");
  d->add_option("--preset", disc.preset, "Builtin finite-type angles");
  d->add_option("--n", disc.n, "Sequence length")->required();
  d->add_option("--etk-H", disc.etk_H, "Frequency cutoff for the Erdos-Turan-Koksma bound");
  d->add_flag("--kh", disc.kh,
              "Koksma-Hlawka bound for h = log|1 - e^{2 pi i u}| on the shrunken box");
  d->add_option("--search-H", disc.search_H,
                "Search range for the finite-type estimate when no preset matches");
  d->add_option("-o,--output", disc.out.path, "Output file (default stdout)");

  ConstantsArgs cons;
  auto* k = app.add_subcommand("constants", "Limit constants and covariance by quadrature");
  k->add_option("--function", cons.functions,
                "charpoly, sym, antisym or const:<c>; repeat for several points")
      ->required();
  k->add_option("--theta", cons.theta, "Ewens parameter (> 0)");
  k->add_option("-o,--output", cons.out.path, "Output file (default stdout)");

  FellerArgs feller;
  auto* f = app.add_subcommand("feller-check",
                               "Compare the Feller coupling with the Ewens sampling formula");
  f->add_option("--n", feller.n, "Permutation size (<= 16)")->required();
  f->add_option("--theta", feller.theta, "Ewens parameter (> 0)");
  f->add_option("--tolerance", feller.tolerance, "Pass threshold");
  f->add_option("-o,--output", feller.out.path, "Output file (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (s->parsed()) return cmd_sample(sample);
    if (c->parsed()) return cmd_clt(clt);
    if (d->parsed()) return cmd_discrepancy(disc);
    if (k->parsed()) return cmd_constants(cons);
    if (f->parsed()) return cmd_feller_check(feller);
  } catch (const Error& e) {
    std::cerr << "error (" << to_string(e.code()) << "): " << e.what() << "\n";
    return is_config_error(e.code()) ? kExitUsage : kExitRuntime;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
  return kExitUsage;
}

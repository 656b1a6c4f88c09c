// fbai: bounds, simulations and instance generation for fixed-budget
// best-arm identification.
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "battery.hpp"
#include "fbai/guarantees.hpp"
#include "fbai/io.hpp"
#include "fbai/montecarlo.hpp"

namespace {

constexpr int kOk = 0;
constexpr int kAcceptanceFailure = 1;
constexpr int kUsage = 2;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct InstanceSource {
  std::vector<double> means;
  std::string file;
  std::string family;
  std::size_t k = 0;
  std::size_t m = 0;
  CLI::Option* means_opt = nullptr;
  CLI::Option* file_opt = nullptr;
  CLI::Option* family_opt = nullptr;

  void attach(CLI::App& app) {
    means_opt = app.add_option("--means", means, "Comma-separated arm means")->delimiter(',');
    file_opt = app.add_option("--file", file, "Instance JSON file {\"means\": [...]}");
    family_opt = app.add_option("--family", family,
                                "Instance family: one-group, two-group, linear, concave, convex, stair");
    app.add_option("--k", k, "Number of arms for --family (all but stair)");
    app.add_option("--m", m, "Number of levels for --family stair (K = M(M+1)/2)");
    means_opt->excludes(file_opt)->excludes(family_opt);
    file_opt->excludes(family_opt);
  }

  fbai::Instance resolve() const {
    const int given = (means_opt->count() > 0) + (file_opt->count() > 0) + (family_opt->count() > 0);
    if (given != 1) throw UsageError("give exactly one of --means, --file, --family");
    if (means_opt->count()) return fbai::Instance(means, "custom");
    if (file_opt->count()) return fbai::load_instance(file);
    return family_instance(family, k, m);
  }

  static fbai::Instance family_instance(const std::string& name, std::size_t k, std::size_t m) {
    const fbai::Family f = fbai::parse_family(name);
    if (f == fbai::Family::Stair) {
      if (m == 0) throw UsageError("--family stair needs --m");
      return fbai::generate_instance(f, m);
    }
    if (k == 0) throw UsageError("--family " + name + " needs --k");
    return fbai::generate_instance(f, k);
  }
};

std::vector<std::string> split_list(const std::vector<std::string>& items) {
  std::vector<std::string> out;
  for (const auto& s : items) {
    std::stringstream ss(s);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
      if (!tok.empty()) out.push_back(tok);
    }
  }
  return out;
}

// Writes to --out when given, stdout otherwise.
void emit(const std::string& path, const std::string& text) {
  if (path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot open '" + path + "' for writing");
  os << text;
  if (!os) throw std::runtime_error("write failed for '" + path + "'");
}

std::string sci(double x, int digits = 4) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.*e", digits, x);
  return buf;
}

std::string bounds_table(const std::vector<fbai::GuaranteeReport>& reports) {
  std::string out;
  char line[160];
  std::snprintf(line, sizeof line, "%-11s %5s %-14s %8s %s\n", "algorithm", "j_min", "rate", "T", "bound");
  out += line;
  for (const auto& r : reports) {
    const std::string name(fbai::to_string(r.algorithm));
    if (r.bound_at_T.empty()) {
      std::snprintf(line, sizeof line, "%-11s %5zu %-14.8g %8s %s\n", name.c_str(), r.j_min, r.rate, "-",
                    "exp(-T*rate)");
      out += line;
    }
    for (const auto& [T, b] : r.bound_at_T) {
      std::snprintf(line, sizeof line, "%-11s %5zu %-14.8g %8lld %s\n", name.c_str(), r.j_min, r.rate,
                    static_cast<long long>(T), sci(b).c_str());
      out += line;
    }
  }
  return out;
}

std::string results_table(const std::vector<fbai::SimResult>& results) {
  std::string out;
  char line[200];
  std::snprintf(line, sizeof line, "%-10s %4s %-6s %8s %7s %7s %9s %21s\n", "family", "K", "algo", "T", "runs",
                "errors", "error %", "95% CI (%)");
  out += line;
  for (const auto& r : results) {
    std::snprintf(line, sizeof line, "%-10s %4zu %-6s %8lld %7lld %7lld %9.4f   [%7.4f, %7.4f]\n",
                  r.family.c_str(), r.num_arms, std::string(fbai::to_string(r.algorithm)).c_str(),
                  static_cast<long long>(r.budget), static_cast<long long>(r.runs),
                  static_cast<long long>(r.errors), 100 * r.error_rate, 100 * r.ci_low, 100 * r.ci_high);
    out += line;
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Fixed-budget best-arm identification: error-exponent bounds and Monte Carlo error tables."};
  app.require_subcommand(1);
  app.set_version_flag("--version", "fbai 0.1.0");

  // bounds
  auto* bounds = app.add_subcommand("bounds", "Error-exponent rates and exp(-T*rate) for an instance");
  InstanceSource bounds_src;
  bounds_src.attach(*bounds);
  std::vector<std::string> bound_algos{"sr,crc,cra"};
  std::vector<std::int64_t> bound_budgets;
  std::string bounds_format = "table";
  std::string bounds_out;
  bounds->add_option("--algos", bound_algos, "Comma-separated: sr, sr-kl, crc, cra, audibert, barrier")
      ->capture_default_str();
  bounds->add_option("--budget,--budgets", bound_budgets, "Budgets T at which to evaluate exp(-T*rate)")
      ->delimiter(',');
  bounds->add_option("--format", bounds_format, "Output format")
      ->check(CLI::IsMember({"table", "csv", "json"}))
      ->capture_default_str();
  bounds->add_option("--out", bounds_out, "Write to this file instead of stdout");

  // simulate
  auto* simulate = app.add_subcommand("simulate", "Monte Carlo error rates; writes the results CSV");
  InstanceSource sim_src;
  sim_src.attach(*simulate);
  std::vector<std::string> sim_algos{"sr,crc,cra"};
  std::vector<std::int64_t> sim_budgets;
  std::int64_t sim_runs = fbai::repro::kReferenceRuns;
  std::uint64_t sim_seed = 1;
  unsigned sim_threads = 0;
  double theta0 = 1e-5;
  std::vector<std::string> sim_params;
  std::string sim_format = "csv";
  std::string sim_out;
  simulate->add_option("--algos", sim_algos, "Comma-separated: sr, crc, cra, sh, ugape")->capture_default_str();
  simulate->add_option("--budget,--budgets", sim_budgets, "Comma-separated budgets T")
      ->delimiter(',')
      ->required();
  simulate->add_option("--runs", sim_runs, "Independent runs per (algorithm, T)")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  simulate->add_option("--seed", sim_seed, "Base seed")->capture_default_str();
  simulate->add_option("--threads", sim_threads, "Worker threads (0 = all hardware threads)")
      ->capture_default_str();
  simulate->add_option("--theta0", theta0, "CR warm-up fraction")->capture_default_str();
  simulate->add_option("--param", sim_params, "Extra policy parameter key=value (ugape_clip, ugape_scale)")
      ->delimiter(',');
  simulate->add_option("--format", sim_format, "Format of --out")
      ->check(CLI::IsMember({"csv", "json"}))
      ->capture_default_str();
  simulate->add_option("--out", sim_out, "Results file (CSV or JSON per --format); stdout when omitted");

  // gen
  auto* gen = app.add_subcommand("gen", "Write a benchmark instance as JSON");
  std::string gen_family;
  std::size_t gen_k = 0, gen_m = 0;
  std::string gen_out;
  gen->add_option("--family", gen_family, "one-group, two-group, linear, concave, convex, stair")->required();
  gen->add_option("--k", gen_k, "Number of arms (all families but stair)");
  gen->add_option("--m", gen_m, "Number of levels (stair)");
  gen->add_option("--out", gen_out, "Output file; stdout when omitted");

  // repro
  auto* repro = app.add_subcommand("repro", "Run the acceptance battery; exit 1 if any criterion fails");
  fbai::repro::Options ropts;
  std::vector<std::string> only;
  repro->add_option("--only", only,
                    "Restrict to groups (bounds, montecarlo, properties, policies) or criterion numbers")
      ->delimiter(',');
  repro->add_option("--runs", ropts.runs,
                    "Monte Carlo runs; tolerances widen by sqrt(40000/runs) below 40000")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  repro->add_option("--seed", ropts.seed, "Base seed")->capture_default_str();
  repro->add_option("--threads", ropts.threads, "Worker threads (0 = all hardware threads)")
      ->capture_default_str();

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
    return kUsage;
  }

  try {
    if (bounds->parsed()) {
      const auto s = fbai::sort_desc(bounds_src.resolve());
      std::vector<fbai::GuaranteeReport> reports;
      for (const auto& name : split_list(bound_algos)) {
        const auto kind = fbai::parse_guarantee_kind(name);
        try {
          reports.push_back(fbai::compute_guarantee(kind, s, bound_budgets));
        } catch (const std::domain_error& e) {
          throw std::domain_error(std::string(fbai::to_string(kind)) + ": " + e.what());
        }
      }
      std::string text;
      if (bounds_format == "json") {
        auto arr = nlohmann::json::array();
        for (const auto& r : reports) arr.push_back(fbai::report_to_json(r));
        text = arr.dump(2) + "\n";
      } else if (bounds_format == "csv") {
        std::ostringstream os;
        fbai::write_reports_csv(os, reports);
        text = os.str();
      } else {
        text = bounds_table(reports);
      }
      emit(bounds_out, text);
      return kOk;
    }

    if (simulate->parsed()) {
      fbai::ExperimentConfig cfg;
      cfg.instance = sim_src.resolve();
      cfg.family = cfg.instance.label();
      std::map<std::string, double> kv;
      for (const auto& p : sim_params) {
        const auto eq = p.find('=');
        if (eq == std::string::npos || eq == 0) {
          throw std::invalid_argument("--param expects key=value, got '" + p + "'");
        }
        kv[p.substr(0, eq)] = std::stod(p.substr(eq + 1));
      }
      fbai::PolicyParams params = fbai::PolicyParams::from_map(kv);
      params.theta0 = theta0;
      for (const auto& name : split_list(sim_algos)) {
        cfg.algorithms.push_back({fbai::parse_policy_kind(name), params});
      }
      cfg.budgets = sim_budgets;
      cfg.runs = sim_runs;
      cfg.base_seed = sim_seed;
      cfg.parallelism = sim_threads;
      const auto results = fbai::estimate_error(cfg);
      std::string text;
      if (sim_format == "json") {
        text = fbai::results_to_json(results).dump(2) + "\n";
      } else {
        std::ostringstream os;
        fbai::write_results_csv(os, results);
        text = os.str();
      }
      if (sim_out.empty()) {
        std::cout << text;
      } else {
        emit(sim_out, text);
        std::cout << results_table(results);
      }
      return kOk;
    }

    if (gen->parsed()) {
      const auto inst = InstanceSource::family_instance(gen_family, gen_k, gen_m);
      emit(gen_out, fbai::instance_to_json(inst).dump(2) + "\n");
      return kOk;
    }

    if (repro->parsed()) {
      for (const auto& o : split_list(only)) ropts.only.insert(o);
      const auto results = fbai::repro::run_battery(ropts, std::cout);
      std::size_t failed = 0;
      for (const auto& c : results) failed += !c.pass;
      std::cout << results.size() - failed << "/" << results.size() << " criteria passed\n";
      return failed ? kAcceptanceFailure : kOk;
    }
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  }
  return kOk;
}

#include "fbai/io.hpp"

#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace fbai {

namespace {

std::string fmt6(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", x);
  return buf;
}

std::string fmt_full(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.10g", x);
  return buf;
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream ss(line);
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

}  // namespace

nlohmann::json instance_to_json(const Instance& inst) {
  nlohmann::json j;
  j["means"] = std::vector<double>(inst.means().begin(), inst.means().end());
  if (!inst.label().empty()) j["label"] = inst.label();
  return j;
}

Instance instance_from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("means")) {
    throw std::invalid_argument("instance JSON needs a \"means\" array");
  }
  auto means = j.at("means").get<std::vector<double>>();
  std::string label = j.contains("label") ? j.at("label").get<std::string>() : std::string{};
  return Instance(std::move(means), std::move(label));
}

Instance load_instance(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open '" + path + "'");
  try {
    return instance_from_json(nlohmann::json::parse(is));
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error("'" + path + "': " + e.what());
  }
}

void save_instance(const std::string& path, const Instance& inst) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open '" + path + "' for writing");
  os << instance_to_json(inst).dump(2) << '\n';
  if (!os) throw std::runtime_error("write failed for '" + path + "'");
}

nlohmann::json report_to_json(const GuaranteeReport& report) {
  nlohmann::json j;
  j["algorithm"] = std::string(to_string(report.algorithm));
  j["rate"] = report.rate;
  j["j_min"] = report.j_min;
  auto& per_j = j["per_j"] = nlohmann::json::array();
  for (const auto& t : report.per_j) {
    nlohmann::json e{{"j", t.j}, {"contribution", t.contribution}};
    const bool cr = report.algorithm == GuaranteeKind::CRC || report.algorithm == GuaranteeKind::CRA;
    if (cr) {
      e["xi"] = t.xi;
      e["xi_bar"] = t.xi_bar;
      e["psi"] = t.psi;
      e["psi_bar"] = t.psi_bar;
      e["zeta"] = t.zeta;
      e["phi"] = t.phi;
      if (t.alpha_crc) e["alpha_crc"] = *t.alpha_crc;
      if (t.alpha_cra) e["alpha_cra"] = *t.alpha_cra;
    } else if (report.algorithm == GuaranteeKind::SRPinsker || report.algorithm == GuaranteeKind::SRKL) {
      e["xi"] = t.xi;
    }
    per_j.push_back(std::move(e));
  }
  auto& bounds = j["bounds"] = nlohmann::json::object();
  for (const auto& [T, b] : report.bound_at_T) bounds[std::to_string(T)] = b;
  return j;
}

void write_reports_csv(std::ostream& os, const std::vector<GuaranteeReport>& reports) {
  os << "algorithm,j_min,rate,T,bound\n";
  for (const auto& r : reports) {
    const std::string head =
        std::string(to_string(r.algorithm)) + ',' + std::to_string(r.j_min) + ',' + fmt_full(r.rate);
    if (r.bound_at_T.empty()) {
      os << head << ",,\n";
      continue;
    }
    for (const auto& [T, b] : r.bound_at_T) os << head << ',' << T << ',' << fmt_full(b) << '\n';
  }
}

void write_results_csv(std::ostream& os, const std::vector<SimResult>& results) {
  os << kResultsHeader << '\n';
  for (const auto& r : results) {
    os << r.family << ',' << r.num_arms << ',' << to_string(r.algorithm) << ',' << r.budget << ','
       << r.runs << ',' << r.errors << ',' << fmt6(r.error_rate) << ',' << fmt6(r.ci_low) << ','
       << fmt6(r.ci_high) << ',' << r.base_seed << '\n';
  }
}

std::vector<SimResult> read_results_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line) || line != kResultsHeader) {
    throw std::runtime_error("results CSV: missing or unexpected header");
  }
  std::vector<SimResult> out;
  std::size_t lineno = 1;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty()) continue;
    const auto cells = split(line);
    if (cells.size() != 10) {
      throw std::runtime_error("results CSV line " + std::to_string(lineno) + ": expected 10 fields");
    }
    try {
      SimResult r;
      r.family = cells[0];
      r.num_arms = std::stoull(cells[1]);
      r.algorithm = parse_policy_kind(cells[2]);
      r.budget = std::stoll(cells[3]);
      r.runs = std::stoll(cells[4]);
      r.errors = std::stoll(cells[5]);
      r.error_rate = std::stod(cells[6]);
      r.ci_low = std::stod(cells[7]);
      r.ci_high = std::stod(cells[8]);
      r.base_seed = std::stoull(cells[9]);
      out.push_back(std::move(r));
    } catch (const std::exception& e) {
      throw std::runtime_error("results CSV line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  return out;
}

nlohmann::json results_to_json(const std::vector<SimResult>& results) {
  auto arr = nlohmann::json::array();
  for (const auto& r : results) {
    arr.push_back({{"family", r.family},
                   {"K", r.num_arms},
                   {"algorithm", std::string(to_string(r.algorithm))},
                   {"T", r.budget},
                   {"runs", r.runs},
                   {"errors", r.errors},
                   {"error_rate", r.error_rate},
                   {"ci_low", r.ci_low},
                   {"ci_high", r.ci_high},
                   {"base_seed", r.base_seed}});
  }
  return arr;
}

}  // namespace fbai

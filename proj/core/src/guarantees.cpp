#include "fbai/guarantees.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "fbai/numeric.hpp"
#include "fbai/pooling.hpp"

namespace fbai {

namespace {

void check_j(const SortedInstance& s, std::size_t j, const char* what) {
  if (j < 2 || j > s.num_arms()) {
    throw std::out_of_range(std::string(what) + ": j=" + std::to_string(j) + " outside 2..K");
  }
}

double lb(std::size_t m) { return log_bar(static_cast<std::int64_t>(m)); }

double golden_section_min(const auto& f, double lo, double hi) {
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = lo, b = hi;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = f(c), fd = f(d);
  for (int it = 0; it < 400 && b - a > 1e-15 * std::max(1.0, std::abs(a)); ++it) {
    if (fc <= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = f(d);
    }
  }
  return std::min({f(a), f(b), fc, fd});
}

GuaranteeReport finish(GuaranteeKind kind, std::vector<ExponentTerms> per_j,
                       std::span<const std::int64_t> budgets) {
  GuaranteeReport r;
  r.algorithm = kind;
  r.rate = std::numeric_limits<double>::infinity();
  for (const auto& t : per_j) {
    if (t.contribution < r.rate) {
      r.rate = t.contribution;
      r.j_min = t.j;
    }
  }
  r.per_j = std::move(per_j);
  r.add_budgets(budgets);
  return r;
}

}  // namespace

std::string_view to_string(GuaranteeKind kind) {
  switch (kind) {
    case GuaranteeKind::SRPinsker: return "SR-pinsker";
    case GuaranteeKind::SRKL: return "SR-kl";
    case GuaranteeKind::CRC: return "CR-C";
    case GuaranteeKind::CRA: return "CR-A";
    case GuaranteeKind::Audibert: return "Audibert";
    case GuaranteeKind::Barrier: return "Barrier";
  }
  return "?";
}

GuaranteeKind parse_guarantee_kind(std::string_view name) {
  std::string n(name);
  std::transform(n.begin(), n.end(), n.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (n == "sr" || n == "sr-pinsker") return GuaranteeKind::SRPinsker;
  if (n == "sr-kl") return GuaranteeKind::SRKL;
  if (n == "crc" || n == "cr-c") return GuaranteeKind::CRC;
  if (n == "cra" || n == "cr-a") return GuaranteeKind::CRA;
  if (n == "audibert") return GuaranteeKind::Audibert;
  if (n == "barrier") return GuaranteeKind::Barrier;
  throw std::invalid_argument("unknown bound '" + std::string(name) + "'");
}

double GuaranteeReport::bound(std::int64_t budget) const {
  return std::exp(-static_cast<double>(budget) * rate);
}

void GuaranteeReport::add_budgets(std::span<const std::int64_t> budgets) {
  for (auto T : budgets) bound_at_T[T] = bound(T);
}

double xi_j(const SortedInstance& s, std::size_t j) {
  check_j(s, j, "xi_j");
  return pool_quadratic(std::span(s.sorted_means).first(j)).value;
}

double xi_bar_j(const SortedInstance& s, std::size_t j) {
  check_j(s, j, "xi_bar_j");
  std::vector<double> m(s.sorted_means.begin(), s.sorted_means.begin() + static_cast<std::ptrdiff_t>(j - 1));
  m.push_back(s.mu(j + 1));
  return pool_quadratic(m).value;
}

PsiPhiZeta psi_phi_zeta(const SortedInstance& s, std::size_t j) {
  check_j(s, j, "psi_phi_zeta");
  const double jd = static_cast<double>(j);
  const double mu1 = s.mu(1);
  CompensatedSum mid;  // mu_2 + ... + mu_{j-1}
  for (std::size_t k = 2; k + 1 <= j; ++k) mid.add(s.mu(k));
  const double head = mid.value();

  PsiPhiZeta out;
  const double d = mu1 - (head + s.mu(j)) / (jd - 1.0);
  const double d_bar = mu1 - (head + s.mu(j + 1)) / (jd - 1.0);
  out.psi = (jd - 1.0) / jd * d * d;
  out.psi_bar = (jd - 1.0) / jd * d_bar * d_bar;
  out.zeta = s.mu(j) - s.mu(j + 1);
  out.phi = (mu1 + head + s.mu(j)) / jd - s.mu(j + 1);
  return out;
}

double solve_crossing(double b1, double c1, double b2, double c2) {
  if (!(b1 > 0.0 && c1 > 0.0 && c2 > 0.0 && b2 >= 0.0)) {
    throw std::invalid_argument("solve_crossing: need b1, c1, c2 > 0 and b2 >= 0");
  }
  const auto gap = [&](double x) {
    const double hinge = std::max(c2 * std::sqrt(x) - b2, 0.0);
    return (c1 - b1 * x) - hinge * hinge;
  };
  double lo = 0.0;
  double hi = c1 / b1;
  if (gap(hi) >= 0.0) return hi;
  for (int it = 0; it < 2000; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    (gap(mid) > 0.0 ? lo : hi) = mid;
  }
  return std::abs(gap(lo)) <= std::abs(gap(hi)) ? lo : hi;
}

double alpha_j(const SortedInstance& s, std::size_t j, CrVariant variant) {
  check_j(s, j, "alpha_j");
  if (j == s.num_arms()) {
    throw std::out_of_range("alpha_j: undefined at j = K");
  }
  const double jd = static_cast<double>(j);
  const double b2 = std::sqrt(1.0 / ((jd + 1.0) * lb(j + 1)));
  const PsiPhiZeta q = psi_phi_zeta(s, j);
  if (variant == CrVariant::Conservative) {
    const double xi = xi_j(s, j);
    if (!(xi > 0.0)) throw std::domain_error("alpha_j: xi_j = 0 (degenerate instance)");
    const double c1 = 2.0 * xi / (jd * lb(j));
    return solve_crossing(c1, c1, b2, 1.0 + q.zeta);
  }
  if (!(q.psi > 0.0)) throw std::domain_error("alpha_j: psi_j = 0 (degenerate instance)");
  // psi (1 - a) / (j lb j) = j/(j+1) [..]^2, rescaled to a unit right-hand side.
  const double c1 = q.psi * (jd + 1.0) / (jd * jd * lb(j));
  return solve_crossing(c1, c1, b2, 1.0 + q.phi);
}

ExponentTerms exponent_terms(const SortedInstance& s, std::size_t j) {
  check_j(s, j, "exponent_terms");
  ExponentTerms t;
  t.j = j;
  t.xi = xi_j(s, j);
  t.xi_bar = xi_bar_j(s, j);
  const PsiPhiZeta q = psi_phi_zeta(s, j);
  t.psi = q.psi;
  t.psi_bar = q.psi_bar;
  t.zeta = q.zeta;
  t.phi = q.phi;
  if (j < s.num_arms()) {
    t.alpha_crc = alpha_j(s, j, CrVariant::Conservative);
    t.alpha_cra = alpha_j(s, j, CrVariant::Aggressive);
  }
  return t;
}

double gamma_j_kl(const SortedInstance& s, std::size_t j, bool enumerate_subsets) {
  check_j(s, j, "gamma_j_kl");
  const std::size_t K = s.num_arms();
  if (!enumerate_subsets) return pool_kl(std::span(s.sorted_means).first(j)).value;

  // C(K-1, j-1) subsets containing arm 1.
  double subsets = 1.0;
  for (std::size_t i = 1; i <= j - 1; ++i) {
    subsets = subsets * static_cast<double>(K - j + i) / static_cast<double>(i);
  }
  if (subsets > 1e5) {
    throw std::length_error("gamma_j_kl: too many subsets to enumerate (" +
                            std::to_string(subsets) + ")");
  }
  std::vector<std::size_t> pick(j - 1);
  for (std::size_t i = 0; i < pick.size(); ++i) pick[i] = i + 1;  // 0-based sorted positions
  std::vector<double> m(j);
  double best = std::numeric_limits<double>::infinity();
  while (true) {
    m[0] = s.sorted_means[0];
    for (std::size_t i = 0; i < pick.size(); ++i) m[i + 1] = s.sorted_means[pick[i]];
    best = std::min(best, pool_kl(m).value);
    // Next combination of j-1 positions out of 1..K-1.
    std::size_t i = pick.size();
    while (i > 0 && pick[i - 1] == K - pick.size() + (i - 1)) --i;
    if (i == 0) break;
    ++pick[i - 1];
    for (std::size_t k = i; k < pick.size(); ++k) pick[k] = pick[k - 1] + 1;
  }
  return best;
}

GuaranteeReport rate_sr_pinsker(const SortedInstance& s, std::span<const std::int64_t> budgets) {
  const std::size_t K = s.num_arms();
  const double lbk = lb(K);
  std::vector<ExponentTerms> per_j;
  for (std::size_t j = 2; j <= K; ++j) {
    ExponentTerms t;
    t.j = j;
    t.xi = xi_j(s, j);
    t.contribution = 2.0 * t.xi / (static_cast<double>(j) * lbk);
    per_j.push_back(t);
  }
  return finish(GuaranteeKind::SRPinsker, std::move(per_j), budgets);
}

GuaranteeReport rate_sr_kl(const SortedInstance& s, std::span<const std::int64_t> budgets) {
  const std::size_t K = s.num_arms();
  const double lbk = lb(K);
  std::vector<ExponentTerms> per_j;
  for (std::size_t j = 2; j <= K; ++j) {
    ExponentTerms t;
    t.j = j;
    t.xi = xi_j(s, j);
    t.contribution = gamma_j_kl(s, j) / (static_cast<double>(j) * lbk);
    per_j.push_back(t);
  }
  return finish(GuaranteeKind::SRKL, std::move(per_j), budgets);
}

namespace {

GuaranteeReport rate_cr(const SortedInstance& s, std::span<const std::int64_t> budgets,
                        CrVariant variant) {
  const std::size_t K = s.num_arms();
  const double lbk = lb(K);
  std::vector<ExponentTerms> per_j;
  for (std::size_t j = 2; j <= K; ++j) {
    ExponentTerms t = exponent_terms(s, j);
    const bool conservative = variant == CrVariant::Conservative;
    const double base = conservative ? t.xi : t.psi;
    const double cap = conservative ? t.xi_bar : t.psi_bar;
    double stretched = 0.0;
    if (j < K) {
      const double a = conservative ? *t.alpha_crc : *t.alpha_cra;
      stretched = base * lb(j + 1) * (1.0 - a) / lb(j);
    }
    const double term = std::min(std::max(stretched, base), cap);
    t.contribution = 2.0 * term / (static_cast<double>(j) * lbk);
    per_j.push_back(t);
  }
  return finish(variant == CrVariant::Conservative ? GuaranteeKind::CRC : GuaranteeKind::CRA,
                std::move(per_j), budgets);
}

}  // namespace

GuaranteeReport rate_crc(const SortedInstance& s, std::span<const std::int64_t> budgets) {
  return rate_cr(s, budgets, CrVariant::Conservative);
}

GuaranteeReport rate_cra(const SortedInstance& s, std::span<const std::int64_t> budgets) {
  return rate_cr(s, budgets, CrVariant::Aggressive);
}

GuaranteeReport report_audibert(const SortedInstance& s, std::span<const std::int64_t> budgets) {
  const std::size_t K = s.num_arms();
  const double lbk = lb(K);
  std::vector<ExponentTerms> per_j;
  for (std::size_t j = 2; j <= K; ++j) {
    ExponentTerms t;
    t.j = j;
    const double gap = s.mu(1) - s.mu(j);
    t.contribution = gap * gap / (static_cast<double>(j) * lbk);
    per_j.push_back(t);
  }
  return finish(GuaranteeKind::Audibert, std::move(per_j), budgets);
}

GuaranteeReport report_barrier(const SortedInstance& s, std::span<const std::int64_t> budgets) {
  const std::size_t K = s.num_arms();
  const double lbk = lb(K);
  std::vector<ExponentTerms> per_j;
  for (std::size_t j = 2; j <= K; ++j) {
    ExponentTerms t;
    t.j = j;
    const double pair[2] = {s.mu(1), s.mu(j)};
    t.contribution = pool_kl(pair).value / (static_cast<double>(j) * lbk);
    per_j.push_back(t);
  }
  return finish(GuaranteeKind::Barrier, std::move(per_j), budgets);
}

double rate_audibert(const SortedInstance& s) { return report_audibert(s).rate; }

double rate_barrier(const SortedInstance& s) { return report_barrier(s).rate; }

GuaranteeReport compute_guarantee(GuaranteeKind kind, const SortedInstance& s,
                                  std::span<const std::int64_t> budgets) {
  switch (kind) {
    case GuaranteeKind::SRPinsker: return rate_sr_pinsker(s, budgets);
    case GuaranteeKind::SRKL: return rate_sr_kl(s, budgets);
    case GuaranteeKind::CRC: return rate_crc(s, budgets);
    case GuaranteeKind::CRA: return rate_cra(s, budgets);
    case GuaranteeKind::Audibert: return report_audibert(s, budgets);
    case GuaranteeKind::Barrier: return report_barrier(s, budgets);
  }
  throw std::invalid_argument("unknown guarantee kind");
}

namespace {

void check_beta(double beta) {
  if (!(beta > 0.0 && beta <= 1.0)) {
    throw std::out_of_range("gap program: beta must lie in (0, 1]");
  }
}

}  // namespace

double gap_program_value(const SortedInstance& s, std::size_t j, double beta, CrVariant variant) {
  check_j(s, j, "gap_program_value");
  check_beta(beta);
  if (variant == CrVariant::Conservative) return gap_program_numeric(s, j, beta, variant);
  const double jd = static_cast<double>(j);
  CompensatedSum rest;
  for (std::size_t k = 2; k <= j; ++k) rest.add(s.mu(k));
  const double shifted = s.mu(1) - rest.value() / (jd - 1.0) + g_threshold(beta);
  return (jd - 1.0) * beta / jd * shifted * shifted;
}

double gap_program_numeric(const SortedInstance& s, std::size_t j, double beta, CrVariant variant) {
  check_j(s, j, "gap_program_numeric");
  check_beta(beta);
  const double g = g_threshold(beta);
  const double mu1 = s.mu(1);
  std::vector<double> others;
  for (std::size_t k = 2; k <= j; ++k) others.push_back(s.mu(k));
  const double others_mean = compensated_sum(others) / static_cast<double>(others.size());

  // For a fixed lambda_1 = x the remaining coordinates have closed-form
  // optimal responses, leaving a convex piecewise-quadratic function of x.
  const auto objective = [&](double x) {
    CompensatedSum acc;
    acc.add((x - mu1) * (x - mu1));
    if (variant == CrVariant::Conservative) {
      for (double m : others) {
        const double lift = std::max(0.0, x + g - m);
        acc.add(lift * lift);
      }
    } else {
      const double lift = std::max(0.0, x + g - others_mean);
      acc.add(static_cast<double>(others.size()) * lift * lift);
    }
    return acc.value();
  };
  const double lowest = *std::min_element(others.begin(), others.end());
  const double lo = std::min(mu1, lowest - g) - 1.0;
  return beta * golden_section_min(objective, lo, mu1);
}

}  // namespace fbai

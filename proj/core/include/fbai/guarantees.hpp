#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "fbai/instance.hpp"
#include "fbai/policy.hpp"

namespace fbai {

// Instance-specific error exponents for fixed-budget best-arm identification.
//
// Everything here works on a SortedInstance, mu_1 > mu_2 >= ... >= mu_K, and
// indexes arms 1..K as in the usual notation; mu_{K+1} is taken to be 0.  A
// "rate" R is an asymptotic exponent: P[error] <= exp(-T R) in the limit,
// and the reports evaluate exp(-T R) at finite budgets as a guide.

enum class GuaranteeKind { SRPinsker, SRKL, CRC, CRA, Audibert, Barrier };

std::string_view to_string(GuaranteeKind kind);
/// CLI names: sr, sr-kl, crc, cra, audibert, barrier.
GuaranteeKind parse_guarantee_kind(std::string_view name);

struct ExponentTerms {
  std::size_t j = 0;
  double xi = 0.0;
  double xi_bar = 0.0;
  double psi = 0.0;
  double psi_bar = 0.0;
  double zeta = 0.0;
  double phi = 0.0;
  std::optional<double> alpha_crc;  // present iff j < K
  std::optional<double> alpha_cra;
  /// This j's term inside the outer min of the reported rate.
  double contribution = 0.0;
};

struct GuaranteeReport {
  GuaranteeKind algorithm = GuaranteeKind::SRPinsker;
  double rate = 0.0;
  std::size_t j_min = 0;
  std::vector<ExponentTerms> per_j;
  std::map<std::int64_t, double> bound_at_T;

  /// exp(-T * rate).
  double bound(std::int64_t budget) const;
  void add_budgets(std::span<const std::int64_t> budgets);
};

/// min sum_{k<=j} (lambda_k - mu_k)^2  s.t.  lambda_1 <= lambda_k, k = 2..j.
double xi_j(const SortedInstance& s, std::size_t j);

/// Same program over the index set {1, ..., j-1, j+1}; at j = K the extra
/// coordinate is the virtual arm mu_{K+1} = 0.
double xi_bar_j(const SortedInstance& s, std::size_t j);

struct PsiPhiZeta {
  double psi = 0.0;
  double psi_bar = 0.0;
  double zeta = 0.0;
  double phi = 0.0;
};
PsiPhiZeta psi_phi_zeta(const SortedInstance& s, std::size_t j);

/// Unique x0 in (0, c1/b1] with c1 - b1 x0 = [(c2 sqrt(x0) - b2)_+]^2.
/// Requires b1, c1, c2 > 0 and b2 >= 0.
double solve_crossing(double b1, double c1, double b2, double c2);

/// Balancing point alpha_j of the CR analysis, 2 <= j <= K-1.
double alpha_j(const SortedInstance& s, std::size_t j, CrVariant variant);

/// All per-j quantities; alpha fields filled for j < K.
ExponentTerms exponent_terms(const SortedInstance& s, std::size_t j);

/// KL program min over J (|J| = j, 1 in J) of
///   inf { sum_{k in J} d(lambda_k, mu_k) : lambda_1 <= min_{k in J} lambda_k }.
/// With enumerate_subsets the outer min is exhaustive (at most 1e5 subsets,
/// std::length_error beyond); otherwise J = {1..j}, which attains the min
/// because d(x, mu) grows as mu moves away from x.
double gamma_j_kl(const SortedInstance& s, std::size_t j, bool enumerate_subsets = false);

GuaranteeReport rate_sr_pinsker(const SortedInstance& s, std::span<const std::int64_t> budgets = {});
GuaranteeReport rate_sr_kl(const SortedInstance& s, std::span<const std::int64_t> budgets = {});
GuaranteeReport rate_crc(const SortedInstance& s, std::span<const std::int64_t> budgets = {});
GuaranteeReport rate_cra(const SortedInstance& s, std::span<const std::int64_t> budgets = {});
GuaranteeReport report_audibert(const SortedInstance& s, std::span<const std::int64_t> budgets = {});
GuaranteeReport report_barrier(const SortedInstance& s, std::span<const std::int64_t> budgets = {});

/// min_j (mu_1 - mu_j)^2 / (j log_bar K).
double rate_audibert(const SortedInstance& s);
/// min_j inf_{lambda_1 <= lambda_j} [d(lambda_1, mu_1) + d(lambda_j, mu_j)] / (j log_bar K).
double rate_barrier(const SortedInstance& s);

GuaranteeReport compute_guarantee(GuaranteeKind kind, const SortedInstance& s,
                                  std::span<const std::int64_t> budgets = {});

/// beta * inf { sum_{k<=j} (lambda_k - mu_k)^2 : constraint } with
///   Conservative: lambda_1 <= min_{k=2..j} lambda_k - G(beta)
///   Aggressive:   lambda_1 <= mean_{k=2..j} lambda_k - G(beta).
/// The aggressive value is the KKT closed form; the conservative one is
/// solved numerically.  beta must lie in (0, 1].
double gap_program_value(const SortedInstance& s, std::size_t j, double beta, CrVariant variant);

/// Numerical solution of either gap program (1-D convex reduction over
/// lambda_1 followed by golden-section search), including the beta factor.
double gap_program_numeric(const SortedInstance& s, std::size_t j, double beta, CrVariant variant);

}  // namespace fbai

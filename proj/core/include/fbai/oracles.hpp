#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "fbai/instance.hpp"

// Brute-force reference solvers.  They share no code with the pooling and
// bisection solvers and exist to check them.
namespace fbai::oracle {

/// min sum_i (lambda_i - m_i)^2  s.t.  lambda_0 <= lambda_i for all i.
/// Dense scan of lambda_0 (step 1e-3) then a local scan (step 1e-6).
/// At most 8 coordinates; more throws std::length_error.
double xi_oracle(std::span<const double> m);

/// Same program on the coordinates `constraint_set` (1-based sorted
/// positions; K+1 denotes the virtual zero arm).  The first element plays
/// the role of arm 1.
double xi_oracle(const SortedInstance& s, const std::vector<std::size_t>& constraint_set);

/// First sign change of c1 - b1 x - [(c2 sqrt(x) - b2)_+]^2 on a uniform grid
/// of `points` cells over [0, c1/b1]; returns the bracket midpoint.
double crossing_grid(double b1, double c1, double b2, double c2, std::size_t points = 2'000'000);

/// inf { d(l1, m1) + d(l2, m2) : l1 <= l2 } by repeated grid zooming over the
/// feasible triangle.
double two_arm_kl_grid(double m1, double m2);

}  // namespace fbai::oracle

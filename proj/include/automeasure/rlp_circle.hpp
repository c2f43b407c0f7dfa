#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <string>
#include <vector>

#include "automeasure/rational.hpp"

namespace automeasure {

/// Multiplication of the circle by coprime p and q, coded in base pq.
class PQSystem {
 public:
  PQSystem(std::uint64_t p, std::uint64_t q) : p_(p), q_(q) {
    if (p < 2 || q < 2) throw Error("p and q must be at least 2");
    if (std::gcd(p, q) != 1) throw Error("p and q must be coprime");
  }
  std::uint64_t p() const noexcept { return p_; }
  std::uint64_t q() const noexcept { return q_; }
  std::uint64_t base() const noexcept { return p_ * q_; }

 private:
  std::uint64_t p_, q_;
};

/// A rational point of the circle R/Z, kept reduced in [0,1).
class RationalPoint {
 public:
  RationalPoint() : value_(0) {}
  explicit RationalPoint(Rational v) : value_(std::move(v)) {
    value_.canonicalize();
    if (value_ < 0 || value_ >= 1) throw Error("circle points must lie in [0,1)");
  }
  static RationalPoint wrap(const Rational& v) { return RationalPoint(frac(v)); }

  const Rational& value() const noexcept { return value_; }
  bool operator==(const RationalPoint& o) const { return value_ == o.value_; }
  bool operator<(const RationalPoint& o) const { return value_ < o.value_; }

  static Rational frac(const Rational& v) {
    mpz_class fl;
    mpz_fdiv_q(fl.get_mpz_t(), v.get_num_mpz_t(), v.get_den_mpz_t());
    Rational r = v - Rational(fl);
    r.canonicalize();
    return r;
  }

 private:
  Rational value_;
};

/// S_k(x) = kx mod 1.
inline RationalPoint times(std::uint64_t k, const RationalPoint& x) {
  return RationalPoint::wrap(x.value() * Rational(static_cast<unsigned long>(k)));
}

/// First base-b digit of x: floor(b·x).
inline std::uint64_t first_digit(std::uint64_t b, const RationalPoint& x) {
  Rational y = x.value() * Rational(static_cast<unsigned long>(b));
  mpz_class fl;
  mpz_fdiv_q(fl.get_mpz_t(), y.get_num_mpz_t(), y.get_den_mpz_t());
  return fl.get_ui();
}

/// Entry (i,j) is the first base-pq digit of q^i p^j x (row i, column j);
/// the diagonal is the base-pq expansion of x.
inline std::vector<std::vector<std::uint64_t>> space_time(const PQSystem& sys, const RationalPoint& x,
                                                          std::size_t width, std::size_t height) {
  std::vector<std::vector<std::uint64_t>> out(height, std::vector<std::uint64_t>(width));
  RationalPoint row = x;
  for (std::size_t i = 0; i < height; ++i) {
    RationalPoint cell = row;
    for (std::size_t j = 0; j < width; ++j) {
      out[i][j] = first_digit(sys.base(), cell);
      cell = times(sys.p(), cell);
    }
    row = times(sys.q(), row);
  }
  return out;
}

/// First `count` base-b digits of x by long division.
inline std::vector<std::uint64_t> expansion(std::uint64_t b, const RationalPoint& x, std::size_t count) {
  std::vector<std::uint64_t> digits;
  Rational r = x.value();
  for (std::size_t i = 0; i < count; ++i) {
    r *= Rational(static_cast<unsigned long>(b));
    mpz_class fl;
    mpz_fdiv_q(fl.get_mpz_t(), r.get_num_mpz_t(), r.get_den_mpz_t());
    digits.push_back(fl.get_ui());
    r -= Rational(fl);
  }
  return digits;
}

/// The q preimages of y under S_q, pushed through S_p, are exactly the q
/// preimages of S_p(y) under S_q, with no collisions.
inline bool fiber_bijectivity_check(const PQSystem& sys, const RationalPoint& y) {
  const auto q = static_cast<unsigned long>(sys.q());
  std::vector<Rational> pushed, fiber;
  const RationalPoint py = times(sys.p(), y);
  for (unsigned long k = 0; k < q; ++k) {
    const RationalPoint pre((y.value() + k) / Rational(q));
    pushed.push_back(times(sys.p(), pre).value());
    fiber.push_back(((py.value() + k) / Rational(q)));
  }
  std::sort(pushed.begin(), pushed.end());
  std::sort(fiber.begin(), fiber.end());
  if (std::adjacent_find(pushed.begin(), pushed.end()) != pushed.end()) return false;
  return pushed == fiber;
}

/// Sorted breakpoints of a partition of [0,1) into half-open intervals.
class IntervalPartition {
 public:
  explicit IntervalPartition(std::vector<Rational> breaks) : breaks_(std::move(breaks)) {
    if (breaks_.empty() || breaks_.front() != 0) throw Error("partition must start at 0");
    for (std::size_t i = 1; i < breaks_.size(); ++i)
      if (!(breaks_[i - 1] < breaks_[i])) throw Error("partition breakpoints must increase strictly");
    if (breaks_.back() >= 1) throw Error("partition breakpoints must lie in [0,1)");
  }
  const std::vector<Rational>& breaks() const noexcept { return breaks_; }
  std::size_t size() const noexcept { return breaks_.size(); }
  Rational left(std::size_t i) const { return breaks_[i]; }
  Rational right(std::size_t i) const { return i + 1 < breaks_.size() ? breaks_[i + 1] : Rational(1); }
  Rational length(std::size_t i) const { return right(i) - left(i); }

 private:
  std::vector<Rational> breaks_;
};

enum class CircleMap { P, Q };

namespace detail {
inline std::uint64_t checked_pow(std::uint64_t b, std::size_t e) {
  std::uint64_t r = 1;
  for (std::size_t i = 0; i < e; ++i) {
    if (r > UINT64_MAX / b) throw Error("partition too fine for 64-bit arithmetic");
    r *= b;
  }
  return r;
}
}  // namespace detail

/// ∨_{i<l} S^{-i}(α) for α the base-pq digit partition. Intervals have
/// length 1/(p^l q) for S_p and 1/(p q^l) for S_q.
inline std::uint64_t refinement_count(const PQSystem& sys, CircleMap map, std::size_t l) {
  if (l < 1) throw Error("refinement needs l >= 1");
  return map == CircleMap::P ? detail::checked_pow(sys.p(), l) * sys.q() : sys.p() * detail::checked_pow(sys.q(), l);
}

/// Builds the refinement by intersecting the preimage partitions directly;
/// the uniform-grid shape is a property checked by the tests, not assumed.
inline IntervalPartition refine_partition(const PQSystem& sys, CircleMap map, std::size_t l) {
  if (l < 1) throw Error("refinement needs l >= 1");
  const std::uint64_t k = map == CircleMap::P ? sys.p() : sys.q();
  const std::uint64_t b = sys.base();
  std::vector<Rational> breaks;
  // S_k^{-i}(α) has breakpoints (j/b + t)/k^i for j < b, t < k^i.
  for (std::size_t i = 0; i < l; ++i) {
    const std::uint64_t ki = detail::checked_pow(k, i);
    if (ki * b > 50'000'000) throw Error("partition too large to materialize");
    for (std::uint64_t t = 0; t < ki; ++t)
      for (std::uint64_t j = 0; j < b; ++j) {
        Rational x(static_cast<unsigned long>(j + t * b), static_cast<unsigned long>(b * ki));
        x.canonicalize();
        breaks.push_back(std::move(x));
      }
  }
  std::sort(breaks.begin(), breaks.end());
  breaks.erase(std::unique(breaks.begin(), breaks.end()), breaks.end());
  return IntervalPartition(std::move(breaks));
}

/// Largest number of B-intervals whose interior meets one A-interval.
/// Linear merge over exact breakpoints.
inline std::size_t max_interior_overlap(const IntervalPartition& a, const IntervalPartition& b) {
  std::size_t best = 0;
  std::size_t j = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const Rational lo = a.left(i), hi = a.right(i);
    while (j + 1 < b.size() && b.right(j) <= lo) ++j;
    std::size_t count = 0;
    for (std::size_t t = j; t < b.size() && b.left(t) < hi; ++t)
      if (b.right(t) > lo) ++count;
    best = std::max(best, count);
  }
  return best;
}

struct ReciprocityCounts {
  std::size_t l = 0;
  std::size_t m = 0;
  std::uint64_t max_p_over_q = 0;  // S_p-intervals meeting one S_q-interval (≤ q+1)
  std::uint64_t max_q_over_p = 0;  // S_q-intervals meeting one S_p-interval (≤ 2)
};

/// Smallest m with 1/(p q^m) ≤ 1/p^l, i.e. q^m ≥ p^{l−1}; the S_q interval
/// length then lies in [1/(p^l q), 1/p^l].
inline std::size_t reciprocity_m(const PQSystem& sys, std::size_t l) {
  if (l < 2) throw Error("reciprocity needs l >= 2");
  const std::uint64_t target = detail::checked_pow(sys.p(), l - 1);
  std::size_t m = 0;
  std::uint64_t qm = 1;
  while (qm < target) {
    if (qm > UINT64_MAX / sys.q()) throw Error("partition too fine for 64-bit arithmetic");
    qm *= sys.q();
    ++m;
  }
  return std::max<std::size_t>(m, 1);
}

namespace detail {
/// Both grids are uniform; on the common denominator p^l q^m the S_p grid has
/// integer step q^{m−1} and the S_q grid step p^{l−1}. Interval [x, x+s) of
/// one grid meets the interiors of floor((x+s−1)/t) − floor(x/t) + 1 cells
/// of step t. The pattern repeats every lcm of the steps.
inline std::uint64_t grid_max_overlap(std::uint64_t s, std::uint64_t t) {
  const std::uint64_t period = std::lcm(s, t);
  std::uint64_t best = 0;
  for (std::uint64_t x = 0; x < period; x += s) best = std::max(best, (x + s - 1) / t - x / t + 1);
  return best;
}
}  // namespace detail

inline ReciprocityCounts reciprocity_counts(const PQSystem& sys, std::size_t l) {
  ReciprocityCounts c;
  c.l = l;
  c.m = reciprocity_m(sys, l);
  const std::uint64_t step_p = detail::checked_pow(sys.q(), c.m - 1);  // 1/(p^l q) on denominator p^l q^m
  const std::uint64_t step_q = detail::checked_pow(sys.p(), l - 1);    // 1/(p q^m)
  c.max_p_over_q = detail::grid_max_overlap(step_q, step_p);
  c.max_q_over_p = detail::grid_max_overlap(step_p, step_q);
  return c;
}

/// Counts for l = 2..l_max.
inline std::vector<ReciprocityCounts> sub_exponential_report(const PQSystem& sys, std::size_t l_max) {
  if (l_max < 2 || l_max > 16) throw Error("l_max must lie in [2, 16]");
  std::vector<ReciprocityCounts> rows;
  for (std::size_t l = 2; l <= l_max; ++l) rows.push_back(reciprocity_counts(sys, l));
  return rows;
}

}  // namespace automeasure

#pragma once

#include <cmath>
#include <cstdint>
#include <utility>
#include <vector>

namespace dcepcc {

// Polyhedral conic acceptance region in the original sign convention:
//
//   f(x) = w'(x - s) + gamma'|x - s| - b,   inside <=> f(x) <= 0.
//
// |.| is the component-wise modulus. A scalar-gamma region (plain PCF) is
// stored with gamma broadcast to a constant vector. The sublevel set f <= 0
// is a bounded convex "kite" exactly when b > 0 and gamma_i > |w_i| on every
// axis; see is_bounded().
struct ConicRegion {
  std::vector<double> s;      // cone vertex
  std::vector<double> w;      // slope vector
  std::vector<double> gamma;  // per-axis cone weights
  double b = 0.0;             // offset

  int dim() const { return static_cast<int>(s.size()); }

  // Throws std::invalid_argument unless s, w, gamma share a dimension
  // d >= 1 and every component (b included) is finite.
  void validate() const;
};

namespace detail {

// Accumulates w'(x - s) + gamma'|x - s|. The classifier head evaluates its
// tilde-form score through this same loop so that the two sign conventions
// stay exact negatives of each other, bit for bit.
inline double cone_sum(const std::vector<double>& w,
                       const std::vector<double>& gamma,
                       const std::vector<double>& s,
                       const std::vector<double>& x) {
  double acc = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    const double d = x[i] - s[i];
    acc += w[i] * d + gamma[i] * std::abs(d);
  }
  return acc;
}

}  // namespace detail

// f(x) as defined above. Throws on dimension mismatch.
double eval_epcf(const ConicRegion& region, const std::vector<double>& x);

// Scalar-gamma variant: w'(x - s) + gamma * ||x - s||_1 - b. Computed by
// broadcasting gamma, so it matches eval_epcf exactly.
double eval_pcf(const std::vector<double>& s, const std::vector<double>& w,
                double gamma, double b, const std::vector<double>& x);

// True iff the acceptance region is bounded (and convex):
// b > 0 and, on every axis, gamma_i > 0 and |w_i| < gamma_i.
bool is_bounded(const ConicRegion& region);

// For each axis i, the interval cut out of the acceptance region by the line
// through s parallel to that axis:
//   [s_i - b/(gamma_i - w_i), s_i + b/(gamma_i + w_i)].
// Requires is_bounded(region); throws std::domain_error otherwise.
std::vector<std::pair<double, double>> axis_extents(const ConicRegion& region);

// Monte Carlo estimate of the acceptance-region volume: uniform samples in
// the axis_extents box, fraction inside times box volume. Under boundedness
// each per-axis term of f is nonnegative, so the box in fact contains the
// whole region and the estimate is unbiased; it is still a loose box for
// skewed w, which is fine since only relative volumes get compared.
// Deterministic for a fixed seed.
double mc_volume(const ConicRegion& region, std::uint64_t n_samples,
                 std::uint64_t seed);

// Membership test by explicit half-space enumeration. For gamma > 0,
// f(x) = max over sign patterns sigma in {-1,+1}^d of
//   w'(x - s) + sum_i gamma_i sigma_i (x_i - s_i) - b,
// so f(x) <= 0 iff all 2^d half-space constraints hold. A test device:
// d is capped at 12 to keep the enumeration sane.
bool orthant_membership_oracle(const ConicRegion& region,
                               const std::vector<double>& x);

}  // namespace dcepcc

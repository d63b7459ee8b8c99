#include "dcepcc/geometry.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "dcepcc/rng.hpp"

namespace dcepcc {

namespace {

void require_dim(const ConicRegion& region, const std::vector<double>& x,
                 const char* where) {
  if (region.s.size() != x.size()) {
    throw std::invalid_argument(std::string(where) + ": point has dimension " +
                                std::to_string(x.size()) + ", region has " +
                                std::to_string(region.s.size()));
  }
}

}  // namespace

void ConicRegion::validate() const {
  if (s.empty() || s.size() != w.size() || s.size() != gamma.size()) {
    throw std::invalid_argument("ConicRegion: s, w, gamma must share a dimension >= 1");
  }
  if (!std::isfinite(b)) {
    throw std::invalid_argument("ConicRegion: offset b is not finite");
  }
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (!std::isfinite(s[i]) || !std::isfinite(w[i]) || !std::isfinite(gamma[i])) {
      throw std::invalid_argument("ConicRegion: non-finite component at axis " +
                                  std::to_string(i));
    }
  }
}

double eval_epcf(const ConicRegion& region, const std::vector<double>& x) {
  require_dim(region, x, "eval_epcf");
  return detail::cone_sum(region.w, region.gamma, region.s, x) - region.b;
}

double eval_pcf(const std::vector<double>& s, const std::vector<double>& w,
                double gamma, double b, const std::vector<double>& x) {
  if (s.size() != w.size()) {
    throw std::invalid_argument("eval_pcf: s and w dimensions differ");
  }
  ConicRegion region{s, w, std::vector<double>(s.size(), gamma), b};
  return eval_epcf(region, x);
}

bool is_bounded(const ConicRegion& region) {
  if (!(region.b > 0.0)) return false;
  for (std::size_t i = 0; i < region.gamma.size(); ++i) {
    if (!(region.gamma[i] > 0.0)) return false;
    if (!(std::abs(region.w[i]) < region.gamma[i])) return false;
  }
  return true;
}

std::vector<std::pair<double, double>> axis_extents(const ConicRegion& region) {
  if (!is_bounded(region)) {
    throw std::domain_error("axis_extents: region is unbounded");
  }
  std::vector<std::pair<double, double>> extents(region.s.size());
  for (std::size_t i = 0; i < region.s.size(); ++i) {
    const double lo = region.s[i] - region.b / (region.gamma[i] - region.w[i]);
    const double hi = region.s[i] + region.b / (region.gamma[i] + region.w[i]);
    extents[i] = {lo, hi};
  }
  return extents;
}

double mc_volume(const ConicRegion& region, std::uint64_t n_samples,
                 std::uint64_t seed) {
  if (n_samples < 1) {
    throw std::invalid_argument("mc_volume: n_samples must be >= 1");
  }
  const auto box = axis_extents(region);  // also enforces boundedness
  double box_volume = 1.0;
  for (const auto& [lo, hi] : box) box_volume *= hi - lo;

  Rng rng(seed);
  std::vector<double> point(region.s.size());
  std::uint64_t inside = 0;
  for (std::uint64_t k = 0; k < n_samples; ++k) {
    for (std::size_t i = 0; i < point.size(); ++i) {
      point[i] = rng.uniform(box[i].first, box[i].second);
    }
    if (eval_epcf(region, point) <= 0.0) ++inside;
  }
  return box_volume * static_cast<double>(inside) / static_cast<double>(n_samples);
}

bool orthant_membership_oracle(const ConicRegion& region,
                               const std::vector<double>& x) {
  require_dim(region, x, "orthant_membership_oracle");
  const int d = region.dim();
  if (d > 12) {
    throw std::invalid_argument(
        "orthant_membership_oracle: dimension " + std::to_string(d) +
        " exceeds the enumeration cap of 12");
  }
  for (int i = 0; i < d; ++i) {
    if (!(region.gamma[i] > 0.0)) {
      throw std::invalid_argument(
          "orthant_membership_oracle: requires gamma > 0 on every axis");
    }
  }
  for (std::uint32_t mask = 0; mask < (1u << d); ++mask) {
    double value = -region.b;
    for (int i = 0; i < d; ++i) {
      const double sigma = (mask >> i) & 1u ? 1.0 : -1.0;
      value += (region.w[i] + sigma * region.gamma[i]) * (x[i] - region.s[i]);
    }
    if (value > 0.0) return false;
  }
  return true;
}

}  // namespace dcepcc

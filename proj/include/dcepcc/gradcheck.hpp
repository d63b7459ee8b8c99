#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace dcepcc {

struct GradCheckOptions {
  std::uint64_t seed = 42;
  std::vector<int> feature_dims = {2, 4, 8};
  std::vector<int> class_counts = {2, 3, 5};
  double epsilon = 1e-5;    // central-difference perturbation
  double tolerance = 1e-4;  // max allowed relative error
  bool corrupt = false;     // test hook: damages one analytic gradient
};

struct GradCheckGroup {
  std::string name;
  double max_rel_error = 0.0;
};

struct GradCheckReport {
  std::vector<GradCheckGroup> groups;
  double max_rel_error = 0.0;
  bool passed = false;
};

// Builds random training problems kept away from every subgradient kink
// (rectifier zeros, |f - s| zeros, hinge boundaries, |w~| zeros), then
// compares the analytic batch gradients against central finite differences
// of the batch loss, parameter by parameter. Relative error uses a small
// magnitude floor so near-zero gradients compare absolutely.
GradCheckReport run_gradcheck(const GradCheckOptions& options);

}  // namespace dcepcc

#include "dcepcc/gradcheck.hpp"

#include <cmath>
#include <stdexcept>

#include "dcepcc/model.hpp"
#include "dcepcc/rng.hpp"
#include "dcepcc/training.hpp"

namespace dcepcc {

namespace {

constexpr double kKinkMargin = 1e-3;

struct Problem {
  FeatureNet net;
  ConicHead head;
  std::vector<std::vector<double>> xs;
  std::vector<int> ys;
  TrainConfig cfg;
};

Problem generate_problem(int feature_dim, int classes, std::uint64_t seed) {
  Problem p;
  p.cfg.lambda = 0.1;
  p.cfg.eta = 0.7;
  p.cfg.kappa = 0.4;
  p.cfg.margin_delta = 1.0;

  Rng rng(seed);
  p.net = make_feature_net({3, 5, feature_dim}, rng.next_u64());

  const int samples = 5;
  p.xs.assign(samples, std::vector<double>(3, 0.0));
  p.ys.resize(samples);
  for (int i = 0; i < samples; ++i) {
    for (double& v : p.xs[i]) v = rng.uniform(-1.0, 1.0);
    p.ys[i] = i % classes;
  }

  p.head.shared_vertex = false;
  p.head.b.assign(classes, 0.0);
  p.head.w_tilde.assign(classes, std::vector<double>(feature_dim, 0.0));
  p.head.gamma_tilde.assign(classes, std::vector<double>(feature_dim, 0.0));
  p.head.centers.assign(classes, std::vector<double>(feature_dim, 0.0));
  for (int c = 0; c < classes; ++c) {
    p.head.b[c] = rng.uniform(0.5, 1.5);
    for (int m = 0; m < feature_dim; ++m) {
      const double mag = rng.uniform(0.05, 0.5);  // keeps |w~| off its kink
      p.head.w_tilde[c][m] = rng.uniform() < 0.5 ? mag : -mag;
      p.head.gamma_tilde[c][m] = rng.uniform(-1.5, -0.6);
      p.head.centers[c][m] = rng.uniform(-0.5, 0.5);
    }
  }
  return p;
}

bool away_from_kinks(const Problem& p) {
  const int classes = p.head.num_classes();
  const int dim = p.head.feature_dim();
  ForwardCache cache;
  for (std::size_t i = 0; i < p.xs.size(); ++i) {
    const std::vector<double> f = net_forward(p.net, p.xs[i], &cache);
    for (int l = 0; l + 1 < p.net.num_layers(); ++l) {
      for (double z : cache.preacts[l]) {
        if (std::abs(z) <= kKinkMargin) return false;
      }
    }
    for (int c = 0; c < classes; ++c) {
      for (int m = 0; m < dim; ++m) {
        if (std::abs(f[m] - p.head.centers[c][m]) <= kKinkMargin) return false;
      }
    }
    const std::vector<double> g = head_scores(p.head, f);
    const int y = p.ys[i];
    for (int j = 0; j < classes; ++j) {
      if (j == y) continue;
      if (std::abs(p.cfg.margin_delta - (g[y] - g[j])) <= kKinkMargin) return false;
    }
  }
  for (int c = 0; c < classes; ++c) {
    for (int m = 0; m < dim; ++m) {
      const double slack = -p.head.gamma_tilde[c][m] - std::abs(p.head.w_tilde[c][m]);
      if (std::abs(p.cfg.kappa - slack) <= kKinkMargin) return false;
    }
  }
  return true;
}

double batch_loss(const Problem& p) {
  return loss_and_gradients(p.xs, p.ys, p.net, p.head, p.cfg).loss.total;
}

double rel_error(double analytic, double numeric) {
  const double denom = std::max({std::abs(analytic), std::abs(numeric), kKinkMargin});
  return std::abs(analytic - numeric) / denom;
}

// Central difference through a mutable view of one parameter.
double central_diff(Problem& p, double* param, double eps) {
  const double saved = *param;
  *param = saved + eps;
  const double hi = batch_loss(p);
  *param = saved - eps;
  const double lo = batch_loss(p);
  *param = saved;
  return (hi - lo) / (2.0 * eps);
}

void track(GradCheckReport& report, std::size_t group, double analytic, double numeric) {
  const double err = rel_error(analytic, numeric);
  if (err > report.groups[group].max_rel_error) report.groups[group].max_rel_error = err;
}

}  // namespace

GradCheckReport run_gradcheck(const GradCheckOptions& options) {
  if (options.feature_dims.empty() || options.class_counts.empty()) {
    throw std::invalid_argument("run_gradcheck: empty problem grid");
  }
  GradCheckReport report;
  report.groups = {{"net_weights", 0.0},
                   {"net_biases", 0.0},
                   {"head_w_tilde", 0.0},
                   {"head_gamma_tilde", 0.0},
                   {"head_b", 0.0}};

  for (int dim : options.feature_dims) {
    for (int classes : options.class_counts) {
      Problem p;
      bool found = false;
      for (int attempt = 0; attempt < 1000; ++attempt) {
        const std::uint64_t seed =
            Rng::mix(options.seed, (static_cast<std::uint64_t>(dim) << 20) ^
                                       (static_cast<std::uint64_t>(classes) << 10) ^
                                       static_cast<std::uint64_t>(attempt));
        p = generate_problem(dim, classes, seed);
        if (away_from_kinks(p)) {
          found = true;
          break;
        }
      }
      if (!found) {
        throw std::runtime_error("run_gradcheck: could not sample a kink-free problem");
      }

      ModelGrads analytic = loss_and_gradients(p.xs, p.ys, p.net, p.head, p.cfg).grads;
      if (options.corrupt) analytic.head.w_tilde[0][0] += 1e-2;

      for (int l = 0; l < p.net.num_layers(); ++l) {
        for (std::size_t k = 0; k < p.net.weights[l].data.size(); ++k) {
          const double fd = central_diff(p, &p.net.weights[l].data[k], options.epsilon);
          track(report, 0, analytic.net.weights[l].data[k], fd);
        }
        for (std::size_t k = 0; k < p.net.biases[l].size(); ++k) {
          const double fd = central_diff(p, &p.net.biases[l][k], options.epsilon);
          track(report, 1, analytic.net.biases[l][k], fd);
        }
      }
      for (int c = 0; c < p.head.num_classes(); ++c) {
        for (int m = 0; m < p.head.feature_dim(); ++m) {
          double fd = central_diff(p, &p.head.w_tilde[c][m], options.epsilon);
          track(report, 2, analytic.head.w_tilde[c][m], fd);
          fd = central_diff(p, &p.head.gamma_tilde[c][m], options.epsilon);
          track(report, 3, analytic.head.gamma_tilde[c][m], fd);
        }
        const double fd = central_diff(p, &p.head.b[c], options.epsilon);
        track(report, 4, analytic.head.b[c], fd);
      }
    }
  }

  for (const GradCheckGroup& g : report.groups) {
    report.max_rel_error = std::max(report.max_rel_error, g.max_rel_error);
  }
  report.passed = report.max_rel_error < options.tolerance;
  return report;
}

}  // namespace dcepcc

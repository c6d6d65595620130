#pragma once

#include <optional>

#include "qphase/model.hpp"
#include "qphase/randomness.hpp"

namespace qphase {

/// Frequentist comparator: spectral initialization followed by thresholded
/// Wirtinger flow. Labelled `twf-baseline` in every output.
struct BaselineConfig {
  long n_iter = 5000;
  std::optional<double> step;               // default 0.1 / mean(y)
  std::optional<Eigen::Index> sparsity_k;   // default s* when known, else ceil(p/10)
  int max_step_halvings = 10;
};

struct SpectralInit {
  Vector theta;
  bool fell_back = false; // power iteration stagnated; a random direction was used
  int iterations = 0;
};

/// Leading eigenvector of (1/m) sum_j y_j A_j A_j^T by power iteration
/// (100 steps, tolerance 1e-8), scaled so |theta|^2 = max(mean(y), 0).
SpectralInit spectral_init(const ProblemInstance& inst, Rng& rng);

/// Keeps the k largest-magnitude entries; ties go to the lower index.
Vector hard_threshold(const Vector& v, Eigen::Index k);

struct BaselineResult {
  Vector theta;
  double step = 0.0;         // step actually used after any backoff
  Eigen::Index k = 0;
  bool oracle_k = false;     // k was taken from the known s*
  int halvings = 0;
  bool init_fell_back = false;
};

/// theta <- H_k(theta - step * grad r(theta)) for n_iter steps from `start`.
/// Throws DivergenceError on a non-finite iterate.
Vector thresholded_wf_iterate(const ProblemInstance& inst, const Vector& start, double step,
                              Eigen::Index k, long n_iter);

/// Full baseline: spectral init, then thresholded Wirtinger flow with the
/// step halved and the run restarted on divergence (up to max_step_halvings).
BaselineResult thresholded_wf_run(const ProblemInstance& inst, const BaselineConfig& cfg,
                                  Rng& rng);

} // namespace qphase

#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "qphase/model.hpp"
#include "qphase/randomness.hpp"

namespace qphase {

/// min(|theta_hat - theta*|^2, |theta_hat + theta*|^2) / (p |theta*|^2).
/// Throws DomainError when theta* = 0 or the lengths differ.
double mre(const Vector& theta_hat, const Vector& theta_star);

enum class Method { Lmc, Mala, TwfBaseline };
enum class Factor { SampleSize, Noise, Sparsity, Varsigma, Lambda };

std::string to_string(Method method);
std::string to_string(Factor factor);
Method parse_method(const std::string& name);
/// Accepts both `sample-size` and `sample_size` spellings.
Factor parse_factor(const std::string& name);

/// Shared settings for running the estimators on one instance.
struct MethodSettings {
  long sampler_iters = 30000;
  long burn_in = 1000;
  long baseline_iters = 5000;
  double lambda = 1.0;
  double varsigma = 0.1;
  std::uint64_t seed = kDefaultSeed;
  std::uint64_t stream = 0;
  int max_step_halvings = 10; // LMC restarts with a halved step on divergence
};

struct MethodOutcome {
  Method method = Method::Lmc;
  Vector estimate;             // empty when diverged
  bool diverged = false;
  double runtime_seconds = 0.0;
  std::optional<double> acceptance_rate; // MALA only
  std::optional<double> gamma;           // sampler step, or baseline step
  int step_halvings = 0;                 // LMC and baseline divergence backoff
  std::optional<double> lambda;          // samplers only
  std::optional<double> varsigma;        // samplers only
};

/// Runs the requested estimators from a shared spectral initialization.
/// MALA runs first and LMC uses half of its tuned step; without MALA, LMC
/// falls back to default_lmc_step. A diverging LMC run is restarted with the
/// step halved, up to max_step_halvings times, before it is reported diverged.
/// The baseline uses k = s* when the instance records it. Outcomes come back in `methods` order.
std::vector<MethodOutcome> run_methods(const ProblemInstance& inst,
                                       const std::vector<Method>& methods,
                                       const MethodSettings& settings);

/// Parameters held fixed while one factor varies. `lambda_rule` is either a
/// literal or "<k>m"; for the lambda factor each level is the multiple of m.
struct FixedParams {
  Eigen::Index m = 500;
  Eigen::Index p = 100;
  Eigen::Index s_star = 10;
  double sigma = 1.0;
  double varsigma = 0.1;
  std::string lambda_rule = "4m";
};

struct SweepSpec {
  Factor factor = Factor::SampleSize;
  std::vector<double> levels;
  FixedParams fixed;
  int n_reps = 10;
  std::vector<Method> methods{Method::Lmc, Method::Mala, Method::TwfBaseline};
  std::uint64_t seed = kDefaultSeed;
  long sampler_iters = 3000;
  long burn_in = 1000;
  long baseline_iters = 5000;
  unsigned threads = 0; // 0 = QPHASE_THREADS or hardware concurrency
};

void validate(const SweepSpec& spec);

/// The standard sweep designs. `paper_scale` switches to 100 replications and
/// 30000 sampler iterations; otherwise 10 x 3000.
SweepSpec preset(const std::string& name, bool paper_scale = false);

struct SweepRecord {
  double level = 0.0;
  int rep = 0;
  Method method = Method::Lmc;
  double mre = 0.0; // +inf when diverged
  double runtime_seconds = 0.0;
  std::optional<double> acceptance_rate;
  std::optional<double> lambda;   // absent for the baseline
  std::optional<double> varsigma; // absent for the baseline
  bool diverged = false;
};

struct SweepResult {
  Factor factor = Factor::SampleSize;
  std::vector<SweepRecord> records; // ordered by (level, rep, method)
};

/// Runs every (level, replication, method) cell. Data for replication r comes
/// from stream r of the master seed, so results do not depend on scheduling.
SweepResult run_sweep(const SweepSpec& spec);

/// Worker count: explicit value, else QPHASE_THREADS, else hardware concurrency.
unsigned resolve_threads(unsigned requested);

struct FiveNumber {
  double level = 0.0;
  Method method = Method::Lmc;
  double min = 0.0, q25 = 0.0, median = 0.0, q75 = 0.0, max = 0.0;
  int n = 0;
  int n_diverged = 0;
};

/// Quantile by linear interpolation between order statistics of sorted data;
/// NaN for empty input.
double quantile(const std::vector<double>& sorted, double q);

/// Five-number summaries per (level, method), sorted by level then method.
/// `n` counts finite records; diverged ones go to `n_diverged` and are
/// excluded from the quantiles (NaN when a group has no finite record).
std::vector<FiveNumber> summarize(const SweepResult& result);

/// Median mre per level for one method, in level order (NaN when no finite record).
std::vector<double> median_by_level(const std::vector<FiveNumber>& summary, Method method);

/// Tidy CSV with header
/// factor,level,rep,method,mre,runtime_s,acceptance_rate,lambda,varsigma,diverged.
/// Runtimes are written only when `with_runtime` is set, keeping default output reproducible.
void write_sweep_csv(const std::filesystem::path& path, const SweepResult& result,
                     bool with_runtime = false);

/// Grouped boxplots (one group per level, one box per method) as an SVG string.
std::string render_boxplots(const std::vector<FiveNumber>& summary, const std::string& x_label);
void render_boxplots(const std::vector<FiveNumber>& summary, const std::string& x_label,
                     const std::filesystem::path& out_path);

} // namespace qphase

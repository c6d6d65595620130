#include "qphase/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <map>
#include <thread>

#include <fmt/format.h>

#include "qphase/baseline.hpp"
#include "qphase/errors.hpp"
#include "qphase/instance_io.hpp"
#include "qphase/posterior.hpp"
#include "qphase/samplers.hpp"

namespace qphase {

double mre(const Vector& theta_hat, const Vector& theta_star) {
  if (theta_hat.size() != theta_star.size())
    throw DomainError("mre: dimension mismatch");
  const double norm2 = theta_star.squaredNorm();
  if (!(norm2 > 0.0))
    throw DomainError("mre: undefined for a zero ground truth");
  const double minus = (theta_hat - theta_star).squaredNorm();
  const double plus = (theta_hat + theta_star).squaredNorm();
  return std::min(minus, plus) / (static_cast<double>(theta_star.size()) * norm2);
}

std::string to_string(Method method) {
  switch (method) {
  case Method::Lmc:
    return "lmc";
  case Method::Mala:
    return "mala";
  case Method::TwfBaseline:
    return "twf-baseline";
  }
  return "?";
}

std::string to_string(Factor factor) {
  switch (factor) {
  case Factor::SampleSize:
    return "sample_size";
  case Factor::Noise:
    return "noise";
  case Factor::Sparsity:
    return "sparsity";
  case Factor::Varsigma:
    return "varsigma";
  case Factor::Lambda:
    return "lambda";
  }
  return "?";
}

Method parse_method(const std::string& name) {
  if (name == "lmc")
    return Method::Lmc;
  if (name == "mala")
    return Method::Mala;
  if (name == "twf-baseline" || name == "twf")
    return Method::TwfBaseline;
  throw DomainError("unknown method '" + name + "' (expected lmc, mala or twf-baseline)");
}

Factor parse_factor(const std::string& name) {
  std::string key = name;
  std::replace(key.begin(), key.end(), '-', '_');
  for (Factor f : {Factor::SampleSize, Factor::Noise, Factor::Sparsity, Factor::Varsigma,
                   Factor::Lambda})
    if (to_string(f) == key)
      return f;
  throw DomainError("unknown sweep preset '" + name + "'");
}

void validate(const SweepSpec& spec) {
  if (spec.levels.empty())
    throw DomainError("sweep needs at least one level");
  for (std::size_t i = 1; i < spec.levels.size(); ++i)
    if (!(spec.levels[i] > spec.levels[i - 1]))
      throw DomainError("sweep levels must be strictly increasing");
  if (spec.n_reps < 1)
    throw DomainError("sweep needs at least one replication");
  if (spec.methods.empty())
    throw DomainError("sweep needs at least one method");
  if (spec.sampler_iters < 1 || spec.burn_in < 0 || spec.burn_in >= spec.sampler_iters)
    throw DomainError("sampler iterations must exceed the burn-in");
  if (spec.baseline_iters < 1)
    throw DomainError("baseline iterations must be at least 1");

  auto whole = [](double v) { return v >= 1.0 && v == std::floor(v); };
  for (double level : spec.levels) {
    bool ok = std::isfinite(level);
    switch (spec.factor) {
    case Factor::SampleSize:
      ok = ok && whole(level);
      break;
    case Factor::Sparsity:
      ok = ok && whole(level) && level <= static_cast<double>(spec.fixed.p);
      break;
    case Factor::Noise:
      ok = ok && level >= 0.0;
      break;
    case Factor::Varsigma:
    case Factor::Lambda:
      ok = ok && level > 0.0;
      break;
    }
    if (!ok)
      throw DomainError(fmt::format("level {} is not valid for factor {}", level,
                                    to_string(spec.factor)));
  }
}

SweepSpec preset(const std::string& name, bool paper_scale) {
  SweepSpec spec;
  spec.factor = parse_factor(name);
  FixedParams& f = spec.fixed;
  switch (spec.factor) {
  case Factor::SampleSize:
    spec.levels = {100, 200, 500, 1000, 2000};
    f.p = 100, f.s_star = 10, f.sigma = 1.0;
    break;
  case Factor::Noise:
    spec.levels = {0.5, 1, 2, 5, 10};
    f.m = 500, f.p = 100, f.s_star = 10;
    break;
  case Factor::Sparsity:
    spec.levels = {5, 20, 100, 250, 500};
    f.m = 1000, f.p = 500, f.sigma = 1.0;
    break;
  case Factor::Varsigma:
    spec.levels = {0.0001, 0.01, 0.1, 1, 10};
    f.m = 200, f.p = 100, f.s_star = 10, f.sigma = 1.0;
    spec.methods = {Method::Lmc, Method::Mala};
    break;
  case Factor::Lambda:
    // multiples of m: m/25, 2m/25, 4m, 100m, 400m
    spec.levels = {0.04, 0.08, 4, 100, 400};
    f.m = 50, f.p = 100, f.s_star = 10, f.sigma = 1.0, f.varsigma = 0.1;
    spec.methods = {Method::Lmc, Method::Mala};
    break;
  }
  if (paper_scale) {
    spec.n_reps = 100;
    spec.sampler_iters = 30000;
  }
  return spec;
}

unsigned resolve_threads(unsigned requested) {
  if (requested > 0)
    return requested;
  if (const char* env = std::getenv("QPHASE_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v > 0)
      return static_cast<unsigned>(v);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

namespace {

struct CellParams {
  Eigen::Index m, p, s_star;
  double sigma, varsigma, lambda;
};

CellParams resolve_cell(const SweepSpec& spec, double level) {
  const FixedParams& f = spec.fixed;
  CellParams c{f.m, f.p, f.s_star, f.sigma, f.varsigma, 0.0};
  switch (spec.factor) {
  case Factor::SampleSize:
    c.m = static_cast<Eigen::Index>(std::llround(level));
    break;
  case Factor::Noise:
    c.sigma = level;
    break;
  case Factor::Sparsity:
    c.s_star = static_cast<Eigen::Index>(std::llround(level));
    break;
  case Factor::Varsigma:
    c.varsigma = level;
    break;
  case Factor::Lambda:
    break;
  }
  c.lambda = spec.factor == Factor::Lambda ? level * static_cast<double>(c.m)
                                           : resolve_lambda(f.lambda_rule, c.m);
  return c;
}

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

std::vector<SweepRecord> run_cell(const SweepSpec& spec, double level, int rep) {
  const CellParams c = resolve_cell(spec, level);
  const auto stream = static_cast<std::uint64_t>(rep);

  Rng data(spec.seed, stream);
  const Vector theta_star = generate_signal(data, c.p, c.s_star);
  const ProblemInstance inst = generate_instance(data, theta_star, c.m, c.sigma);

  MethodSettings settings;
  settings.sampler_iters = spec.sampler_iters;
  settings.burn_in = spec.burn_in;
  settings.baseline_iters = spec.baseline_iters;
  settings.lambda = c.lambda;
  settings.varsigma = c.varsigma;
  settings.seed = spec.seed;
  settings.stream = stream;

  std::vector<SweepRecord> out;
  for (const auto& o : run_methods(inst, spec.methods, settings)) {
    SweepRecord r;
    r.level = level;
    r.rep = rep;
    r.method = o.method;
    r.diverged = o.diverged;
    r.mre = o.diverged ? std::numeric_limits<double>::infinity() : mre(o.estimate, theta_star);
    r.runtime_seconds = o.runtime_seconds;
    r.acceptance_rate = o.acceptance_rate;
    r.lambda = o.lambda;
    r.varsigma = o.varsigma;
    out.push_back(r);
  }
  return out;
}

} // namespace

std::vector<MethodOutcome> run_methods(const ProblemInstance& inst,
                                       const std::vector<Method>& methods,
                                       const MethodSettings& settings) {
  Rng init_rng(derive_seed(settings.seed, "init"), settings.stream);
  const Vector theta0 = spectral_init(inst, init_rng).theta;

  const PriorConfig prior{settings.varsigma, std::numeric_limits<double>::infinity()};
  SamplerConfig base;
  base.lambda = settings.lambda;
  base.n_iter = settings.sampler_iters;
  base.burn_in = settings.burn_in;
  base.stream_id = settings.stream;
  base.store_samples = false;

  auto wants = [&](Method m) { return std::find(methods.begin(), methods.end(), m) != methods.end(); };
  auto sampler_outcome = [&](Method method) {
    MethodOutcome o;
    o.method = method;
    o.lambda = settings.lambda;
    o.varsigma = settings.varsigma;
    return o;
  };

  std::map<Method, MethodOutcome> done;
  // MALA goes first: its tuned step sets the LMC step.
  std::optional<double> mala_gamma;
  if (wants(Method::Mala)) {
    MethodOutcome o = sampler_outcome(Method::Mala);
    SamplerConfig cfg = base;
    cfg.seed = derive_seed(settings.seed, "mala");
    cfg.gamma = default_mala_step(inst, prior, settings.lambda);
    const auto start = std::chrono::steady_clock::now();
    try {
      const Chain chain = mala_run(inst, prior, cfg, theta0);
      o.estimate = estimate(chain);
      o.acceptance_rate = chain.acceptance_rate;
      o.gamma = chain.final_gamma;
      mala_gamma = chain.final_gamma;
    } catch (const DivergenceError&) {
      o.diverged = true;
    }
    o.runtime_seconds = seconds_since(start);
    done[Method::Mala] = o;
  }
  if (wants(Method::Lmc)) {
    MethodOutcome o = sampler_outcome(Method::Lmc);
    SamplerConfig cfg = base;
    cfg.seed = derive_seed(settings.seed, "lmc");
    cfg.gamma = mala_gamma ? 0.5 * *mala_gamma : default_lmc_step(inst, settings.lambda);
    const auto start = std::chrono::steady_clock::now();
    for (int attempt = 0;; ++attempt) {
      try {
        o.estimate = estimate(lmc_run(inst, prior, cfg, theta0));
        o.step_halvings = attempt;
        break;
      } catch (const DivergenceError&) {
        if (attempt >= settings.max_step_halvings) {
          o.diverged = true;
          o.step_halvings = attempt;
          break;
        }
        cfg.gamma *= 0.5;
      }
    }
    o.gamma = cfg.gamma;
    o.runtime_seconds = seconds_since(start);
    done[Method::Lmc] = o;
  }
  if (wants(Method::TwfBaseline)) {
    MethodOutcome o;
    o.method = Method::TwfBaseline;
    BaselineConfig cfg;
    cfg.n_iter = settings.baseline_iters;
    Rng rng(derive_seed(settings.seed, "twf-baseline"), settings.stream);
    const auto start = std::chrono::steady_clock::now();
    try {
      const BaselineResult b = thresholded_wf_run(inst, cfg, rng);
      o.estimate = b.theta;
      o.gamma = b.step;
      o.step_halvings = b.halvings;
    } catch (const DivergenceError&) {
      o.diverged = true;
    }
    o.runtime_seconds = seconds_since(start);
    done[Method::TwfBaseline] = o;
  }

  std::vector<MethodOutcome> out;
  for (Method m : methods)
    out.push_back(done.at(m));
  return out;
}

SweepResult run_sweep(const SweepSpec& spec) {
  validate(spec);
  const std::size_t n_levels = spec.levels.size();
  const auto n_reps = static_cast<std::size_t>(spec.n_reps);
  const std::size_t n_cells = n_levels * n_reps;
  // Reject impossible cells before any work starts.
  for (double level : spec.levels) {
    const CellParams c = resolve_cell(spec, level);
    if (c.m < 1 || c.p < 1 || c.s_star < 1 || c.s_star > c.p || c.sigma < 0.0 ||
        !(c.varsigma > 0.0))
      throw DomainError("sweep level " + format_real(level) + " gives invalid parameters");
  }

  std::vector<std::vector<SweepRecord>> cells(n_cells);
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::atomic<bool> failed{false};

  auto worker = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= n_cells || failed.load())
        return;
      try {
        cells[i] = run_cell(spec, spec.levels[i / n_reps], static_cast<int>(i % n_reps));
      } catch (...) {
        if (!failed.exchange(true))
          failure = std::current_exception();
        return;
      }
    }
  };

  const unsigned n_threads =
      std::min<unsigned>(resolve_threads(spec.threads), static_cast<unsigned>(n_cells));
  if (n_threads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < n_threads; ++t)
      pool.emplace_back(worker);
  }
  if (failure)
    std::rethrow_exception(failure);

  SweepResult result;
  result.factor = spec.factor;
  for (auto& cell : cells)
    for (auto& r : cell)
      result.records.push_back(std::move(r));
  return result;
}

double quantile(const std::vector<double>& sorted, double q) {
  if (sorted.empty())
    return std::numeric_limits<double>::quiet_NaN();
  const double h = q * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

std::vector<FiveNumber> summarize(const SweepResult& result) {
  if (result.records.empty())
    throw DomainError("summarize: no records");
  std::vector<std::pair<double, Method>> keys;
  std::map<std::pair<double, Method>, std::vector<double>> values;
  std::map<std::pair<double, Method>, int> diverged;
  for (const auto& r : result.records) {
    const auto key = std::make_pair(r.level, r.method);
    if (!values.count(key))
      keys.push_back(key);
    auto& bucket = values[key];
    if (r.diverged || !std::isfinite(r.mre))
      ++diverged[key];
    else
      bucket.push_back(r.mre);
  }

  std::sort(keys.begin(), keys.end());
  std::vector<FiveNumber> summary;
  for (const auto& key : keys) {
    auto sorted = values[key];
    std::sort(sorted.begin(), sorted.end());
    FiveNumber f;
    f.level = key.first;
    f.method = key.second;
    f.n = static_cast<int>(sorted.size());
    f.n_diverged = diverged[key];
    if (sorted.empty()) {
      f.min = f.q25 = f.median = f.q75 = f.max = std::numeric_limits<double>::quiet_NaN();
    } else {
      f.min = quantile(sorted, 0.0);
      f.q25 = quantile(sorted, 0.25);
      f.median = quantile(sorted, 0.5);
      f.q75 = quantile(sorted, 0.75);
      f.max = quantile(sorted, 1.0);
    }
    summary.push_back(f);
  }
  return summary;
}

std::vector<double> median_by_level(const std::vector<FiveNumber>& summary, Method method) {
  std::vector<std::pair<double, double>> rows;
  for (const auto& f : summary)
    if (f.method == method)
      rows.emplace_back(f.level, f.median);
  std::sort(rows.begin(), rows.end());
  std::vector<double> out;
  for (const auto& [level, median] : rows)
    out.push_back(median);
  return out;
}

void write_sweep_csv(const std::filesystem::path& path, const SweepResult& result,
                     bool with_runtime) {
  std::ofstream out(path, std::ios::binary);
  if (!out)
    throw IoError("cannot open '" + path.string() + "' for writing");
  out << "factor,level,rep,method,mre,runtime_s,acceptance_rate,lambda,varsigma,diverged\n";
  const std::string factor = to_string(result.factor);
  auto opt = [](const std::optional<double>& v) { return v ? format_real(*v) : std::string(); };
  for (const auto& r : result.records) {
    out << factor << ',' << format_real(r.level) << ',' << r.rep << ',' << to_string(r.method)
        << ',' << format_real(r.mre) << ','
        << (with_runtime ? format_real(r.runtime_seconds) : std::string()) << ','
        << opt(r.acceptance_rate) << ',' << opt(r.lambda) << ',' << opt(r.varsigma) << ','
        << (r.diverged ? 1 : 0) << '\n';
  }
  out.flush();
  if (!out)
    throw IoError("failed writing '" + path.string() + "'");
}

} // namespace qphase

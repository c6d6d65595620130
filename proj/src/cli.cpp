#include "qphase/cli.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <sstream>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "qphase/baseline.hpp"
#include "qphase/errors.hpp"
#include "qphase/experiments.hpp"
#include "qphase/imaging.hpp"
#include "qphase/instance_io.hpp"
#include "qphase/posterior.hpp"
#include "qphase/samplers.hpp"
#include "qphase/theory.hpp"

namespace qphase::cli {

namespace fs = std::filesystem;

std::vector<std::string> layer_config(const std::vector<std::string>& args) {
  std::vector<std::string> rest;
  std::string config_path;
  for (std::size_t i = 0; i < args.size(); ++i) {
    const std::string& a = args[i];
    if (a == "--config") {
      if (i + 1 >= args.size())
        throw DomainError("--config needs a file argument");
      config_path = args[++i];
    } else if (a.rfind("--config=", 0) == 0) {
      config_path = a.substr(9);
    } else {
      rest.push_back(a);
    }
  }
  if (config_path.empty())
    return rest;

  std::vector<std::string> layered;
  for (const auto& [key, value] : read_key_values(config_path)) {
    std::string flag = key;
    std::replace(flag.begin(), flag.end(), '_', '-');
    layered.push_back("--" + flag + "=" + value);
  }
  // rest[0] is the program name; the first non-flag after it is the subcommand.
  std::size_t insert_at = rest.size();
  for (std::size_t i = 1; i < rest.size(); ++i)
    if (rest[i].rfind("-", 0) != 0) {
      insert_at = i + 1;
      break;
    }
  rest.insert(rest.begin() + static_cast<std::ptrdiff_t>(insert_at), layered.begin(),
              layered.end());
  return rest;
}

namespace {

enum class LogLevel { Quiet, Info, Debug };

struct Logger {
  std::ostream& err;
  LogLevel level = LogLevel::Info;

  template <class... Args>
  void info(fmt::format_string<Args...> f, Args&&... args) const {
    if (level != LogLevel::Quiet)
      err << "[qphase] " << fmt::format(f, std::forward<Args>(args)...) << '\n';
  }
  template <class... Args>
  void warn(fmt::format_string<Args...> f, Args&&... args) const {
    err << "[qphase] warning: " << fmt::format(f, std::forward<Args>(args)...) << '\n';
  }
};

double parse_real_or_inf(const std::string& s, const char* what) {
  if (s == "inf" || s == "Inf" || s == "infinity")
    return std::numeric_limits<double>::infinity();
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (s.empty() || end != s.c_str() + s.size())
    throw DomainError(fmt::format("cannot parse {} '{}'", what, s));
  return v;
}

std::optional<double> parse_auto_real(const std::string& s, const char* what) {
  if (s == "auto")
    return std::nullopt;
  return parse_real_or_inf(s, what);
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ','))
    if (!item.empty())
      out.push_back(item);
  return out;
}

std::vector<Method> parse_methods(const std::string& s) {
  std::vector<Method> out;
  for (const auto& name : split_list(s)) {
    const Method m = parse_method(name);
    if (std::find(out.begin(), out.end(), m) == out.end())
      out.push_back(m);
  }
  return out;
}

void ensure_parent(const fs::path& path) {
  if (path.has_parent_path()) {
    std::error_code ec;
    fs::create_directories(path.parent_path(), ec);
    if (ec)
      throw IoError("cannot create directory '" + path.parent_path().string() + "'");
  }
}

// ---- generate ---------------------------------------------------------------

struct GenerateArgs {
  long p = 100;
  long s_star = 10;
  long m = 500;
  double sigma = 1.0;
  std::uint64_t seed = kDefaultSeed;
  std::string out;
};

void add_generate(CLI::App& app, GenerateArgs& a) {
  app.add_option("--p", a.p, "signal dimension")->capture_default_str();
  app.add_option("--s-star", a.s_star, "number of nonzero entries")->capture_default_str();
  app.add_option("--m", a.m, "number of measurements")->capture_default_str();
  app.add_option("--sigma", a.sigma, "noise standard deviation")->capture_default_str();
  app.add_option("--seed", a.seed, "random seed")->capture_default_str();
  app.add_option("--out", a.out, "output directory")->required();
}

int run_generate(const GenerateArgs& a, std::ostream& out, const Logger&) {
  Rng rng(a.seed, 0);
  const Vector theta_star = generate_signal(rng, a.p, a.s_star);
  const ProblemInstance inst = generate_instance(rng, theta_star, a.m, a.sigma);
  save_instance(a.out, inst, a.seed);
  out << fmt::format("wrote instance m={} p={} s_star={} sigma={} to {}\n", inst.m(), inst.p(),
                     *inst.s_star, format_real(a.sigma), a.out);
  return kOk;
}

// ---- sample -----------------------------------------------------------------

struct SampleArgs {
  std::string method = "mala";
  std::string lambda = "4m";
  double varsigma = 0.1;
  std::string h1 = "inf";
  std::string gamma = "auto";
  long iters = 30000;
  long burn_in = 1000;
  long thin = 1;
  double target_acceptance = 0.5;
  std::string init = "zero";
  std::uint64_t seed = kDefaultSeed;
  std::string in;
  std::string out = "chain.csv";
};

void add_sample(CLI::App& app, SampleArgs& a) {
  app.add_option("--method", a.method, "lmc or mala")
      ->check(CLI::IsMember({"lmc", "mala"}))
      ->capture_default_str();
  app.add_option("--lambda", a.lambda, "inverse temperature, a number or '<k>m'")
      ->capture_default_str();
  app.add_option("--varsigma", a.varsigma, "prior scale")->capture_default_str();
  app.add_option("--h1", a.h1, "prior support radius (number or inf)")->capture_default_str();
  app.add_option("--gamma", a.gamma, "step size or 'auto'")->capture_default_str();
  app.add_option("--iters", a.iters, "total iterations")->capture_default_str();
  app.add_option("--burn-in", a.burn_in, "discarded initial iterations")->capture_default_str();
  app.add_option("--thin", a.thin, "keep every k-th post burn-in sample")->capture_default_str();
  app.add_option("--target-acceptance", a.target_acceptance, "MALA adaptation target")
      ->capture_default_str();
  app.add_option("--init", a.init, "initial point: zero or spectral")
      ->check(CLI::IsMember({"zero", "spectral"}))
      ->capture_default_str();
  app.add_option("--seed", a.seed, "random seed")->capture_default_str();
  app.add_option("--in", a.in, "instance directory")->required();
  app.add_option("--out", a.out, "chain CSV path")->capture_default_str();
}

int run_sample(const SampleArgs& a, std::ostream& out, const Logger& log) {
  const ProblemInstance inst = load_instance(a.in);
  const PriorConfig prior{a.varsigma, parse_real_or_inf(a.h1, "h1")};
  validate(prior);

  SamplerConfig cfg;
  cfg.lambda = resolve_lambda(a.lambda, inst.m());
  cfg.n_iter = a.iters;
  cfg.burn_in = a.burn_in;
  cfg.thin = a.thin;
  cfg.target_acceptance = a.target_acceptance;
  cfg.seed = a.seed;
  const bool mala = a.method == "mala";
  const auto gamma = parse_auto_real(a.gamma, "gamma");
  cfg.gamma = gamma ? *gamma
                    : (mala ? default_mala_step(inst, prior, cfg.lambda)
                            : default_lmc_step(inst, cfg.lambda));

  Vector theta0 = Vector::Zero(inst.p());
  if (a.init == "spectral") {
    Rng init_rng(derive_seed(a.seed, "init"), 0);
    const SpectralInit init = spectral_init(inst, init_rng);
    if (init.fell_back)
      log.warn("spectral initialization stagnated; using a random direction");
    theta0 = init.theta;
    if (!in_support(prior, theta0))
      theta0 *= 0.5 * prior.h1 / theta0.norm();
  }
  log.info("resolved lambda={} gamma={}", format_real(cfg.lambda), format_real(cfg.gamma));

  const Chain chain = mala ? mala_run(inst, prior, cfg, theta0) : lmc_run(inst, prior, cfg, theta0);

  if (chain.tuning_warning)
    log.warn("{}", *chain.tuning_warning);

  const fs::path out_path(a.out);
  ensure_parent(out_path);
  std::vector<Vector> rows = chain.samples;
  rows.push_back(chain.posterior_mean);
  write_rows_csv(out_path, rows);

  KeyValues meta{{"method", a.method},
                 {"lambda", format_real(cfg.lambda)},
                 {"varsigma", format_real(prior.varsigma)},
                 {"h1", format_real(prior.h1)},
                 {"initial_gamma", format_real(cfg.gamma)},
                 {"final_gamma", format_real(chain.final_gamma)},
                 {"acceptance_rate", format_real(chain.acceptance_rate)},
                 {"iters", std::to_string(cfg.n_iter)},
                 {"burn_in", std::to_string(cfg.burn_in)},
                 {"thin", std::to_string(cfg.thin)},
                 {"n_samples", std::to_string(chain.samples.size())},
                 {"posterior_mean_row", std::to_string(chain.samples.size() + 1)},
                 {"seed", std::to_string(a.seed)}};
  if (inst.theta_star)
    meta["mre"] = format_real(mre(chain.posterior_mean, *inst.theta_star));
  write_key_values(out_path.string() + ".meta", meta);

  out << fmt::format("{}: {} samples, acceptance {:.3f}, final gamma {}", a.method,
                     chain.samples.size(), chain.acceptance_rate, format_real(chain.final_gamma));
  if (inst.theta_star)
    out << ", mre " << meta["mre"];
  out << '\n';
  return kOk;
}

// ---- baseline ---------------------------------------------------------------

struct BaselineArgs {
  long iters = 5000;
  std::string k = "auto";
  std::string step = "auto";
  std::uint64_t seed = kDefaultSeed;
  std::string in;
  std::string out = "theta.csv";
};

void add_baseline(CLI::App& app, BaselineArgs& a) {
  app.add_option("--iters", a.iters, "iterations")->capture_default_str();
  app.add_option("--k", a.k, "hard-threshold level or 'auto'")->capture_default_str();
  app.add_option("--step", a.step, "step size or 'auto'")->capture_default_str();
  app.add_option("--seed", a.seed, "seed for the initialization fallback")->capture_default_str();
  app.add_option("--in", a.in, "instance directory")->required();
  app.add_option("--out", a.out, "estimate CSV path")->capture_default_str();
}

int run_baseline(const BaselineArgs& a, std::ostream& out, const Logger& log) {
  const ProblemInstance inst = load_instance(a.in);
  BaselineConfig cfg;
  cfg.n_iter = a.iters;
  cfg.step = parse_auto_real(a.step, "step");
  if (a.k != "auto") {
    const double k = parse_real_or_inf(a.k, "k");
    if (k != std::floor(k))
      throw DomainError("--k must be an integer");
    cfg.sparsity_k = static_cast<Eigen::Index>(k);
  }
  Rng rng(derive_seed(a.seed, "twf-baseline"), 0);
  const BaselineResult result = thresholded_wf_run(inst, cfg, rng);
  if (result.init_fell_back)
    log.warn("spectral initialization stagnated; using a random direction");
  if (result.halvings > 0)
    log.warn("step halved {} time(s) after divergence", result.halvings);

  const fs::path out_path(a.out);
  ensure_parent(out_path);
  write_matrix_csv(out_path, result.theta);
  KeyValues meta{{"method", "twf-baseline"},
                 {"iters", std::to_string(cfg.n_iter)},
                 {"k", std::to_string(result.k)},
                 {"oracle_k", result.oracle_k ? "true" : "false"},
                 {"step", format_real(result.step)},
                 {"step_halvings", std::to_string(result.halvings)},
                 {"final_risk", format_real(empirical_risk(inst, result.theta))}};
  if (inst.theta_star)
    meta["mre"] = format_real(mre(result.theta, *inst.theta_star));
  write_key_values(out_path.string() + ".meta", meta);
  out << fmt::format("twf-baseline: k={}{} step={}", result.k, result.oracle_k ? " (oracle)" : "",
                     format_real(result.step));
  if (inst.theta_star)
    out << ", mre " << meta["mre"];
  out << '\n';
  return kOk;
}

// ---- theory -----------------------------------------------------------------

struct TheoryArgs {
  TheoryParams params;
  std::string h1 = "inf";
  std::string lambda;
  std::string csv;
};

void add_theory(CLI::App& app, TheoryArgs& a) {
  auto& p = a.params;
  app.add_option("--sigma", p.sigma, "noise scale")->capture_default_str();
  app.add_option("--xi", p.xi, "sub-exponential scale")->capture_default_str();
  app.add_option("--c", p.c_bound, "design bound C")->capture_default_str();
  app.add_option("--kappa0", p.kappa0, "anti-concentration constant")->capture_default_str();
  app.add_option("--m", p.m, "number of measurements")->capture_default_str();
  app.add_option("--p", p.p, "dimension")->capture_default_str();
  app.add_option("--s-star", p.s_star, "sparsity")->capture_default_str();
  app.add_option("--delta", p.delta, "confidence level parameter")->capture_default_str();
  app.add_option("--frak-c", p.frak_c, "universal constant of the rate")->capture_default_str();
  app.add_option("--h1", a.h1, "prior support radius (number or inf)")->capture_default_str();
  app.add_option("--lambda", a.lambda, "evaluate alpha/beta here instead of at lambda*");
  app.add_option("--csv", a.csv, "also write the values as a CSV row");
}

int run_theory(TheoryArgs a, std::ostream& out, const Logger&) {
  a.params.h1 = parse_real_or_inf(a.h1, "h1");
  const TheoryParams& p = a.params;
  const TheoryConstants k = constants(p);
  const double lambda = a.lambda.empty() ? k.lambda_star : resolve_lambda(a.lambda, p.m);
  const AlphaBeta ab = alpha_beta(p, lambda);

  std::vector<std::pair<std::string, double>> rows{
      {"C1", k.c1},
      {"C2", k.c2},
      {"lambda_star", k.lambda_star},
      {"varsigma_star", k.varsigma_star},
      {"lambda", lambda},
      {"lambda_max", static_cast<double>(p.m) / k.c2},
      {"alpha", ab.alpha},
      {"beta", ab.beta},
      {"beta_over_alpha", ab.beta / ab.alpha},
      {"theorem1_rate", theorem1_rate(p)},
      {"theorem1_rate_explicit", theorem1_rate_explicit(p)},
  };
  for (const auto& [key, value] : rows)
    out << key << '=' << format_real(value) << '\n';

  if (!a.csv.empty()) {
    const fs::path path(a.csv);
    ensure_parent(path);
    std::ofstream csv(path, std::ios::binary);
    if (!csv)
      throw IoError("cannot open '" + a.csv + "' for writing");
    std::string header = "sigma,xi,c,kappa0,m,p,s_star,delta,frak_c,h1";
    std::string line = fmt::format("{},{},{},{},{},{},{},{},{},{}", format_real(p.sigma),
                                   format_real(p.xi), format_real(p.c_bound),
                                   format_real(p.kappa0), p.m, p.p, p.s_star,
                                   format_real(p.delta), format_real(p.frak_c), format_real(p.h1));
    for (const auto& [key, value] : rows) {
      header += ',' + key;
      line += ',' + format_real(value);
    }
    csv << header << '\n' << line << '\n';
    if (!csv)
      throw IoError("failed writing '" + a.csv + "'");
  }
  return kOk;
}

// ---- sweep ------------------------------------------------------------------

struct SweepArgs {
  std::string preset = "sample-size";
  int reps = 10;
  long iters = 3000;
  long burn_in = -1;
  long baseline_iters = 5000;
  std::uint64_t seed = kDefaultSeed;
  std::string out = "results.csv";
  std::string svg;
  bool paper_scale = false;
  std::string levels;
  std::string methods;
  unsigned threads = 0;
  bool record_runtime = false;
  CLI::Option* reps_opt = nullptr;
  CLI::Option* iters_opt = nullptr;
};

void add_sweep(CLI::App& app, SweepArgs& a) {
  app.add_option("--preset", a.preset, "sample-size, noise, sparsity, varsigma or lambda")
      ->capture_default_str();
  a.reps_opt = app.add_option("--reps", a.reps, "replications per level")->capture_default_str();
  a.iters_opt =
      app.add_option("--iters", a.iters, "sampler iterations")->capture_default_str();
  app.add_option("--burn-in", a.burn_in, "sampler burn-in (default min(1000, iters/2))");
  app.add_option("--baseline-iters", a.baseline_iters, "baseline iterations")
      ->capture_default_str();
  app.add_option("--seed", a.seed, "master seed")->capture_default_str();
  app.add_option("--out", a.out, "results CSV path")->capture_default_str();
  app.add_option("--svg", a.svg, "write boxplots to this SVG file");
  app.add_flag("--paper-scale", a.paper_scale, "100 replications x 30000 iterations");
  app.add_option("--levels", a.levels, "comma-separated levels overriding the preset");
  app.add_option("--methods", a.methods, "comma-separated subset of lmc,mala,twf-baseline");
  app.add_option("--threads", a.threads, "worker count (0 = QPHASE_THREADS or all cores)")
      ->capture_default_str();
  app.add_flag("--record-runtime", a.record_runtime,
               "fill the runtime_s column (output is then not reproducible)");
}

int run_sweep_cmd(const SweepArgs& a, std::ostream& out, const Logger& log) {
  SweepSpec spec = preset(a.preset, a.paper_scale);
  if (!a.paper_scale || a.reps_opt->count() > 0)
    spec.n_reps = a.reps;
  if (!a.paper_scale || a.iters_opt->count() > 0)
    spec.sampler_iters = a.iters;
  spec.burn_in = a.burn_in >= 0 ? a.burn_in : std::min(1000L, spec.sampler_iters / 2);
  spec.baseline_iters = a.baseline_iters;
  spec.seed = a.seed;
  spec.threads = a.threads;
  if (!a.levels.empty()) {
    spec.levels.clear();
    for (const auto& s : split_list(a.levels))
      spec.levels.push_back(parse_real_or_inf(s, "level"));
  }
  if (!a.methods.empty())
    spec.methods = parse_methods(a.methods);

  log.info("sweep {}: {} levels x {} reps, {} sampler iterations ({} burn-in), {} workers",
           to_string(spec.factor), spec.levels.size(), spec.n_reps, spec.sampler_iters,
           spec.burn_in, resolve_threads(spec.threads));
  const SweepResult result = run_sweep(spec);

  const fs::path out_path(a.out);
  ensure_parent(out_path);
  write_sweep_csv(out_path, result, a.record_runtime);

  const auto summary = summarize(result);
  if (!a.svg.empty()) {
    const fs::path svg_path(a.svg);
    ensure_parent(svg_path);
    render_boxplots(summary, to_string(spec.factor), svg_path);
  }

  out << "level,method,n,diverged,min,q25,median,q75,max\n";
  int diverged = 0;
  for (const auto& f : summary) {
    diverged += f.n_diverged;
    out << fmt::format("{},{},{},{},{:.4g},{:.4g},{:.4g},{:.4g},{:.4g}\n", format_real(f.level),
                       to_string(f.method), f.n, f.n_diverged, f.min, f.q25, f.median, f.q75,
                       f.max);
  }
  if (diverged > 0)
    log.warn("{} replication(s) diverged; they are excluded from the quantiles", diverged);
  return kOk;
}

// ---- image ------------------------------------------------------------------

struct ImageArgs {
  std::string input;
  long m = 4000;
  double sigma = 1.0;
  std::string methods = "lmc,mala,twf-baseline";
  long iters = 30000;
  long burn_in = 1000;
  long baseline_iters = 5000;
  std::string lambda = "4m";
  double varsigma = 0.1;
  long max_pixels = 100000;
  std::uint64_t seed = kDefaultSeed;
  std::string out_dir = "recon";
};

void add_image(CLI::App& app, ImageArgs& a) {
  app.add_option("--input", a.input, "grayscale PGM image")->required();
  app.add_option("--m", a.m, "number of measurements")->capture_default_str();
  app.add_option("--sigma", a.sigma, "noise standard deviation")->capture_default_str();
  app.add_option("--methods", a.methods, "comma-separated methods")->capture_default_str();
  app.add_option("--iters", a.iters, "sampler iterations")->capture_default_str();
  app.add_option("--burn-in", a.burn_in, "sampler burn-in")->capture_default_str();
  app.add_option("--baseline-iters", a.baseline_iters, "baseline iterations")
      ->capture_default_str();
  app.add_option("--lambda", a.lambda, "inverse temperature, a number or '<k>m'")
      ->capture_default_str();
  app.add_option("--varsigma", a.varsigma, "prior scale")->capture_default_str();
  app.add_option("--max-pixels", a.max_pixels, "size guard")->capture_default_str();
  app.add_option("--seed", a.seed, "random seed")->capture_default_str();
  app.add_option("--out-dir", a.out_dir, "output directory")->capture_default_str();
}

int run_image(const ImageArgs& a, std::ostream& out, const Logger& log) {
  const ImageSignal img = load_pgm(a.input);
  log.info("loaded {}x{} image, {:.1f}% nonzero", img.width, img.height, 100.0 * img.nnz_fraction);
  ImageOptions options;
  options.sampler_iters = a.iters;
  options.burn_in = a.burn_in;
  options.baseline_iters = a.baseline_iters;
  options.lambda_rule = a.lambda;
  options.varsigma = a.varsigma;
  options.max_pixels = a.max_pixels;
  const auto results = reconstruct_image(img, a.m, a.sigma, parse_methods(a.methods), a.seed, options);

  const fs::path dir(a.out_dir);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec)
    throw IoError("cannot create directory '" + a.out_dir + "'");
  save_pgm(img, dir / "truth.pgm");

  std::ofstream metrics(dir / "metrics.csv", std::ios::binary);
  if (!metrics)
    throw IoError("cannot write metrics.csv");
  metrics << "method,mre,acceptance_rate,gamma,diverged\n";
  auto opt = [](const std::optional<double>& v) { return v ? format_real(*v) : std::string(); };
  for (const auto& r : results) {
    save_pgm(r.image, dir / (to_string(r.method) + ".pgm"));
    metrics << to_string(r.method) << ',' << format_real(r.mre) << ',' << opt(r.acceptance_rate)
            << ',' << opt(r.gamma) << ',' << (r.diverged ? 1 : 0) << '\n';
    out << fmt::format("{}: mre {}\n", to_string(r.method), format_real(r.mre));
  }
  if (!metrics)
    throw IoError("failed writing metrics.csv");
  return kOk;
}

} // namespace

int parse_and_dispatch(const std::vector<std::string>& raw_args, std::ostream& out,
                       std::ostream& err) {
  CLI::App app{"Quasi-Bayesian sparse phase retrieval", "qphase"};
  app.require_subcommand(1);
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);

  std::string log_level = "info";
  app.add_option("--log-level", log_level, "quiet, info or debug")
      ->check(CLI::IsMember({"quiet", "info", "debug"}));
  app.add_option("--config", "key = value file; command-line flags take precedence");

  GenerateArgs generate_args;
  SampleArgs sample_args;
  BaselineArgs baseline_args;
  TheoryArgs theory_args;
  SweepArgs sweep_args;
  ImageArgs image_args;

  auto* generate = app.add_subcommand("generate", "simulate a sparse phase-retrieval instance");
  add_generate(*generate, generate_args);
  auto* sample = app.add_subcommand("sample", "run LMC or MALA on the Gibbs quasi-posterior");
  add_sample(*sample, sample_args);
  auto* baseline = app.add_subcommand("baseline", "thresholded Wirtinger flow comparator");
  add_baseline(*baseline, baseline_args);
  auto* theory = app.add_subcommand("theory", "tuning constants and error-bound expressions");
  add_theory(*theory, theory_args);
  auto* sweep = app.add_subcommand("sweep", "Monte Carlo simulation sweeps");
  add_sweep(*sweep, sweep_args);
  auto* image = app.add_subcommand("image", "reconstruct a grayscale image");
  add_image(*image, image_args);

  for (CLI::App* sub : {generate, sample, baseline, theory, sweep, image})
    sub->add_option("--log-level", log_level, "quiet, info or debug")
        ->check(CLI::IsMember({"quiet", "info", "debug"}));

  Logger log{err};
  try {
    std::vector<std::string> args = layer_config(raw_args);
    if (args.empty())
      args.push_back("qphase");
    std::vector<std::string> reversed(args.rbegin(), args.rend() - 1);
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    const auto subs = app.get_subcommands();
    out << (subs.empty() ? app.help() : subs.front()->help());
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n";
    const auto subs = app.get_subcommands();
    err << (subs.empty() ? app.help() : subs.front()->help());
    return kDomainError;
  } catch (const DomainError& e) {
    err << "error: " << e.what() << '\n';
    return kDomainError;
  } catch (const IoError& e) {
    err << "error: " << e.what() << '\n';
    return kIoError;
  }

  log.level = log_level == "quiet" ? LogLevel::Quiet
              : log_level == "debug" ? LogLevel::Debug
                                     : LogLevel::Info;

  CLI::App* sub = app.get_subcommands().front();
  if (log.level != LogLevel::Quiet) {
    err << "[qphase] " << sub->get_name() << " parameters:\n";
    std::istringstream config(sub->config_to_str(true, false));
    for (std::string line; std::getline(config, line);)
      if (!line.empty())
        err << "[qphase]   " << line << '\n';
  }

  try {
    if (sub == generate)
      return run_generate(generate_args, out, log);
    if (sub == sample)
      return run_sample(sample_args, out, log);
    if (sub == baseline)
      return run_baseline(baseline_args, out, log);
    if (sub == theory)
      return run_theory(theory_args, out, log);
    if (sub == sweep)
      return run_sweep_cmd(sweep_args, out, log);
    if (sub == image)
      return run_image(image_args, out, log);
  } catch (const DomainError& e) {
    err << "error: " << e.what() << '\n';
    return kDomainError;
  } catch (const IoError& e) {
    err << "error: " << e.what() << '\n';
    return kIoError;
  } catch (const fs::filesystem_error& e) {
    err << "error: " << e.what() << '\n';
    return kIoError;
  } catch (const DivergenceError& e) {
    err << "error: " << e.what() << '\n';
    return kDivergence;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kDomainError;
  }
  return kDomainError;
}

int parse_and_dispatch(int argc, const char* const* argv) {
  std::vector<std::string> args(argv, argv + argc);
  return parse_and_dispatch(args, std::cout, std::cerr);
}

} // namespace qphase::cli

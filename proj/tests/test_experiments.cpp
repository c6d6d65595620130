#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <regex>
#include <sstream>
#include <stack>

#include "qphase/errors.hpp"
#include "qphase/experiments.hpp"

using namespace qphase;
namespace fs = std::filesystem;

namespace {

// Minimal well-formedness check: every start tag is closed in order.
bool balanced_xml(const std::string& text) {
  std::stack<std::string> open;
  std::size_t pos = 0;
  while ((pos = text.find('<', pos)) != std::string::npos) {
    const std::size_t end = text.find('>', pos);
    if (end == std::string::npos)
      return false;
    std::string tag = text.substr(pos + 1, end - pos - 1);
    pos = end + 1;
    if (tag.empty() || tag[0] == '?' || tag[0] == '!')
      continue;
    if (tag.back() == '/')
      continue;
    const std::string name = tag.substr(tag[0] == '/' ? 1 : 0, tag.find_first_of(" \t\n") -
                                                                   (tag[0] == '/' ? 1 : 0));
    if (tag[0] == '/') {
      if (open.empty() || open.top() != name)
        return false;
      open.pop();
    } else {
      open.push(name);
    }
  }
  return open.empty();
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

SweepSpec tiny_spec() {
  SweepSpec spec = preset("sample-size");
  spec.levels = {60, 240};
  spec.fixed.p = 12;
  spec.fixed.s_star = 2;
  spec.n_reps = 3;
  spec.sampler_iters = 300;
  spec.burn_in = 100;
  spec.baseline_iters = 200;
  spec.threads = 1;
  return spec;
}

} // namespace

TEST_CASE("mre examples and sign invariance") {
  Vector star = Vector::Zero(100);
  star[0] = 0.6;
  star[1] = 0.8;
  CHECK(mre(star, star) == 0.0);
  CHECK(mre(-star, star) == 0.0);
  CHECK(mre(Vector::Zero(100), star) == doctest::Approx(0.01));
  CHECK_THROWS_AS(mre(star, Vector::Zero(100)), DomainError);
  CHECK_THROWS_AS(mre(Vector::Zero(3), star), DomainError);

  Rng rng(1);
  for (int i = 0; i < 200; ++i) {
    const Vector a = rng.normal_vector(10), b = rng.normal_vector(10);
    CHECK(mre(-a, b) == mre(a, b));
    CHECK(mre(a, -b) == mre(a, b));
  }
}

TEST_CASE("names round trip") {
  for (Method m : {Method::Lmc, Method::Mala, Method::TwfBaseline})
    CHECK(parse_method(to_string(m)) == m);
  CHECK(to_string(Method::TwfBaseline) == "twf-baseline");
  for (Factor f : {Factor::SampleSize, Factor::Noise, Factor::Sparsity, Factor::Varsigma,
                   Factor::Lambda})
    CHECK(parse_factor(to_string(f)) == f);
  CHECK(parse_factor("sample_size") == Factor::SampleSize);
  CHECK_THROWS_AS(parse_method("gibbs"), DomainError);
  CHECK_THROWS_AS(parse_factor("depth"), DomainError);
}

TEST_CASE("quantiles by linear interpolation") {
  CHECK(quantile({0, 1, 2, 3, 4}, 0.5) == 2.0);
  CHECK(quantile({1, 2, 3, 4}, 0.25) == doctest::Approx(1.75));
  CHECK(quantile({1, 2, 3, 4}, 0.0) == 1.0);
  CHECK(quantile({1, 2, 3, 4}, 1.0) == 4.0);
  CHECK(quantile({7}, 0.3) == 7.0);
  CHECK(std::isnan(quantile({}, 0.5)));
}

TEST_CASE("summaries") {
  SweepResult single;
  single.records.push_back({1.0, 0, Method::Mala, 0.25});
  const auto s = summarize(single);
  REQUIRE(s.size() == 1);
  CHECK(s[0].min == 0.25);
  CHECK(s[0].q25 == 0.25);
  CHECK(s[0].median == 0.25);
  CHECK(s[0].q75 == 0.25);
  CHECK(s[0].max == 0.25);
  CHECK(s[0].n == 1);

  SweepResult many;
  for (int r = 0; r < 5; ++r)
    many.records.push_back({2.0, r, Method::Lmc, static_cast<double>(r)});
  SweepRecord bad{2.0, 5, Method::Lmc, std::numeric_limits<double>::infinity()};
  bad.diverged = true;
  many.records.push_back(bad);
  many.records.push_back({1.0, 0, Method::Lmc, 9.0});
  const auto t = summarize(many);
  REQUIRE(t.size() == 2);
  CHECK(t[0].level == 1.0);
  CHECK(t[1].median == 2.0);
  CHECK(t[1].n == 5);
  CHECK(t[1].n_diverged == 1);
  CHECK(t[1].max == 4.0);
  const auto med = median_by_level(t, Method::Lmc);
  REQUIRE(med.size() == 2);
  CHECK(med[0] == 9.0);
  CHECK(med[1] == 2.0);
  CHECK(median_by_level(t, Method::Mala).empty());

  SweepResult lost;
  lost.records.push_back(bad);
  const auto u = summarize(lost);
  CHECK(u[0].n == 0);
  CHECK(u[0].n_diverged == 1);
  CHECK(std::isnan(u[0].median));
  CHECK(std::isnan(median_by_level(u, Method::Lmc)[0]));
}

TEST_CASE("standard sweep designs") {
  const auto ss = preset("sample-size");
  CHECK(ss.factor == Factor::SampleSize);
  CHECK(ss.levels == std::vector<double>{100, 200, 500, 1000, 2000});
  CHECK(ss.fixed.p == 100);
  CHECK(ss.fixed.s_star == 10);
  CHECK(ss.fixed.sigma == 1.0);
  CHECK(ss.n_reps == 10);
  CHECK(ss.sampler_iters == 3000);

  const auto big = preset("sample-size", true);
  CHECK(big.n_reps == 100);
  CHECK(big.sampler_iters == 30000);

  const auto noise = preset("noise");
  CHECK(noise.levels == std::vector<double>{0.5, 1, 2, 5, 10});
  CHECK(noise.fixed.m == 500);

  const auto sparsity = preset("sparsity");
  CHECK(sparsity.levels == std::vector<double>{5, 20, 100, 250, 500});
  CHECK(sparsity.fixed.p == 500);
  CHECK(sparsity.fixed.m == 1000);

  const auto vs = preset("varsigma");
  CHECK(vs.levels.size() == 5);
  CHECK(vs.fixed.m == 200);
  CHECK(vs.methods.size() == 2);

  const auto lam = preset("lambda");
  CHECK(lam.levels == std::vector<double>{0.04, 0.08, 4, 100, 400});
  CHECK(lam.fixed.m == 50);

  CHECK_THROWS_AS(preset("unknown"), DomainError);
}

TEST_CASE("sweep validation") {
  SweepSpec spec = tiny_spec();
  spec.levels.clear();
  CHECK_THROWS_AS(validate(spec), DomainError);
  spec = tiny_spec();
  spec.n_reps = 0;
  CHECK_THROWS_AS(validate(spec), DomainError);
  spec = tiny_spec();
  spec.methods.clear();
  CHECK_THROWS_AS(validate(spec), DomainError);
  spec = preset("sparsity");
  spec.levels = {600};
  CHECK_THROWS_AS(validate(spec), DomainError);
  spec = tiny_spec();
  spec.levels = {50.5};
  CHECK_THROWS_AS(validate(spec), DomainError);
  spec = preset("varsigma");
  spec.levels = {0.0};
  CHECK_THROWS_AS(validate(spec), DomainError);
}

TEST_CASE("degenerate sweep yields one record") {
  SweepSpec spec = tiny_spec();
  spec.levels = {80};
  spec.n_reps = 1;
  spec.methods = {Method::Mala};
  const auto res = run_sweep(spec);
  REQUIRE(res.records.size() == 1);
  CHECK(res.records[0].method == Method::Mala);
  CHECK(res.records[0].acceptance_rate);
  CHECK(res.records[0].mre >= 0.0);
}

TEST_CASE("sweep results do not depend on thread count") {
  SweepSpec spec = tiny_spec();
  const auto one = run_sweep(spec);
  spec.threads = 3;
  const auto three = run_sweep(spec);
  REQUIRE(one.records.size() == 2 * 3 * 3);
  REQUIRE(three.records.size() == one.records.size());
  for (std::size_t i = 0; i < one.records.size(); ++i) {
    CHECK(one.records[i].level == three.records[i].level);
    CHECK(one.records[i].rep == three.records[i].rep);
    CHECK(one.records[i].method == three.records[i].method);
    CHECK(one.records[i].mre == three.records[i].mre);
  }
  // ordered by (level, rep, method); the baseline carries no tuning values
  CHECK(one.records[0].level == 60);
  CHECK(one.records[0].method == Method::Lmc);
  CHECK_FALSE(one.records[0].acceptance_rate);
  CHECK(one.records[1].acceptance_rate);
  CHECK_FALSE(one.records[2].lambda);
  CHECK(one.records[0].lambda == doctest::Approx(240.0));
}

TEST_CASE("sweep CSV and SVG are deterministic and well formed") {
  const fs::path dir = fs::temp_directory_path() / "qphase_test_sweep";
  fs::remove_all(dir);
  fs::create_directories(dir);
  const SweepSpec spec = tiny_spec();
  const auto a = run_sweep(spec);
  const auto b = run_sweep(spec);
  write_sweep_csv(dir / "a.csv", a);
  write_sweep_csv(dir / "b.csv", b);
  const std::string csv = slurp(dir / "a.csv");
  CHECK(csv == slurp(dir / "b.csv"));
  CHECK(csv.rfind("factor,level,rep,method,mre,runtime_s,acceptance_rate,lambda,varsigma,diverged\n",
                  0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 1 + 18);

  write_sweep_csv(dir / "timed.csv", a, true);
  std::istringstream timed(slurp(dir / "timed.csv"));
  std::string line;
  std::getline(timed, line);
  std::getline(timed, line);
  CHECK(std::regex_search(line, std::regex("^sample_size,60,0,lmc,[^,]+,[0-9.e-]+,")));

  const std::string svg = render_boxplots(summarize(a), "m");
  CHECK(svg == render_boxplots(summarize(b), "m"));
  CHECK(balanced_xml(svg));
  CHECK(svg.find("<svg") != std::string::npos);
  std::size_t boxes = 0;
  for (std::size_t p = svg.find("class=\"box\""); p != std::string::npos;
       p = svg.find("class=\"box\"", p + 1))
    ++boxes;
  CHECK(boxes == 6);
  fs::remove_all(dir);
}

TEST_CASE("single group renders one box") {
  FiveNumber f;
  f.level = 100;
  f.method = Method::Lmc;
  f.min = 0.1;
  f.q25 = 0.2;
  f.median = 0.3;
  f.q75 = 0.4;
  f.max = 0.5;
  f.n = 5;
  const std::string svg = render_boxplots({f}, "a <label> & more");
  CHECK(balanced_xml(svg));
  CHECK(svg.find("a &lt;label&gt; &amp; more") != std::string::npos);
  std::size_t boxes = 0;
  for (std::size_t p = svg.find("class=\"box\""); p != std::string::npos;
       p = svg.find("class=\"box\"", p + 1))
    ++boxes;
  CHECK(boxes == 1);
}

TEST_CASE("run_methods returns outcomes in request order") {
  Rng rng(3);
  const Vector star = generate_signal(rng, 15, 2);
  const auto inst = generate_instance(rng, star, 150, 0.0);
  MethodSettings settings;
  settings.sampler_iters = 2000;
  settings.burn_in = 500;
  settings.baseline_iters = 1000;
  settings.lambda = 600.0;
  const auto out = run_methods(inst, {Method::TwfBaseline, Method::Lmc, Method::Mala}, settings);
  REQUIRE(out.size() == 3);
  CHECK(out[0].method == Method::TwfBaseline);
  CHECK(out[1].method == Method::Lmc);
  CHECK(out[2].method == Method::Mala);
  CHECK(*out[1].gamma <= 0.5 * *out[2].gamma);
  for (const auto& o : out) {
    CHECK_FALSE(o.diverged);
    CHECK(mre(o.estimate, star) < 1e-3);
  }
}

TEST_CASE("thread count resolution") {
  CHECK(resolve_threads(3) == 3);
  CHECK(resolve_threads(0) >= 1);
}

TEST_CASE("default MALA tuning lands near acceptance 0.5 on the sample-size design") {
  SweepSpec spec = preset("sample-size");
  spec.levels = {500};
  spec.n_reps = 5;
  spec.methods = {Method::Mala};
  const auto res = run_sweep(spec);
  std::vector<double> rates;
  for (const auto& r : res.records)
    rates.push_back(*r.acceptance_rate);
  std::sort(rates.begin(), rates.end());
  const double median = quantile(rates, 0.5);
  CHECK(median >= 0.4);
  CHECK(median <= 0.6);
}

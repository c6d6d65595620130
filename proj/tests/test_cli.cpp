#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "qphase/cli.hpp"
#include "qphase/errors.hpp"
#include "qphase/instance_io.hpp"

using namespace qphase;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run run(std::vector<std::string> args) {
  args.insert(args.begin(), "qphase");
  std::ostringstream out, err;
  const int code = cli::parse_and_dispatch(args, out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& name) : path(fs::temp_directory_path() / name) {
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

std::string value_of(const std::string& text, const std::string& key) {
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);)
    if (line.rfind(key + "=", 0) == 0)
      return line.substr(key.size() + 1);
  return {};
}

} // namespace

TEST_CASE("help and usage errors") {
  const Run help = run({"--help"});
  CHECK(help.code == cli::kOk);
  CHECK(help.out.find("sweep") != std::string::npos);
  CHECK(run({"sweep", "--help"}).code == cli::kOk);

  const Run unknown = run({"theory", "--bogus", "1"});
  CHECK(unknown.code == cli::kDomainError);
  CHECK(unknown.err.find("Usage") != std::string::npos);

  CHECK(run({}).code == cli::kDomainError);
  CHECK(run({"frobnicate"}).code == cli::kDomainError);
  CHECK(run({"theory", "--m", "abc"}).code == cli::kDomainError);
}

TEST_CASE("theory prints the constants") {
  const Run r = run({"theory", "--sigma", "1", "--xi", "1", "--c", "1", "--m", "144", "--lambda",
                     "1"});
  REQUIRE(r.code == cli::kOk);
  CHECK(value_of(r.out, "C1") == "16");
  CHECK(value_of(r.out, "C2") == "64");
  CHECK(std::stod(value_of(r.out, "lambda_star")) == doctest::Approx(1.0));
  CHECK(std::stod(value_of(r.out, "alpha")) == doctest::Approx(0.9));
  CHECK(std::stod(value_of(r.out, "beta")) == doctest::Approx(1.1));
  CHECK(r.err.find("sigma") != std::string::npos); // parameters logged
}

TEST_CASE("theory domain errors") {
  CHECK(run({"theory", "--m", "144", "--lambda", "100"}).code == cli::kDomainError);
  CHECK(run({"theory", "--delta", "2"}).code == cli::kDomainError);
}

TEST_CASE("config file precedence: flag > file > default") {
  TempDir dir("qphase_cli_config");
  {
    std::ofstream cfg(dir.path / "theory.conf");
    cfg << "# layered fixture\nm = 144\nsigma = 2\n";
  }
  const std::string conf = (dir.path / "theory.conf").string();

  const Run base = run({"theory", "--m", "144"});
  const Run from_file = run({"theory", "--config", conf});
  const Run overridden = run({"theory", "--config", conf, "--sigma", "1"});
  REQUIRE(from_file.code == cli::kOk);
  REQUIRE(overridden.code == cli::kOk);
  CHECK(value_of(from_file.out, "C1") == "40"); // 8 (4 + 1)
  CHECK(value_of(overridden.out, "C1") == "16");
  CHECK(overridden.out == base.out);
  // flag placed before --config still wins
  CHECK(run({"theory", "--sigma", "1", "--config", conf}).out == base.out);

  {
    std::ofstream bad(dir.path / "bad.conf");
    bad << "no_such_key = 3\n";
  }
  CHECK(run({"theory", "--config", (dir.path / "bad.conf").string()}).code == cli::kDomainError);
  CHECK(run({"theory", "--config", (dir.path / "absent.conf").string()}).code == cli::kIoError);
}

TEST_CASE("layer_config places file values ahead of flags") {
  TempDir dir("qphase_cli_layer");
  {
    std::ofstream cfg(dir.path / "a.conf");
    cfg << "burn_in = 5\n";
  }
  const auto args =
      cli::layer_config({"qphase", "sweep", "--config", (dir.path / "a.conf").string(), "--reps", "2"});
  const std::vector<std::string> expected{"qphase", "sweep", "--burn-in=5", "--reps", "2"};
  CHECK(args == expected);
}

TEST_CASE("generate, sample and baseline end to end") {
  TempDir dir("qphase_cli_e2e");
  const std::string inst = (dir.path / "inst").string();
  REQUIRE(run({"generate", "--p", "20", "--s-star", "3", "--m", "200", "--sigma", "0", "--seed",
               "5", "--out", inst})
              .code == cli::kOk);
  for (const char* f : {"A.csv", "y.csv", "theta_star.csv", "meta.txt"})
    CHECK(fs::exists(fs::path(inst) / f));

  const std::string chain = (dir.path / "chain.csv").string();
  const Run s = run({"sample", "--method", "mala", "--in", inst, "--iters", "3000", "--burn-in",
                     "500", "--init", "spectral", "--out", chain, "--seed", "9"});
  REQUIRE(s.code == cli::kOk);
  const Matrix rows = read_matrix_csv(chain);
  CHECK(rows.rows() == 2501);
  CHECK(rows.cols() == 20);
  const KeyValues meta = read_key_values(chain + ".meta");
  CHECK(meta.at("posterior_mean_row") == "2501");
  CHECK(std::stod(meta.at("mre")) < 1e-3);
  CHECK(s.err.find("seed") != std::string::npos);

  const std::string b = (dir.path / "twf.csv").string();
  REQUIRE(run({"baseline", "--in", inst, "--out", b}).code == cli::kOk);
  CHECK(std::stod(read_key_values(b + ".meta").at("mre")) < 1e-4);

  // LMC with an absurd step diverges: exit 3
  const Run div = run({"sample", "--method", "lmc", "--gamma", "10", "--in", inst, "--iters",
                       "200", "--burn-in", "0", "--init", "spectral", "--out", chain});
  CHECK(div.code == cli::kDivergence);
  CHECK(div.err.find("iteration") != std::string::npos);

  CHECK(run({"sample", "--in", (dir.path / "nowhere").string()}).code == cli::kIoError);
  CHECK(run({"sample", "--in", inst, "--burn-in", "50", "--iters", "10"}).code ==
        cli::kDomainError);
}

TEST_CASE("sweep output is reproducible") {
  TempDir dir("qphase_cli_sweep");
  auto go = [&](const std::string& name) {
    return run({"sweep", "--preset", "sample-size", "--levels", "60,120", "--reps", "2", "--iters",
                "300", "--baseline-iters", "200", "--seed", "7", "--out",
                (dir.path / (name + ".csv")).string(), "--svg",
                (dir.path / (name + ".svg")).string(), "--log-level", "quiet"});
  };
  REQUIRE(go("a").code == cli::kOk);
  REQUIRE(go("b").code == cli::kOk);
  CHECK(slurp(dir.path / "a.csv") == slurp(dir.path / "b.csv"));
  CHECK(slurp(dir.path / "a.svg") == slurp(dir.path / "b.svg"));
  CHECK(run({"sweep", "--preset", "bogus"}).code == cli::kDomainError);
  CHECK(run({"sweep", "--preset", "sparsity", "--levels", "1000"}).code == cli::kDomainError);
}

TEST_CASE("image subcommand") {
  TempDir dir("qphase_cli_image");
  {
    std::ofstream img(dir.path / "tiny.pgm");
    img << "P2\n4 4\n255\n0 0 0 0\n0 200 0 0\n0 255 90 0\n0 0 0 0\n";
  }
  const Run r = run({"image", "--input", (dir.path / "tiny.pgm").string(), "--m", "160",
                     "--sigma", "0", "--methods", "twf-baseline", "--out-dir",
                     (dir.path / "out").string()});
  REQUIRE(r.code == cli::kOk);
  CHECK(fs::exists(dir.path / "out" / "truth.pgm"));
  CHECK(fs::exists(dir.path / "out" / "twf-baseline.pgm"));
  CHECK(slurp(dir.path / "out" / "metrics.csv").rfind("method,mre,", 0) == 0);

  {
    std::ofstream bad(dir.path / "bad.pgm");
    bad << "P7\n";
  }
  CHECK(run({"image", "--input", (dir.path / "bad.pgm").string()}).code == cli::kIoError);
  CHECK(run({"image", "--input", (dir.path / "tiny.pgm").string(), "--methods", "nope"}).code ==
        cli::kDomainError);
}

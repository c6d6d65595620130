#include "qphase/imaging.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <iterator>
#include <limits>
#include <sstream>

#include <fmt/format.h>

#include "qphase/errors.hpp"
#include "qphase/posterior.hpp"

namespace qphase {

namespace fs = std::filesystem;

void update_nnz(ImageSignal& img) {
  const auto total = img.pixels.size();
  img.nnz_fraction = total == 0 ? 0.0
                                : static_cast<double>((img.pixels.array() != 0.0).count()) /
                                      static_cast<double>(total);
}

namespace {

class PgmReader {
public:
  explicit PgmReader(const std::string& bytes) : bytes_(bytes) {}

  std::size_t offset() const { return pos_; }

  [[noreturn]] void fail(const std::string& what) const {
    throw IoError(fmt::format("PGM parse error at byte {}: {}", pos_, what));
  }

  // Skips whitespace and '#' comments that run to end of line.
  void skip_separators() {
    while (pos_ < bytes_.size()) {
      const char c = bytes_[pos_];
      if (c == '#') {
        while (pos_ < bytes_.size() && bytes_[pos_] != '\n' && bytes_[pos_] != '\r')
          ++pos_;
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        ++pos_;
      } else {
        break;
      }
    }
  }

  long read_uint(const char* what) {
    skip_separators();
    if (pos_ >= bytes_.size())
      fail(fmt::format("unexpected end of file reading {}", what));
    if (!std::isdigit(static_cast<unsigned char>(bytes_[pos_])))
      fail(fmt::format("expected a decimal {}", what));
    long value = 0;
    while (pos_ < bytes_.size() && std::isdigit(static_cast<unsigned char>(bytes_[pos_]))) {
      value = value * 10 + (bytes_[pos_] - '0');
      if (value > 100000000)
        fail(fmt::format("{} is too large", what));
      ++pos_;
    }
    return value;
  }

  std::string magic() {
    if (bytes_.size() < 2)
      fail("file too short for a PGM header");
    pos_ = 2;
    return bytes_.substr(0, 2);
  }

  // Exactly one whitespace byte separates the header from binary data.
  void single_separator() {
    if (pos_ >= bytes_.size() || !std::isspace(static_cast<unsigned char>(bytes_[pos_])))
      fail("expected a whitespace byte after the max value");
    ++pos_;
  }

  unsigned read_binary(bool wide) {
    const std::size_t need = wide ? 2 : 1;
    if (pos_ + need > bytes_.size())
      fail("truncated pixel data");
    unsigned value = static_cast<unsigned char>(bytes_[pos_]);
    if (wide)
      value = (value << 8) | static_cast<unsigned char>(bytes_[pos_ + 1]);
    pos_ += need;
    return value;
  }

private:
  const std::string& bytes_;
  std::size_t pos_ = 0;
};

} // namespace

ImageSignal parse_pgm(const std::string& bytes) {
  PgmReader reader(bytes);
  const std::string magic = reader.magic();
  if (magic != "P2" && magic != "P5")
    throw IoError("PGM parse error at byte 0: expected magic P2 or P5, found '" + magic + "'");
  const bool ascii = magic == "P2";

  const long width = reader.read_uint("width");
  const long height = reader.read_uint("height");
  const long maxval = reader.read_uint("max value");
  if (width < 1 || height < 1)
    reader.fail("image dimensions must be positive");
  if (maxval < 1 || maxval > 65535)
    reader.fail("max value must lie in [1, 65535]");

  ImageSignal img;
  img.width = width;
  img.height = height;
  img.pixels.resize(width * height);

  if (!ascii)
    reader.single_separator();
  for (Eigen::Index i = 0; i < img.pixels.size(); ++i) {
    const long v = ascii ? reader.read_uint("pixel value")
                         : static_cast<long>(reader.read_binary(maxval > 255));
    if (v > maxval)
      reader.fail(fmt::format("pixel value {} exceeds max value {}", v, maxval));
    img.pixels[i] = static_cast<double>(v) / static_cast<double>(maxval);
  }

  const double norm = img.pixels.norm();
  if (!(norm > 0.0))
    throw DomainError("cannot normalize an all-zero image");
  img.pixels /= norm;
  update_nnz(img);
  return img;
}

ImageSignal load_pgm(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw IoError("cannot open '" + path.string() + "'");
  const std::string bytes{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
  return parse_pgm(bytes);
}

std::string format_pgm(const ImageSignal& img) {
  if (img.width < 1 || img.height < 1 || img.pixels.size() != img.width * img.height)
    throw DomainError("image dimensions do not match its pixel count");
  if (!img.pixels.allFinite())
    throw DomainError("cannot save non-finite pixels");

  const Vector clamped = img.pixels.cwiseMax(0.0);
  const double lo = clamped.minCoeff();
  const double hi = clamped.maxCoeff();
  const double range = hi - lo;

  std::string out = fmt::format("P2\n{} {}\n255\n", img.width, img.height);
  for (Eigen::Index r = 0; r < img.height; ++r) {
    for (Eigen::Index c = 0; c < img.width; ++c) {
      const double v = clamped[r * img.width + c];
      const long level = range > 0.0 ? std::lround((v - lo) / range * 255.0) : 0;
      if (c)
        out += ' ';
      out += std::to_string(std::clamp(level, 0L, 255L));
    }
    out += '\n';
  }
  return out;
}

void save_pgm(const ImageSignal& img, const fs::path& path) {
  const std::string text = format_pgm(img);
  std::ofstream out(path, std::ios::binary);
  if (!out)
    throw IoError("cannot open '" + path.string() + "' for writing");
  out << text;
  out.flush();
  if (!out)
    throw IoError("failed writing '" + path.string() + "'");
}

std::vector<Reconstruction> reconstruct_image(const ImageSignal& img, Eigen::Index m, double sigma,
                                              const std::vector<Method>& methods,
                                              std::uint64_t seed, const ImageOptions& options) {
  if (m < 1)
    throw DomainError("measurement count must be at least 1");
  const Eigen::Index p = img.pixels.size();
  if (p < 1 || p != img.width * img.height)
    throw DomainError("image dimensions do not match its pixel count");
  if (p > options.max_pixels)
    throw DomainError(fmt::format("image has {} pixels, above the limit of {}", p,
                                  options.max_pixels));
  if (methods.empty())
    return {};

  const Vector& truth = img.pixels;
  Rng data(seed, 0);
  const ProblemInstance inst = generate_instance(data, truth, m, sigma);

  MethodSettings settings;
  settings.sampler_iters = options.sampler_iters;
  settings.burn_in = options.burn_in;
  settings.baseline_iters = options.baseline_iters;
  settings.lambda = resolve_lambda(options.lambda_rule, m);
  settings.varsigma = options.varsigma;
  settings.seed = seed;

  std::vector<Reconstruction> out;
  for (const auto& o : run_methods(inst, methods, settings)) {
    Reconstruction r;
    r.method = o.method;
    r.diverged = o.diverged;
    r.acceptance_rate = o.acceptance_rate;
    r.gamma = o.gamma;
    r.image.width = img.width;
    r.image.height = img.height;
    if (o.diverged) {
      r.image.pixels = Vector::Zero(p);
      r.mre = std::numeric_limits<double>::infinity();
    } else {
      r.image.pixels = o.estimate.dot(truth) < 0.0 ? Vector(-o.estimate) : o.estimate;
      r.mre = mre(r.image.pixels, truth);
    }
    update_nnz(r.image);
    out.push_back(std::move(r));
  }
  return out;
}

} // namespace qphase

#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "qphase/experiments.hpp"
#include "qphase/model.hpp"

namespace qphase {

/// A grayscale image flattened row-major into a signal vector.
struct ImageSignal {
  Eigen::Index width = 0;
  Eigen::Index height = 0;
  Vector pixels;
  double nnz_fraction = 0.0;
};

/// Recomputes nnz_fraction from the pixels.
void update_nnz(ImageSignal& img);

/// Reads ASCII (P2) or binary (P5, 8- or 16-bit) PGM. Pixels are scaled to
/// [0, 1] by the max value and then L2-normalized. Malformed input throws
/// IoError naming the byte offset; an all-zero image throws DomainError.
ImageSignal load_pgm(const std::filesystem::path& path);
ImageSignal parse_pgm(const std::string& bytes);

/// Writes an ASCII P2 file with max value 255. Negative pixels are clamped to
/// zero, then [min, max] maps affinely onto [0, 255]; a constant image maps to 0.
void save_pgm(const ImageSignal& img, const std::filesystem::path& path);
std::string format_pgm(const ImageSignal& img);

struct ImageOptions {
  long sampler_iters = 30000;
  long burn_in = 1000;
  long baseline_iters = 5000;
  std::string lambda_rule = "4m";
  double varsigma = 0.1;
  Eigen::Index max_pixels = 100000; // desk-scale guard
};

struct Reconstruction {
  Method method = Method::Lmc;
  ImageSignal image; // sign-aligned with the truth
  double mre = 0.0;
  bool diverged = false;
  std::optional<double> acceptance_rate;
  std::optional<double> gamma;
};

/// Simulates m Gaussian intensity measurements of the image with N(0, sigma^2)
/// noise and reconstructs it with each requested method.
std::vector<Reconstruction> reconstruct_image(const ImageSignal& img, Eigen::Index m, double sigma,
                                              const std::vector<Method>& methods,
                                              std::uint64_t seed,
                                              const ImageOptions& options = {});

} // namespace qphase

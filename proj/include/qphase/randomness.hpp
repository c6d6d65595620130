#pragma once

#include <cstdint>
#include <random>
#include <string_view>

#include <Eigen/Core>

namespace qphase {

/// Fixed seed used when no --seed is given.
inline constexpr std::uint64_t kDefaultSeed = 20240917ULL;

/// Seedable Gaussian source. Two instances built from the same
/// (seed, stream_id) produce the same draw sequence within one build.
class Rng {
public:
  explicit Rng(std::uint64_t seed, std::uint64_t stream_id = 0);

  std::uint64_t seed() const noexcept { return seed_; }
  std::uint64_t stream_id() const noexcept { return stream_id_; }

  double standard_normal();

  /// p i.i.d. standard normal entries; throws DomainError for p == 0.
  Eigen::VectorXd normal_vector(Eigen::Index p);

  /// Uniform real in [0, 1).
  double uniform01();

  /// Uniform integer in [0, n).
  std::size_t uniform_index(std::size_t n);

  std::mt19937_64& engine() noexcept { return engine_; }

private:
  std::uint64_t seed_;
  std::uint64_t stream_id_;
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
};

/// Derives a sub-seed from a master seed and a purpose tag, so that
/// independent consumers (data, each sampler) never share a stream.
std::uint64_t derive_seed(std::uint64_t master, std::string_view tag);

} // namespace qphase

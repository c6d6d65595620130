#include "qphase/randomness.hpp"

#include "qphase/errors.hpp"

namespace qphase {

namespace {

std::uint32_t lo(std::uint64_t v) { return static_cast<std::uint32_t>(v); }
std::uint32_t hi(std::uint64_t v) { return static_cast<std::uint32_t>(v >> 32); }

std::mt19937_64 make_engine(std::uint64_t seed, std::uint64_t stream_id) {
  std::seed_seq seq{lo(seed), hi(seed), lo(stream_id), hi(stream_id), 0x71a5e5u};
  return std::mt19937_64(seq);
}

// splitmix64 finalizer
std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

} // namespace

Rng::Rng(std::uint64_t seed, std::uint64_t stream_id)
    : seed_(seed), stream_id_(stream_id), engine_(make_engine(seed, stream_id)) {}

double Rng::standard_normal() { return normal_(engine_); }

Eigen::VectorXd Rng::normal_vector(Eigen::Index p) {
  if (p <= 0)
    throw DomainError("normal_vector: dimension must be at least 1");
  Eigen::VectorXd v(p);
  for (Eigen::Index i = 0; i < p; ++i)
    v[i] = normal_(engine_);
  return v;
}

double Rng::uniform01() { return std::uniform_real_distribution<double>(0.0, 1.0)(engine_); }

std::size_t Rng::uniform_index(std::size_t n) {
  std::uniform_int_distribution<std::size_t> dist(0, n - 1);
  return dist(engine_);
}

std::uint64_t derive_seed(std::uint64_t master, std::string_view tag) {
  // FNV-1a over the tag, then mixed with the master seed.
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : tag) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return mix64(master ^ mix64(h));
}

} // namespace qphase

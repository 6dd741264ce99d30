#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace pqsys {

using Real = double;
using Vector = Eigen::VectorXd;
using Vec2 = Eigen::Vector2d;
using Mat2 = Eigen::Matrix2d;
using SparseMat = Eigen::SparseMatrix<Real>;
using Triplet = Eigen::Triplet<Real>;

/// Deterministic RNG with platform-independent real transforms.
/// std::distributions are implementation-defined, so the uniform/normal
/// draws are derived from the raw 64-bit stream directly.
class Rng {
public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() {
    // splitmix64
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  /// Uniform in [0,1).
  Real uniform() { return static_cast<Real>(next_u64() >> 11) * 0x1.0p-53; }

  /// Uniform in [a,b).
  Real uniform(Real a, Real b) { return a + (b - a) * uniform(); }

  int uniform_int(int lo, int hi) {  // inclusive bounds
    return lo + static_cast<int>(next_u64() % static_cast<std::uint64_t>(hi - lo + 1));
  }

  /// Standard normal via Marsaglia polar method.
  Real normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    Real u, v, s;
    do {
      u = 2.0 * uniform() - 1.0;
      v = 2.0 * uniform() - 1.0;
      s = u * u + v * v;
    } while (s >= 1.0 || s == 0.0);
    const Real m = std::sqrt(-2.0 * std::log(s) / s);
    spare_ = v * m;
    have_spare_ = true;
    return u * m;
  }

private:
  std::uint64_t state_;
  bool have_spare_ = false;
  Real spare_ = 0.0;
};

[[noreturn]] inline void fail(const std::string& msg) { throw std::runtime_error(msg); }

inline void require(bool cond, const std::string& msg) {
  if (!cond) throw std::invalid_argument(msg);
}

}  // namespace pqsys

#pragma once

#include <cstdint>

#include "slowflow/field.hpp"

namespace slowflow {

// splitmix64: tiny deterministic generator, identical across platforms
// (std distributions are implementation-defined, so we map bits ourselves).
class Rng {
public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  double uniform() { return double(next() >> 11) * 0x1.0p-53; }  // [0,1)
  double uniform(double a, double b) { return a + (b - a) * uniform(); }

private:
  std::uint64_t state_;
};

// Random real band-limited field: independent complex amplitudes on modes
// with |m_j| <= kmax (conjugate symmetry enforced), mean-free.
ScalarField random_scalar(const GridPtr& grid, int kmax, Rng& rng);

// Random band-limited vector field, optionally projected solenoidal.
VectorField random_vector(const GridPtr& grid, int ncomp, int kmax, Rng& rng,
                          bool solenoidal = false);

}  // namespace slowflow

#include "slowflow/rng.hpp"

#include <cmath>

#include "slowflow/spectral.hpp"

namespace slowflow {

ScalarField random_scalar(const GridPtr& grid, int kmax, Rng& rng) {
  const Grid& g = *grid;
  ScalarField f(grid, true);
  for (int i1 = 0; i1 < g.n1(); ++i1) {
    const int m1 = Grid::signed_mode(i1, g.n1());
    if (std::abs(m1) > kmax) continue;
    for (int i2 = 0; i2 < g.n2(); ++i2) {
      const int m2 = Grid::signed_mode(i2, g.n2());
      if (std::abs(m2) > kmax) continue;
      for (int i3 = 0; i3 < g.n3(); ++i3) {
        const int m3 = Grid::signed_mode(i3, g.n3());
        if (g.n3() > 1 && std::abs(m3) > kmax) continue;
        if (m1 == 0 && m2 == 0 && m3 == 0) continue;
        f.at(i1, i2, i3) = cplx{rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0)};
      }
    }
  }
  // Symmetrize so the field is real: c(k) <- (c(k) + conj(c(-k)))/2.
  ScalarField sym(grid, true);
  for (int i1 = 0; i1 < g.n1(); ++i1)
    for (int i2 = 0; i2 < g.n2(); ++i2)
      for (int i3 = 0; i3 < g.n3(); ++i3) {
        const int j1 = (g.n1() - i1) % g.n1();
        const int j2 = (g.n2() - i2) % g.n2();
        const int j3 = (g.n3() - i3) % g.n3();
        sym.at(i1, i2, i3) =
            0.5 * (f.at(i1, i2, i3) + std::conj(f.at(j1, j2, j3)));
      }
  return sym;
}

VectorField random_vector(const GridPtr& grid, int ncomp, int kmax, Rng& rng,
                          bool solenoidal) {
  std::vector<ScalarField> comps;
  comps.reserve(ncomp);
  for (int c = 0; c < ncomp; ++c) comps.push_back(random_scalar(grid, kmax, rng));
  VectorField v(std::move(comps));
  if (solenoidal) v = weighted_leray_project(v);
  return v;
}

}  // namespace slowflow

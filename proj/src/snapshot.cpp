#include "slowflow/snapshot.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>

namespace slowflow {

static_assert(std::endian::native == std::endian::little,
              "snapshot format assumes a little-endian host");

namespace {

constexpr char kMagic[9] = {'S', 'L', 'O', 'W', 'F', 'L', 'O', 'W', '1'};

template <class T>
void put(std::ostream& os, T v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <class T>
T get(std::istream& is) {
  T v{};
  is.read(reinterpret_cast<char*>(&v), sizeof(T));
  return v;
}

}  // namespace

void save_snapshot(const std::string& path, const VectorField& f) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw IoError("save_snapshot: cannot open " + path);
  os.write(kMagic, sizeof(kMagic));
  const Grid& g = f.g();
  put<std::uint32_t>(os, g.n1());
  put<std::uint32_t>(os, g.n2());
  put<std::uint32_t>(os, g.n3());
  put<double>(os, g.L1());
  put<double>(os, g.L2());
  put<double>(os, g.L3());
  put<std::uint32_t>(os, f.ncomp());
  for (int c = 0; c < f.ncomp(); ++c) {
    const auto span = f[c].coeffs();
    os.write(reinterpret_cast<const char*>(span.data()),
             std::streamsize(span.size() * sizeof(cplx)));
  }
  if (!os) throw IoError("save_snapshot: write failed for " + path);
}

void save_snapshot(const std::string& path, const ScalarField& f) {
  save_snapshot(path, VectorField(std::vector<ScalarField>{f}));
}

VectorField load_snapshot(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoError("load_snapshot: cannot open " + path);
  char magic[sizeof(kMagic)];
  is.read(magic, sizeof(magic));
  if (!is || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0)
    throw IoError("load_snapshot: bad magic in " + path);
  const auto n1 = get<std::uint32_t>(is);
  const auto n2 = get<std::uint32_t>(is);
  const auto n3 = get<std::uint32_t>(is);
  const double L1 = get<double>(is);
  const double L2 = get<double>(is);
  const double L3 = get<double>(is);
  const auto ncomp = get<std::uint32_t>(is);
  if (!is || ncomp == 0 || ncomp > 3)
    throw IoError("load_snapshot: bad header in " + path);
  GridPtr grid = make_grid(int(n1), int(n2), int(n3), L1, L2, L3);
  std::vector<ScalarField> comps;
  for (std::uint32_t c = 0; c < ncomp; ++c) {
    std::vector<cplx> coeffs(grid->size());
    is.read(reinterpret_cast<char*>(coeffs.data()),
            std::streamsize(coeffs.size() * sizeof(cplx)));
    if (!is) throw IoError("load_snapshot: truncated data in " + path);
    comps.emplace_back(grid, std::move(coeffs));
  }
  return VectorField(std::move(comps));
}

}  // namespace slowflow

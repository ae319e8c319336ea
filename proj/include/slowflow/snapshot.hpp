#pragma once

#include <string>

#include "slowflow/field.hpp"

namespace slowflow {

// Raised on snapshot/report file failures (CLI exit code 4).
struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Binary snapshot format, little-endian:
//   magic "SLOWFLOW1", u32 n1 n2 n3, f64 L1 L2 L3, u32 component count,
//   then per component n1*n2*n3 complex f64 (re, im) pairs in row-major
//   mode order (i3 fastest).
void save_snapshot(const std::string& path, const VectorField& f);
void save_snapshot(const std::string& path, const ScalarField& f);
VectorField load_snapshot(const std::string& path);

}  // namespace slowflow

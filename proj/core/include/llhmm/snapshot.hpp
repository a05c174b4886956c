#pragma once

#include <iosfwd>
#include <optional>
#include <string>

#include "llhmm/cell.hpp"
#include "llhmm/grid.hpp"

namespace llhmm {

/// Flat binary field snapshot. Layout (little endian):
///   magic "LLSN" | u32 version | u32 dim | u32 n | u32 flags
///   f64 length | f64 time
///   [flags & 1: dim*dim f64 tensor entries, row-major]
///   n^dim node triples, row-major, 3 x f64 each.
struct Snapshot {
  double time = 0.0;
  VectorField field;
  std::optional<HomogenizedTensor> tensor;
};

void write_snapshot(std::ostream& os, const Snapshot& snap);
void write_snapshot(const std::string& path, const Snapshot& snap);
Snapshot read_snapshot(std::istream& is);
Snapshot read_snapshot(const std::string& path);

}  // namespace llhmm

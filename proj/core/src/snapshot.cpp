#include "llhmm/snapshot.hpp"

#include <cstdint>
#include <cstring>
#include <fstream>

namespace llhmm {

namespace {

constexpr char kMagic[4] = {'L', 'L', 'S', 'N'};
constexpr std::uint32_t kVersion = 1;

void put_u32(std::ostream& os, std::uint32_t v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof v);
}

void put_f64(std::ostream& os, double v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof v);
}

std::uint32_t get_u32(std::istream& is) {
  std::uint32_t v = 0;
  is.read(reinterpret_cast<char*>(&v), sizeof v);
  return v;
}

double get_f64(std::istream& is) {
  double v = 0.0;
  is.read(reinterpret_cast<char*>(&v), sizeof v);
  return v;
}

}  // namespace

void write_snapshot(std::ostream& os, const Snapshot& snap) {
  const PeriodicGrid& g = snap.field.grid();
  os.write(kMagic, 4);
  put_u32(os, kVersion);
  put_u32(os, static_cast<std::uint32_t>(g.dim));
  put_u32(os, static_cast<std::uint32_t>(g.n));
  put_u32(os, snap.tensor ? 1u : 0u);
  put_f64(os, g.length);
  put_f64(os, snap.time);
  if (snap.tensor) {
    for (int i = 0; i < g.dim; ++i) {
      for (int j = 0; j < g.dim; ++j) put_f64(os, (*snap.tensor)(i, j));
    }
  }
  for (const Vec3& v : snap.field.values()) {
    put_f64(os, v.x);
    put_f64(os, v.y);
    put_f64(os, v.z);
  }
  if (!os) throw Error("write_snapshot: stream failure");
}

void write_snapshot(const std::string& path, const Snapshot& snap) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw Error("write_snapshot: cannot open '" + path + "'");
  write_snapshot(os, snap);
}

Snapshot read_snapshot(std::istream& is) {
  char magic[4] = {};
  is.read(magic, 4);
  if (!is || std::memcmp(magic, kMagic, 4) != 0) {
    throw Error("read_snapshot: bad magic");
  }
  const std::uint32_t version = get_u32(is);
  if (version != kVersion) {
    throw Error("read_snapshot: unsupported version " + std::to_string(version));
  }
  const int dim = static_cast<int>(get_u32(is));
  const int n = static_cast<int>(get_u32(is));
  const std::uint32_t flags = get_u32(is);
  const double length = get_f64(is);
  const double time = get_f64(is);

  Snapshot snap;
  snap.time = time;
  PeriodicGrid g(dim, n, length);
  if (flags & 1u) {
    HomogenizedTensor t(dim);
    for (int i = 0; i < dim; ++i) {
      for (int j = 0; j < dim; ++j) t(i, j) = get_f64(is);
    }
    snap.tensor = t;
  }
  snap.field = VectorField(g);
  for (Vec3& v : snap.field.values()) {
    v.x = get_f64(is);
    v.y = get_f64(is);
    v.z = get_f64(is);
  }
  if (!is) throw Error("read_snapshot: truncated stream");
  return snap;
}

Snapshot read_snapshot(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw Error("read_snapshot: cannot open '" + path + "'");
  return read_snapshot(is);
}

}  // namespace llhmm

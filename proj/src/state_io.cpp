#include "nlscn/state_io.hpp"

#include <algorithm>
#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <vector>

#include "nlscn/errors.hpp"

namespace nlscn {

namespace {

constexpr char kMagic[8] = {'N', 'L', 'S', 'C', 'N', 'S', 'T', 'A'};
constexpr std::uint8_t kVersion = 1;
constexpr std::uint32_t kEndianTag = 0x01020304u;

template <class T>
void put(std::vector<unsigned char>& buf, T v) {
  unsigned char b[sizeof(T)];
  std::memcpy(b, &v, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) std::reverse(b, b + sizeof(T));
  buf.insert(buf.end(), b, b + sizeof(T));
}

struct Reader {
  const std::vector<unsigned char>& buf;
  std::size_t pos = 0;

  template <class T>
  T get() {
    if (pos + sizeof(T) > buf.size()) throw FormatError("state file is truncated");
    unsigned char b[sizeof(T)];
    std::memcpy(b, buf.data() + pos, sizeof(T));
    if constexpr (std::endian::native == std::endian::big) std::reverse(b, b + sizeof(T));
    pos += sizeof(T);
    T v;
    std::memcpy(&v, b, sizeof(T));
    return v;
  }
};

}  // namespace

void save_state(const std::filesystem::path& path, const RectMesh& mesh, std::span<const cplx> U,
                double t, long step) {
  if (static_cast<int>(U.size()) != mesh.num_dofs()) {
    throw DimensionError("save_state: vector does not match the mesh");
  }
  std::vector<unsigned char> buf;
  buf.reserve(64 + 16 * U.size());
  buf.insert(buf.end(), kMagic, kMagic + 8);
  put<std::uint8_t>(buf, kVersion);
  put<std::uint32_t>(buf, kEndianTag);
  const Bounds& b = mesh.bounds();
  put(buf, b.ax);
  put(buf, b.bx);
  put(buf, b.ay);
  put(buf, b.by);
  put<std::int32_t>(buf, mesh.nx());
  put<std::int32_t>(buf, mesh.ny());
  put<std::uint8_t>(buf, mesh.bc() == BoundaryKind::periodic ? 1 : 0);
  put<std::uint64_t>(buf, U.size());
  put(buf, t);
  put<std::int64_t>(buf, step);
  for (const cplx& v : U) {
    put(buf, v.real());
    put(buf, v.imag());
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot open '" + path.string() + "' for writing");
  out.write(reinterpret_cast<const char*>(buf.data()), static_cast<std::streamsize>(buf.size()));
  if (!out) throw Error("write to '" + path.string() + "' failed");
}

StateFile load_state(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open state file '" + path.string() + "'");
  const std::vector<unsigned char> buf((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (buf.size() < 8 || std::memcmp(buf.data(), kMagic, 8) != 0) {
    throw FormatError("'" + path.string() + "' is not a state file (bad magic)");
  }
  Reader r{buf, 8};
  if (r.get<std::uint8_t>() != kVersion) throw FormatError("unsupported state file version");
  if (r.get<std::uint32_t>() != kEndianTag) throw FormatError("state file endianness tag mismatch");
  StateFile s;
  s.bounds.ax = r.get<double>();
  s.bounds.bx = r.get<double>();
  s.bounds.ay = r.get<double>();
  s.bounds.by = r.get<double>();
  s.nx = r.get<std::int32_t>();
  s.ny = r.get<std::int32_t>();
  const std::uint8_t bc = r.get<std::uint8_t>();
  if (bc > 1) throw FormatError("state file: unknown boundary kind");
  s.bc = bc == 1 ? BoundaryKind::periodic : BoundaryKind::dirichlet;
  const std::uint64_t n = r.get<std::uint64_t>();
  s.t = r.get<double>();
  s.step = static_cast<long>(r.get<std::int64_t>());
  if (s.nx < 2 || s.ny < 2) throw FormatError("state file: invalid mesh size");
  const std::uint64_t expect = s.bc == BoundaryKind::periodic
                                   ? std::uint64_t(s.nx) * std::uint64_t(s.ny)
                                   : std::uint64_t(s.nx - 1) * std::uint64_t(s.ny - 1);
  if (n != expect) throw FormatError("state file: dof count does not match the mesh header");
  if (buf.size() - r.pos != 16 * n) throw FormatError("state file: payload size does not match the header");
  s.U.resize(n);
  for (auto& v : s.U) {
    const double re = r.get<double>();
    const double im = r.get<double>();
    v = {re, im};
  }
  return s;
}

StateFile load_state(const std::filesystem::path& path, const RectMesh& mesh) {
  StateFile s = load_state(path);
  if (!(s.bounds == mesh.bounds()) || s.nx != mesh.nx() || s.ny != mesh.ny() || s.bc != mesh.bc()) {
    throw FormatError("state file '" + path.string() + "' describes a different mesh (" + std::to_string(s.nx) +
                      "x" + std::to_string(s.ny) + " " + to_string(s.bc) + ")");
  }
  return s;
}

}  // namespace nlscn

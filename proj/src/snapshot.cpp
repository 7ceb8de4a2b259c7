#include "gencahn/snapshot.hpp"

#include <array>
#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <vector>

#include "gencahn/error.hpp"

namespace gencahn {

namespace {

constexpr std::array<char, 4> kMagic{'G', 'C', 'H', 'F'};

template <typename T>
void put_le(std::ostream& out, T value) {
  std::uint64_t bits = 0;
  if constexpr (std::is_same_v<T, double>) {
    bits = std::bit_cast<std::uint64_t>(value);
  } else {
    bits = value;
  }
  std::array<char, sizeof(T)> bytes{};
  for (std::size_t i = 0; i < sizeof(T); ++i) bytes[i] = static_cast<char>((bits >> (8 * i)) & 0xFFu);
  out.write(bytes.data(), bytes.size());
}

template <typename T>
T get_le(std::istream& in) {
  std::array<unsigned char, sizeof(T)> bytes{};
  in.read(reinterpret_cast<char*>(bytes.data()), bytes.size());
  if (!in) throw Error(ErrorKind::IoError, "truncated snapshot");
  std::uint64_t bits = 0;
  for (std::size_t i = 0; i < sizeof(T); ++i) bits |= std::uint64_t{bytes[i]} << (8 * i);
  if constexpr (std::is_same_v<T, double>) {
    return std::bit_cast<double>(bits);
  } else {
    return static_cast<T>(bits);
  }
}

}  // namespace

void write_snapshot(std::ostream& out, const Field& field) {
  const Grid& g = field.grid();
  out.write(kMagic.data(), kMagic.size());
  put_le<std::uint32_t>(out, kSnapshotVersion);
  put_le<std::uint32_t>(out, static_cast<std::uint32_t>(g.dim()));
  for (std::size_t a = 0; a < g.dim(); ++a) put_le<std::uint32_t>(out, static_cast<std::uint32_t>(g.cells(a)));
  for (std::size_t a = 0; a < g.dim(); ++a) put_le<double>(out, g.length(a));
  for (double v : field.values()) put_le<double>(out, v);
  if (!out) throw Error(ErrorKind::IoError, "failed writing snapshot");
}

void write_snapshot(const std::filesystem::path& path, const Field& field) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::IoError, "cannot open " + path.string());
  write_snapshot(out, field);
}

Field read_snapshot(std::istream& in) {
  std::array<char, 4> magic{};
  in.read(magic.data(), magic.size());
  if (!in || magic != kMagic) throw Error(ErrorKind::IoError, "bad snapshot magic");
  const auto version = get_le<std::uint32_t>(in);
  if (version != kSnapshotVersion) {
    throw Error(ErrorKind::IoError, "unsupported snapshot version " + std::to_string(version));
  }
  const auto dim = get_le<std::uint32_t>(in);
  if (dim != 1 && dim != 2) throw Error(ErrorKind::IoError, "snapshot dim must be 1 or 2");
  std::vector<std::size_t> cells(dim);
  std::vector<double> lengths(dim);
  for (auto& c : cells) c = get_le<std::uint32_t>(in);
  for (auto& l : lengths) l = get_le<double>(in);
  GridPtr grid = Grid::make(cells, lengths);
  std::vector<double> values(grid->size());
  for (auto& v : values) v = get_le<double>(in);
  return Field(grid, std::move(values));
}

Field read_snapshot(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::IoError, "cannot open " + path.string());
  return read_snapshot(in);
}

}  // namespace gencahn

#pragma once

// Little-endian binary helpers and atomic file replacement shared by the
// cache, tensor and checkpoint writers.

#include <bit>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <istream>
#include <ostream>
#include <string>
#include <type_traits>

#include "lobrep/error.hpp"

namespace lobrep::io {

static_assert(std::endian::native == std::endian::little,
              "binary formats assume a little-endian host");

template <typename T>
  requires std::is_trivially_copyable_v<T>
void put(std::ostream& out, const T& value) {
  out.write(reinterpret_cast<const char*>(&value), sizeof(T));
}

template <typename T>
  requires std::is_trivially_copyable_v<T>
T get(std::istream& in) {
  T value{};
  in.read(reinterpret_cast<char*>(&value), sizeof(T));
  if (!in) throw Error(Errc::CorruptTensor, "unexpected end of binary stream");
  return value;
}

/// Writes through a sibling temp file and renames it over `path`.
template <typename Fn>
void write_atomic(const std::filesystem::path& path, Fn&& body, bool binary = true) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, binary ? std::ios::binary | std::ios::trunc : std::ios::trunc);
    if (!out) throw Error(Errc::Io, "cannot open " + tmp.string() + " for writing");
    body(out);
    out.flush();
    if (!out) throw Error(Errc::Io, "write failed for " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw Error(Errc::Io, "rename to " + path.string() + " failed: " + ec.message());
}

inline std::ifstream open_in(const std::filesystem::path& path, bool binary = false) {
  std::ifstream in(path, binary ? std::ios::binary : std::ios::in);
  if (!in) throw Error(Errc::Io, "cannot open " + path.string());
  return in;
}

/// Shortest decimal form that parses back to the same double.
std::string format_double(double value);

}  // namespace lobrep::io

#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>

namespace lobrep {

enum class Errc {
  // book
  CrossedBook,
  UnknownLevel,
  OverCancel,
  OffTickGrid,
  InvalidEvent,
  InsufficientDepth,
  // ingest
  MalformedRow,
  InvalidSnapshot,
  DegenerateFeature,
  // represent
  NonUniformDepth,
  EmptyWindow,
  WrongScheme,
  MixedSignRow,
  // perturb
  ShapeMismatch,
  DepthUnknown,
  // label
  HorizonOutOfRange,
  // learn / eval
  DimMismatch,
  Diverged,
  EmptyInput,
  // plumbing
  InvalidArgument,
  Io,
  CorruptTensor,
};

std::string_view to_string(Errc code) noexcept;

/// Every failure in the library surfaces as an Error carrying a stable code.
/// `line` is the 1-based input row for parse errors, 0 otherwise.
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what, std::size_t line = 0);

  Errc code() const noexcept { return code_; }
  std::size_t line() const noexcept { return line_; }
  /// The message without the code and row prefix.
  const std::string& detail() const noexcept { return detail_; }

 private:
  Errc code_;
  std::size_t line_;
  std::string detail_;
};

/// True for errors caused by malformed input data (CLI exit code 2).
bool is_parse_error(Errc code) noexcept;

}  // namespace lobrep

#pragma once

#include <cstddef>
#include <cstdint>
#include <string_view>
#include <vector>

namespace lobrep {

/// Price expressed as an integer number of ticks.
using Tick = std::int64_t;
using Volume = double;

enum class Side : std::uint8_t { Ask, Bid };

std::string_view to_string(Side side) noexcept;

/// Converts between currency prices and integer tick counts.
///
/// When 1/tick_size is integral (0.01, 0.0001, ...) prices are produced by
/// dividing by that integer, which yields the correctly rounded decimal and
/// makes text round trips exact.
class TickGrid {
 public:
  TickGrid() = default;
  explicit TickGrid(double tick_size);

  double tick_size() const noexcept { return tick_size_; }

  /// Throws Error(OffTickGrid) when price is not a multiple of tick_size
  /// within 1e-9 relative tolerance.
  Tick to_tick(double price) const;
  double to_price(Tick tick) const noexcept;
  bool on_grid(double price) const noexcept;

 private:
  double tick_size_ = 0.01;
  double ticks_per_unit_ = 100.0;
  bool divide_ = true;
};

struct TickLevel {
  Tick price = 0;
  Volume volume = 0;

  friend bool operator==(const TickLevel&, const TickLevel&) = default;
};

/// All known levels of a book at one instant. Asks ascend, bids descend.
/// For snapshot-only sources this is just the visible levels.
struct BookImage {
  std::vector<TickLevel> asks;
  std::vector<TickLevel> bids;

  friend bool operator==(const BookImage&, const BookImage&) = default;
};

struct Level {
  double price = 0;
  Volume volume = 0;

  friend bool operator==(const Level&, const Level&) = default;
};

/// Top-L aggregated view: level i of each side at index i-1.
struct LevelSnapshot {
  std::size_t t = 0;
  std::vector<Level> asks;
  std::vector<Level> bids;

  std::size_t levels() const noexcept { return asks.size(); }

  friend bool operator==(const LevelSnapshot&, const LevelSnapshot&) = default;
};

/// (p_a^1 + p_b^1) / 2.
double mid_price(const LevelSnapshot& snapshot);

/// Throws Error(InvalidSnapshot) describing the first violated invariant.
void validate(const LevelSnapshot& snapshot);
void validate(const BookImage& image);

/// Top-L view of an image in currency units. Throws InsufficientDepth.
LevelSnapshot top_levels(const BookImage& image, std::size_t levels,
                         const TickGrid& grid, std::size_t t = 0);

/// Mid of an image in ticks, possibly a half tick.
double mid_ticks(const BookImage& image);

}  // namespace lobrep

#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string_view>

#include "lobrep/types.hpp"

namespace lobrep {

enum class EventKind : std::uint8_t { Place, Cancel, Execute };

std::string_view to_string(EventKind kind) noexcept;

struct BookEvent {
  EventKind kind = EventKind::Place;
  Side side = Side::Ask;
  Tick price = 0;
  Volume volume = 0;

  friend bool operator==(const BookEvent&, const BookEvent&) = default;
};

/// Aggregated (level-2) limit order book keyed by integer tick.
///
/// Invariants: every stored volume is > 0, and best bid < best ask.
/// apply() has the strong guarantee: a rejected event leaves the book as it was.
class BookState {
 public:
  using AskMap = std::map<Tick, Volume>;
  using BidMap = std::map<Tick, Volume, std::greater<>>;

  BookState(double tick_size, Volume min_order_size);

  /// Rebuilds a book from an image, validating every level.
  static BookState from_image(const BookImage& image, double tick_size,
                              Volume min_order_size);

  void apply(const BookEvent& event);

  const TickGrid& grid() const noexcept { return grid_; }
  double tick_size() const noexcept { return grid_.tick_size(); }
  Volume min_order_size() const noexcept { return min_order_size_; }
  std::uint64_t sequence() const noexcept { return sequence_; }

  const AskMap& asks() const noexcept { return asks_; }
  const BidMap& bids() const noexcept { return bids_; }

  std::optional<Tick> best_ask() const noexcept;
  std::optional<Tick> best_bid() const noexcept;
  std::size_t depth(Side side) const noexcept;
  Volume volume_at(Side side, Tick price) const noexcept;

  /// Top-L levels per side. Throws InsufficientDepth.
  LevelSnapshot snapshot(std::size_t levels) const;

  /// Every level, or the best `max_depth` per side when max_depth > 0.
  BookImage image(std::size_t max_depth = 0) const;

  friend bool operator==(const BookState& a, const BookState& b) {
    return a.asks_ == b.asks_ && a.bids_ == b.bids_;
  }

 private:
  TickGrid grid_;
  Volume min_order_size_;
  AskMap asks_;
  BidMap bids_;
  std::uint64_t sequence_ = 0;
};

/// Value-semantics form of BookState::apply.
BookState apply_event(BookState state, const BookEvent& event);

/// Builds a book event from a currency price, checking the tick grid.
BookEvent make_event(EventKind kind, Side side, double price, Volume volume,
                     const TickGrid& grid);

}  // namespace lobrep

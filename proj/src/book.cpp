#include "lobrep/book.hpp"

#include <cmath>
#include <string>

#include "lobrep/error.hpp"

namespace lobrep {

std::string_view to_string(EventKind kind) noexcept {
  switch (kind) {
    case EventKind::Place: return "place";
    case EventKind::Cancel: return "cancel";
    case EventKind::Execute: return "execute";
  }
  return "unknown";
}

BookState::BookState(double tick_size, Volume min_order_size)
    : grid_(tick_size), min_order_size_(min_order_size) {
  if (!(min_order_size > 0) || !std::isfinite(min_order_size)) {
    throw Error(Errc::InvalidArgument, "minimum order size must be positive");
  }
}

BookState BookState::from_image(const BookImage& image, double tick_size,
                                Volume min_order_size) {
  validate(image);
  BookState state(tick_size, min_order_size);
  for (const auto& level : image.asks) state.asks_.emplace(level.price, level.volume);
  for (const auto& level : image.bids) state.bids_.emplace(level.price, level.volume);
  return state;
}

namespace {

template <typename Map>
void remove_volume(Map& side, const BookEvent& ev) {
  auto it = side.find(ev.price);
  if (it == side.end()) {
    throw Error(Errc::UnknownLevel, std::string(to_string(ev.kind)) + " at empty " +
                                        std::string(to_string(ev.side)) + " tick " +
                                        std::to_string(ev.price));
  }
  if (ev.volume > it->second) {
    throw Error(Errc::OverCancel, std::string(to_string(ev.kind)) + " of " +
                                      std::to_string(ev.volume) + " exceeds resting " +
                                      std::to_string(it->second));
  }
  if (ev.volume == it->second) {
    side.erase(it);
  } else {
    it->second -= ev.volume;
  }
}

}  // namespace

void BookState::apply(const BookEvent& ev) {
  if (!(ev.volume > 0) || !std::isfinite(ev.volume) || ev.volume < min_order_size_) {
    throw Error(Errc::InvalidEvent, "event volume " + std::to_string(ev.volume) +
                                        " below minimum order size " +
                                        std::to_string(min_order_size_));
  }
  switch (ev.kind) {
    case EventKind::Place:
      if (ev.side == Side::Ask) {
        if (!bids_.empty() && ev.price <= bids_.begin()->first) {
          throw Error(Errc::CrossedBook, "ask at tick " + std::to_string(ev.price) +
                                             " would cross best bid " +
                                             std::to_string(bids_.begin()->first));
        }
        asks_[ev.price] += ev.volume;
      } else {
        if (!asks_.empty() && ev.price >= asks_.begin()->first) {
          throw Error(Errc::CrossedBook, "bid at tick " + std::to_string(ev.price) +
                                             " would cross best ask " +
                                             std::to_string(asks_.begin()->first));
        }
        bids_[ev.price] += ev.volume;
      }
      break;
    case EventKind::Cancel:
    case EventKind::Execute:
      if (ev.side == Side::Ask) {
        remove_volume(asks_, ev);
      } else {
        remove_volume(bids_, ev);
      }
      break;
  }
  ++sequence_;
}

std::optional<Tick> BookState::best_ask() const noexcept {
  if (asks_.empty()) return std::nullopt;
  return asks_.begin()->first;
}

std::optional<Tick> BookState::best_bid() const noexcept {
  if (bids_.empty()) return std::nullopt;
  return bids_.begin()->first;
}

std::size_t BookState::depth(Side side) const noexcept {
  return side == Side::Ask ? asks_.size() : bids_.size();
}

Volume BookState::volume_at(Side side, Tick price) const noexcept {
  if (side == Side::Ask) {
    auto it = asks_.find(price);
    return it == asks_.end() ? 0.0 : it->second;
  }
  auto it = bids_.find(price);
  return it == bids_.end() ? 0.0 : it->second;
}

LevelSnapshot BookState::snapshot(std::size_t levels) const {
  if (levels == 0 || asks_.size() < levels || bids_.size() < levels) {
    throw Error(Errc::InsufficientDepth,
                "snapshot needs " + std::to_string(levels) + " levels per side, have " +
                    std::to_string(asks_.size()) + " asks and " +
                    std::to_string(bids_.size()) + " bids");
  }
  LevelSnapshot s;
  s.t = sequence_;
  s.asks.reserve(levels);
  s.bids.reserve(levels);
  auto a = asks_.begin();
  auto b = bids_.begin();
  for (std::size_t i = 0; i < levels; ++i, ++a, ++b) {
    s.asks.push_back({grid_.to_price(a->first), a->second});
    s.bids.push_back({grid_.to_price(b->first), b->second});
  }
  return s;
}

BookImage BookState::image(std::size_t max_depth) const {
  BookImage img;
  const std::size_t na = max_depth == 0 ? asks_.size() : std::min(max_depth, asks_.size());
  const std::size_t nb = max_depth == 0 ? bids_.size() : std::min(max_depth, bids_.size());
  img.asks.reserve(na);
  img.bids.reserve(nb);
  for (auto it = asks_.begin(); img.asks.size() < na; ++it) {
    img.asks.push_back({it->first, it->second});
  }
  for (auto it = bids_.begin(); img.bids.size() < nb; ++it) {
    img.bids.push_back({it->first, it->second});
  }
  return img;
}

BookState apply_event(BookState state, const BookEvent& event) {
  state.apply(event);
  return state;
}

BookEvent make_event(EventKind kind, Side side, double price, Volume volume,
                     const TickGrid& grid) {
  return BookEvent{kind, side, grid.to_tick(price), volume};
}

}  // namespace lobrep

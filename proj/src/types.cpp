#include "lobrep/types.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "lobrep/error.hpp"

namespace lobrep {

std::string_view to_string(Errc code) noexcept {
  switch (code) {
    case Errc::CrossedBook: return "CrossedBook";
    case Errc::UnknownLevel: return "UnknownLevel";
    case Errc::OverCancel: return "OverCancel";
    case Errc::OffTickGrid: return "OffTickGrid";
    case Errc::InvalidEvent: return "InvalidEvent";
    case Errc::InsufficientDepth: return "InsufficientDepth";
    case Errc::MalformedRow: return "MalformedRow";
    case Errc::InvalidSnapshot: return "InvalidSnapshot";
    case Errc::DegenerateFeature: return "DegenerateFeature";
    case Errc::NonUniformDepth: return "NonUniformDepth";
    case Errc::EmptyWindow: return "EmptyWindow";
    case Errc::WrongScheme: return "WrongScheme";
    case Errc::MixedSignRow: return "MixedSignRow";
    case Errc::ShapeMismatch: return "ShapeMismatch";
    case Errc::DepthUnknown: return "DepthUnknown";
    case Errc::HorizonOutOfRange: return "HorizonOutOfRange";
    case Errc::DimMismatch: return "DimMismatch";
    case Errc::Diverged: return "Diverged";
    case Errc::EmptyInput: return "EmptyInput";
    case Errc::InvalidArgument: return "InvalidArgument";
    case Errc::Io: return "Io";
    case Errc::CorruptTensor: return "CorruptTensor";
  }
  return "Unknown";
}

namespace {

std::string format_error(Errc code, const std::string& what, std::size_t line) {
  std::ostringstream os;
  os << to_string(code);
  if (line > 0) os << " at row " << line;
  os << ": " << what;
  return os.str();
}

}  // namespace

Error::Error(Errc code, const std::string& what, std::size_t line)
    : std::runtime_error(format_error(code, what, line)),
      code_(code),
      line_(line),
      detail_(what) {}

bool is_parse_error(Errc code) noexcept {
  switch (code) {
    case Errc::MalformedRow:
    case Errc::InvalidSnapshot:
    case Errc::CrossedBook:
    case Errc::UnknownLevel:
    case Errc::OverCancel:
    case Errc::OffTickGrid:
    case Errc::InvalidEvent:
      return true;
    default:
      return false;
  }
}

std::string_view to_string(Side side) noexcept {
  return side == Side::Ask ? "ask" : "bid";
}

TickGrid::TickGrid(double tick_size) : tick_size_(tick_size) {
  if (!(tick_size > 0) || !std::isfinite(tick_size)) {
    throw Error(Errc::InvalidArgument, "tick size must be positive");
  }
  const double inv = 1.0 / tick_size;
  const double rounded = std::round(inv);
  divide_ = rounded >= 1.0 && std::abs(inv - rounded) <= 1e-9 * rounded;
  ticks_per_unit_ = divide_ ? rounded : inv;
}

Tick TickGrid::to_tick(double price) const {
  if (!std::isfinite(price)) {
    throw Error(Errc::OffTickGrid, "non-finite price");
  }
  const double scaled = divide_ ? price * ticks_per_unit_ : price / tick_size_;
  const double nearest = std::round(scaled);
  const double tolerance = 1e-9 * std::max(1.0, std::abs(scaled));
  if (std::abs(scaled - nearest) > tolerance) {
    std::ostringstream os;
    os.precision(17);
    os << "price " << price << " is not a multiple of tick " << tick_size_;
    throw Error(Errc::OffTickGrid, os.str());
  }
  return static_cast<Tick>(nearest);
}

double TickGrid::to_price(Tick tick) const noexcept {
  return divide_ ? static_cast<double>(tick) / ticks_per_unit_
                 : static_cast<double>(tick) * tick_size_;
}

bool TickGrid::on_grid(double price) const noexcept {
  try {
    (void)to_tick(price);
    return true;
  } catch (const Error&) {
    return false;
  }
}

double mid_price(const LevelSnapshot& snapshot) {
  if (snapshot.asks.empty() || snapshot.bids.empty()) {
    throw Error(Errc::InsufficientDepth, "mid price of an empty side");
  }
  return (snapshot.asks.front().price + snapshot.bids.front().price) / 2.0;
}

void validate(const LevelSnapshot& s) {
  auto fail = [&](const std::string& what) {
    throw Error(Errc::InvalidSnapshot, what);
  };
  if (s.asks.empty() || s.asks.size() != s.bids.size()) {
    fail("sides must be non-empty and of equal depth");
  }
  for (std::size_t i = 0; i < s.asks.size(); ++i) {
    if (!(s.asks[i].volume > 0) || !(s.bids[i].volume > 0)) {
      fail("non-positive volume at level " + std::to_string(i + 1));
    }
    if (i > 0 && !(s.asks[i].price > s.asks[i - 1].price)) {
      fail("ask prices not strictly ascending at level " + std::to_string(i + 1));
    }
    if (i > 0 && !(s.bids[i].price < s.bids[i - 1].price)) {
      fail("bid prices not strictly descending at level " + std::to_string(i + 1));
    }
  }
  if (!(s.asks.front().price > s.bids.front().price)) {
    fail("crossed or locked book: best ask <= best bid");
  }
}

void validate(const BookImage& image) {
  auto fail = [&](const std::string& what) {
    throw Error(Errc::InvalidSnapshot, what);
  };
  for (std::size_t i = 0; i < image.asks.size(); ++i) {
    if (!(image.asks[i].volume > 0)) fail("non-positive ask volume");
    if (i > 0 && image.asks[i].price <= image.asks[i - 1].price) {
      fail("ask ticks not strictly ascending");
    }
  }
  for (std::size_t i = 0; i < image.bids.size(); ++i) {
    if (!(image.bids[i].volume > 0)) fail("non-positive bid volume");
    if (i > 0 && image.bids[i].price >= image.bids[i - 1].price) {
      fail("bid ticks not strictly descending");
    }
  }
  if (!image.asks.empty() && !image.bids.empty() &&
      image.asks.front().price <= image.bids.front().price) {
    fail("crossed or locked book: best ask <= best bid");
  }
}

LevelSnapshot top_levels(const BookImage& image, std::size_t levels,
                         const TickGrid& grid, std::size_t t) {
  if (levels == 0 || image.asks.size() < levels || image.bids.size() < levels) {
    throw Error(Errc::InsufficientDepth,
                "need " + std::to_string(levels) + " levels per side, have " +
                    std::to_string(image.asks.size()) + " asks and " +
                    std::to_string(image.bids.size()) + " bids");
  }
  LevelSnapshot s;
  s.t = t;
  s.asks.reserve(levels);
  s.bids.reserve(levels);
  for (std::size_t i = 0; i < levels; ++i) {
    s.asks.push_back({grid.to_price(image.asks[i].price), image.asks[i].volume});
    s.bids.push_back({grid.to_price(image.bids[i].price), image.bids[i].volume});
  }
  return s;
}

double mid_ticks(const BookImage& image) {
  if (image.asks.empty() || image.bids.empty()) {
    throw Error(Errc::InsufficientDepth, "mid of an empty side");
  }
  return 0.5 * static_cast<double>(image.asks.front().price + image.bids.front().price);
}

}  // namespace lobrep

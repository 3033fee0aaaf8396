#include "lobrep/perturb.hpp"

#include <cmath>
#include <string>

#include "lobrep/error.hpp"
#include "parallel.hpp"

namespace lobrep {

std::string_view to_string(Paradigm paradigm) noexcept {
  switch (paradigm) {
    case Paradigm::None: return "none";
    case Paradigm::Ask: return "ask";
    case Paradigm::Bid: return "bid";
    case Paradigm::Both: return "both";
  }
  return "unknown";
}

Paradigm parse_paradigm(std::string_view name) {
  for (auto p : kAllParadigms) {
    if (name == to_string(p)) return p;
  }
  throw Error(Errc::InvalidArgument, "unknown paradigm '" + std::string(name) + "'");
}

namespace {

bool touches(Paradigm p, Side side) {
  return p == Paradigm::Both || (p == Paradigm::Ask && side == Side::Ask) ||
         (p == Paradigm::Bid && side == Side::Bid);
}

void check_spec(const PerturbationSpec& spec) {
  if (spec.cap_level == 0) throw Error(Errc::InvalidArgument, "cap level must be resolved");
  if (!(spec.order_size > 0) || !std::isfinite(spec.order_size)) {
    throw Error(Errc::InvalidArgument, "order size must be positive");
  }
}

// Fill one side of an image. `levels` is ordered best first and `step` is +1
// for asks (prices ascend) and -1 for bids.
std::vector<TickLevel> fill_side(const std::vector<TickLevel>& levels, std::size_t cap_level,
                                 Volume size, Tick step) {
  if (levels.size() < cap_level) {
    throw Error(Errc::InsufficientDepth, "perturbation needs " + std::to_string(cap_level) +
                                             " levels, side has " +
                                             std::to_string(levels.size()));
  }
  const Tick best = levels.front().price;
  const Tick cap = levels[cap_level - 1].price;
  const auto span = static_cast<std::size_t>((cap - best) * step);
  std::vector<TickLevel> out;
  out.reserve(levels.size() + span);
  std::size_t next = 0;
  for (Tick p = best; p != cap + step; p += step) {
    if (next < levels.size() && levels[next].price == p) {
      out.push_back(levels[next++]);
    } else {
      out.push_back({p, size});
    }
  }
  out.insert(out.end(), levels.begin() + static_cast<std::ptrdiff_t>(next), levels.end());
  return out;
}

}  // namespace

BookState perturb_book(const BookState& state, const PerturbationSpec& spec) {
  if (spec.paradigm == Paradigm::None) return state;
  check_spec(spec);
  if (spec.order_size < state.min_order_size()) {
    throw Error(Errc::InvalidArgument, "perturbation orders below the minimum order size");
  }
  if (state.depth(Side::Ask) < spec.cap_level || state.depth(Side::Bid) < spec.cap_level) {
    throw Error(Errc::InsufficientDepth, "book shallower than the perturbation cap level");
  }
  BookState out = state;
  if (touches(spec.paradigm, Side::Ask)) {
    const Tick best = state.asks().begin()->first;
    const Tick cap = std::next(state.asks().begin(), static_cast<std::ptrdiff_t>(spec.cap_level - 1))->first;
    for (Tick p = best + 1; p < cap; ++p) {
      if (state.volume_at(Side::Ask, p) == 0) {
        out.apply({EventKind::Place, Side::Ask, p, spec.order_size});
      }
    }
  }
  if (touches(spec.paradigm, Side::Bid)) {
    const Tick best = state.bids().begin()->first;
    const Tick cap = std::next(state.bids().begin(), static_cast<std::ptrdiff_t>(spec.cap_level - 1))->first;
    for (Tick p = best - 1; p > cap; --p) {
      if (state.volume_at(Side::Bid, p) == 0) {
        out.apply({EventKind::Place, Side::Bid, p, spec.order_size});
      }
    }
  }
  return out;
}

BookImage perturb_image(const BookImage& image, const PerturbationSpec& spec) {
  if (spec.paradigm == Paradigm::None) return image;
  check_spec(spec);
  BookImage out;
  out.asks = touches(spec.paradigm, Side::Ask)
                 ? fill_side(image.asks, spec.cap_level, spec.order_size, +1)
                 : image.asks;
  out.bids = touches(spec.paradigm, Side::Bid)
                 ? fill_side(image.bids, spec.cap_level, spec.order_size, -1)
                 : image.bids;
  return out;
}

SnapshotSeries perturb_series(const SnapshotSeries& series, PerturbationSpec spec, Exec exec) {
  if (spec.cap_level == 0) spec.cap_level = series.levels;
  if (spec.paradigm == Paradigm::None) return series;
  if (series.depth_truncated && !spec.allow_truncated) {
    throw Error(Errc::DepthUnknown,
                "series holds only its visible levels; deeper levels after perturbation are unknown");
  }
  if (spec.order_size < series.min_order_size) {
    throw Error(Errc::InvalidArgument, "perturbation orders below the minimum order size");
  }
  SnapshotSeries out = series;
  if (exec == Exec::Serial) {
    for (std::size_t i = 0; i < series.size(); ++i) {
      const auto book = BookState::from_image(series.images[i], series.grid.tick_size(),
                                              series.min_order_size);
      out.images[i] = perturb_book(book, spec).image();
    }
  } else {
    detail::parallel_for(series.size(), [&](std::size_t i) {
      out.images[i] = perturb_image(series.images[i], spec);
    });
  }
  return out;
}

DisplacementReport displacement(std::span<const BookImage> before,
                                std::span<const BookImage> after, const TickGrid& grid,
                                std::size_t levels, const WindowConfig& cfg) {
  if (before.size() != after.size() || before.empty()) {
    throw Error(Errc::ShapeMismatch, "windows must be non-empty and equally long");
  }
  DisplacementReport report;

  double sq = 0;
  for (std::size_t t = 0; t < before.size(); ++t) {
    const auto a = top_levels(before[t], levels, grid);
    const auto b = top_levels(after[t], levels, grid);
    for (std::size_t i = 0; i < levels; ++i) {
      const double d[4] = {a.asks[i].price - b.asks[i].price, a.asks[i].volume - b.asks[i].volume,
                           a.bids[i].price - b.bids[i].price, a.bids[i].volume - b.bids[i].volume};
      for (double x : d) sq += x * x;
    }
  }
  report.l2_level_based = std::sqrt(sq);

  const auto mw_before = build_mw(before, grid, cfg);
  const auto mw_after = build_mw(after, grid, cfg);
  sq = 0;
  for (std::size_t i = 0; i < mw_before.data.data.size(); ++i) {
    const double d = mw_after.data.data[i] - mw_before.data.data[i];
    sq += d * d;
    report.linf_mw = std::max(report.linf_mw, std::abs(d));
  }
  report.l2_mw = std::sqrt(sq);

  auto total = [](std::span<const BookImage> window) {
    Volume v = 0;
    for (const auto& img : window) {
      for (const auto& l : img.asks) v += l.volume;
      for (const auto& l : img.bids) v += l.volume;
    }
    return v;
  };
  report.total_added_volume = total(after) - total(before);
  report.mid_before = mid_price(top_levels(before.back(), 1, grid));
  report.mid_after = mid_price(top_levels(after.back(), 1, grid));
  return report;
}

}  // namespace lobrep

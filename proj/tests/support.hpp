#pragma once

// Shared fixtures and oracles for the unit and acceptance suites. The oracles
// are deliberately naive: unsorted vectors, linear scans, sort on demand.

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include <unistd.h>

#include "lobrep/book.hpp"
#include "lobrep/error.hpp"
#include "lobrep/ingest.hpp"
#include "lobrep/types.hpp"

namespace lobrep::testing {

/// Aggregated book kept as unsorted (price, volume) pairs.
struct NaiveBook {
  std::vector<TickLevel> asks;
  std::vector<TickLevel> bids;

  std::vector<TickLevel>& side(Side s) { return s == Side::Ask ? asks : bids; }
  const std::vector<TickLevel>& side(Side s) const { return s == Side::Ask ? asks : bids; }

  TickLevel* find(Side s, Tick price) {
    for (auto& l : side(s)) {
      if (l.price == price) return &l;
    }
    return nullptr;
  }

  bool empty(Side s) const { return side(s).empty(); }

  Tick best(Side s) const {
    Tick b = side(s).front().price;
    for (const auto& l : side(s)) b = s == Side::Ask ? std::min(b, l.price) : std::max(b, l.price);
    return b;
  }

  /// Mirrors the book rules without sharing any code with BookState:
  /// the error an event must raise, or nullopt when it is valid.
  std::optional<Errc> reject(const BookEvent& e, Volume min_size) {
    if (!(e.volume > 0) || e.volume < min_size) return Errc::InvalidEvent;
    const Side other = e.side == Side::Ask ? Side::Bid : Side::Ask;
    if (e.kind == EventKind::Place) {
      if (empty(other)) return std::nullopt;
      const bool ok = e.side == Side::Ask ? e.price > best(other) : e.price < best(other);
      return ok ? std::nullopt : std::optional(Errc::CrossedBook);
    }
    // Executions remove volume exactly like cancellations.
    auto* l = find(e.side, e.price);
    if (!l) return Errc::UnknownLevel;
    if (e.volume > l->volume) return Errc::OverCancel;
    return std::nullopt;
  }

  void apply(const BookEvent& e) {
    auto& levels = side(e.side);
    if (e.kind == EventKind::Place) {
      if (auto* l = find(e.side, e.price)) l->volume += e.volume;
      else levels.push_back({e.price, e.volume});
      return;
    }
    auto* l = find(e.side, e.price);
    l->volume -= e.volume;
    if (l->volume == 0) levels.erase(levels.begin() + (l - levels.data()));
  }

  BookImage image() const {
    BookImage img{asks, bids};
    std::sort(img.asks.begin(), img.asks.end(), [](auto a, auto b) { return a.price < b.price; });
    std::sort(img.bids.begin(), img.bids.end(), [](auto a, auto b) { return a.price > b.price; });
    return img;
  }
};

/// A random event that may or may not be valid against `book`. Integer
/// volumes keep every sum exact.
inline BookEvent random_event(std::mt19937_64& rng, const NaiveBook& book, Tick centre) {
  std::uniform_int_distribution<int> kind(0, 9);
  std::uniform_int_distribution<int> coin(0, 1);
  std::uniform_int_distribution<int> vol(1, 20);
  std::uniform_int_distribution<Tick> off(-12, 12);
  BookEvent e;
  const int k = kind(rng);
  e.kind = k < 6 ? EventKind::Place : k < 9 ? EventKind::Cancel : EventKind::Execute;
  e.side = coin(rng) ? Side::Ask : Side::Bid;
  e.volume = vol(rng);
  const auto& levels = book.side(e.side);
  if (e.kind != EventKind::Place && !levels.empty() && kind(rng) < 8) {
    // Mostly target resting levels so removals get exercised.
    const auto& l = levels[std::uniform_int_distribution<std::size_t>(0, levels.size() - 1)(rng)];
    e.price = kind(rng) < 3 ? book.best(e.side) : l.price;
    if (kind(rng) < 4) e.volume = l.volume;
  } else {
    e.price = centre + off(rng) + (e.side == Side::Ask ? 3 : -3);
  }
  return e;
}

/// `count` events that are all valid in sequence.
inline std::vector<BookEvent> random_valid_events(std::mt19937_64& rng, std::size_t count,
                                                  Tick centre = 1000) {
  NaiveBook book;
  std::vector<BookEvent> out;
  while (out.size() < count) {
    const auto e = random_event(rng, book, centre);
    if (book.reject(e, 1)) continue;
    book.apply(e);
    out.push_back(e);
  }
  return out;
}

/// Book image with random gaps between levels, `depth` levels per side.
inline BookImage random_image(std::mt19937_64& rng, std::size_t depth, Tick mid = 1000,
                              double gap_prob = 0.4) {
  std::bernoulli_distribution gap(gap_prob);
  std::uniform_int_distribution<int> vol(1, 100);
  std::uniform_int_distribution<Tick> half_spread(1, 3);
  BookImage img;
  Tick a = mid + half_spread(rng);
  Tick b = mid - half_spread(rng);
  for (std::size_t i = 0; i < depth; ++i) {
    while (gap(rng)) ++a;
    while (gap(rng)) --b;
    img.asks.push_back({a++, static_cast<Volume>(vol(rng))});
    img.bids.push_back({b--, static_cast<Volume>(vol(rng))});
  }
  return img;
}

/// Series of `count` random images on a 0.01 grid; the mid drifts slowly.
inline SnapshotSeries random_series(std::mt19937_64& rng, std::size_t count, std::size_t levels,
                                    std::size_t depth, std::uint32_t days = 1) {
  SnapshotSeries s;
  s.grid = TickGrid(0.01);
  s.levels = levels;
  std::uniform_int_distribution<int> step(-1, 1);
  Tick mid = 1000;
  for (std::size_t i = 0; i < count; ++i) {
    mid += step(rng);
    s.index.push_back(i);
    s.day.push_back(static_cast<std::uint32_t>(i * days / count));
    s.images.push_back(random_image(rng, depth, mid));
  }
  return s;
}

/// Ten-level book with mid 10.00, spread 0.04, tick 0.01 and the empty
/// ticks 10.03, 10.06, 10.07, 10.09, 10.10, 10.11 on the ask side and
/// 9.96, 9.94, 9.91, 9.89 on the bid side.
inline BookImage example_book() {
  const Tick asks[] = {1002, 1004, 1005, 1008, 1012, 1013, 1014, 1015, 1016, 1017};
  const Volume ask_vol[] = {30, 55, 20, 80, 45, 60, 25, 70, 40, 35};
  const Tick bids[] = {998, 997, 995, 993, 992, 990, 988, 987, 986, 985};
  const Volume bid_vol[] = {40, 25, 65, 30, 50, 20, 75, 35, 45, 60};
  BookImage img;
  for (int i = 0; i < 10; ++i) {
    img.asks.push_back({asks[i], ask_vol[i]});
    img.bids.push_back({bids[i], bid_vol[i]});
  }
  return img;
}

/// Unique scratch directory removed on destruction.
class TempDir {
 public:
  TempDir() {
    static std::atomic<int> counter{0};
    path_ = std::filesystem::temp_directory_path() /
            ("lobrep_test_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

}  // namespace lobrep::testing

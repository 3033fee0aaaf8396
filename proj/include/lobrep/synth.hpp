#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "lobrep/book.hpp"
#include "lobrep/ingest.hpp"

namespace lobrep {

/// Event-stream generator for a sparse, small-tick book whose order flow is
/// driven by a hidden buy/sell pressure regime. Book imbalance reveals the
/// regime, and the regime moves the mid, so the stream carries a learnable
/// price-movement signal.
struct SynthConfig {
  std::uint64_t seed = 7;
  std::uint32_t days = 10;
  std::size_t events_per_day = 40000;
  double tick_size = 0.01;
  Volume min_order_size = 1;
  Tick start_tick = 1000;
  std::size_t initial_levels = 30;    // per side
  std::size_t min_depth = 25;         // refill deep levels below this
  double empty_tick_prob = 0.35;      // initial book sparsity
  double regime_switch_prob = 0.002;  // per event
  double place_prob = 0.50;
  double cancel_prob = 0.30;          // remainder executes
  double join_prob = 0.50;            // placement joins an existing level
  double flow_tilt = 0.30;            // execution side bias under pressure
  double placement_tilt = 0.20;       // placement side bias under pressure
  Volume min_volume = 5;
  Volume max_volume = 100;
};

/// Events for one day; every event is valid against the book it builds.
std::vector<BookEvent> generate_day(const SynthConfig& cfg, std::uint32_t day);

/// All days replayed and concatenated, tagged by day.
SnapshotSeries generate_series(const SynthConfig& cfg, const ReplayOptions& replay);

/// Writes day_XX.csv event files into `dir`; returns their paths in order.
std::vector<std::filesystem::path> write_corpus(const SynthConfig& cfg,
                                                const std::filesystem::path& dir);

}  // namespace lobrep

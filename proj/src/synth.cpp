#include "lobrep/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <iterator>
#include <random>

#include "lobrep/error.hpp"

namespace lobrep {

namespace {

class DayGenerator {
 public:
  DayGenerator(const SynthConfig& cfg, std::uint32_t day)
      : cfg_(cfg), book_(cfg.tick_size, cfg.min_order_size) {
    std::seed_seq seq{static_cast<std::uint32_t>(cfg.seed), static_cast<std::uint32_t>(cfg.seed >> 32),
                      day, 0x5eedu};
    rng_.seed(seq);
  }

  std::vector<BookEvent> run() {
    seed_book();
    while (out_.size() < cfg_.events_per_day) step();
    return std::move(out_);
  }

 private:
  void emit(const BookEvent& ev) {
    book_.apply(ev);
    out_.push_back(ev);
  }

  Volume draw_volume() {
    std::uniform_int_distribution<long> d(static_cast<long>(cfg_.min_volume),
                                          static_cast<long>(cfg_.max_volume));
    return static_cast<Volume>(d(rng_));
  }

  Tick draw_distance() { return std::geometric_distribution<Tick>(0.25)(rng_); }

  bool coin(double p) { return std::bernoulli_distribution(std::clamp(p, 0.0, 1.0))(rng_); }

  void seed_book() {
    Tick ask = cfg_.start_tick + 1;
    Tick bid = cfg_.start_tick - 1;
    for (std::size_t placed = 0; placed < cfg_.initial_levels;) {
      if (!coin(cfg_.empty_tick_prob)) {
        emit({EventKind::Place, Side::Ask, ask, draw_volume()});
        ++placed;
      }
      ++ask;
    }
    for (std::size_t placed = 0; placed < cfg_.initial_levels;) {
      if (!coin(cfg_.empty_tick_prob)) {
        emit({EventKind::Place, Side::Bid, bid, draw_volume()});
        ++placed;
      }
      --bid;
    }
  }

  /// Price of a uniformly chosen level among the best `count` of a side.
  Tick level_price(Side side, std::size_t count) {
    const auto k = static_cast<std::ptrdiff_t>(
        std::uniform_int_distribution<std::size_t>(0, count - 1)(rng_));
    return side == Side::Ask ? std::next(book_.asks().begin(), k)->first
                             : std::next(book_.bids().begin(), k)->first;
  }

  /// Volume to remove from a level: all of it, or a partial amount that
  /// respects the minimum order size.
  Volume removal(Volume resting, double full_prob) {
    const auto min = cfg_.min_order_size;
    if (resting <= 2 * min || coin(full_prob)) return resting;
    std::uniform_int_distribution<long> d(static_cast<long>(min),
                                          static_cast<long>(resting - min));
    return static_cast<Volume>(d(rng_));
  }

  void step() {
    if (coin(cfg_.regime_switch_prob)) {
      const int shift = std::uniform_int_distribution<int>(1, 2)(rng_);
      pressure_ = (pressure_ + 1 + shift) % 3 - 1;
    }
    for (Side side : {Side::Ask, Side::Bid}) {
      if (book_.depth(side) < cfg_.min_depth) {
        const auto reach = static_cast<Tick>(2 * cfg_.min_depth);
        const Tick gap = std::uniform_int_distribution<Tick>(1, reach)(rng_);
        const Tick price = side == Side::Ask ? *book_.best_ask() + gap : *book_.best_bid() - gap;
        emit({EventKind::Place, side, price, draw_volume()});
        return;
      }
    }

    const double z = pressure_;
    const double u = std::uniform_real_distribution<double>(0.0, 1.0)(rng_);
    const Tick best_ask = *book_.best_ask();
    const Tick best_bid = *book_.best_bid();

    if (u < cfg_.place_prob) {
      const Side side = coin(0.5 + cfg_.placement_tilt * z) ? Side::Bid : Side::Ask;
      Tick price;
      if (coin(cfg_.join_prob)) {
        price = level_price(side, std::min<std::size_t>(10, book_.depth(side)));
      } else {
        // Distance is measured from the opposite quote, so wide spreads refill.
        const Tick d = 1 + draw_distance();
        price = side == Side::Ask ? best_bid + d : best_ask - d;
      }
      emit({EventKind::Place, side, price, draw_volume()});
    } else if (u < cfg_.place_prob + cfg_.cancel_prob) {
      const Side side = coin(0.5) ? Side::Ask : Side::Bid;
      const Tick price = level_price(side, book_.depth(side));
      emit({EventKind::Cancel, side, price, removal(book_.volume_at(side, price), 0.3)});
    } else {
      // A buy consumes the ask side; pressure tilts the aggressor.
      const Side side = coin(0.5 + cfg_.flow_tilt * z) ? Side::Ask : Side::Bid;
      const Tick price = side == Side::Ask ? best_ask : best_bid;
      emit({EventKind::Execute, side, price, removal(book_.volume_at(side, price), 0.5)});
    }
  }

  const SynthConfig& cfg_;
  BookState book_;
  std::mt19937_64 rng_;
  int pressure_ = 0;
  std::vector<BookEvent> out_;
};

void check(const SynthConfig& cfg) {
  if (cfg.days == 0 || cfg.events_per_day == 0) {
    throw Error(Errc::InvalidArgument, "synthetic corpus needs at least one day and one event");
  }
  if (cfg.min_volume < cfg.min_order_size || cfg.max_volume < cfg.min_volume) {
    throw Error(Errc::InvalidArgument, "synthetic volume range is invalid");
  }
  if (cfg.initial_levels < cfg.min_depth || cfg.min_depth == 0) {
    throw Error(Errc::InvalidArgument, "synthetic initial depth must cover min_depth");
  }
  auto prob = [](double p) { return p >= 0 && p <= 1; };
  if (!prob(cfg.place_prob) || !prob(cfg.cancel_prob) || cfg.place_prob + cfg.cancel_prob > 1 ||
      !prob(cfg.join_prob) || !prob(cfg.empty_tick_prob) || cfg.empty_tick_prob == 1 ||
      !prob(cfg.regime_switch_prob)) {
    throw Error(Errc::InvalidArgument, "synthetic probabilities must lie in [0, 1] and "
                                       "place_prob + cancel_prob must not exceed 1");
  }
  // Tilts shift a fair coin, so they must keep it a probability.
  if (!(std::abs(cfg.flow_tilt) <= 0.5) || !(std::abs(cfg.placement_tilt) <= 0.5)) {
    throw Error(Errc::InvalidArgument, "synthetic tilts must lie in [-0.5, 0.5]");
  }
  if (cfg.start_tick <= static_cast<Tick>(4 * cfg.initial_levels)) {
    throw Error(Errc::InvalidArgument, "synthetic start price too close to zero");
  }
}

}  // namespace

std::vector<BookEvent> generate_day(const SynthConfig& cfg, std::uint32_t day) {
  check(cfg);
  return DayGenerator(cfg, day).run();
}

SnapshotSeries generate_series(const SynthConfig& cfg, const ReplayOptions& replay) {
  check(cfg);
  std::vector<SnapshotSeries> parts;
  for (std::uint32_t d = 0; d < cfg.days; ++d) {
    auto opts = replay;
    opts.day = d;
    parts.push_back(replay_events(generate_day(cfg, d), cfg.tick_size, cfg.min_order_size, opts));
  }
  return concat(parts);
}

std::vector<std::filesystem::path> write_corpus(const SynthConfig& cfg,
                                                const std::filesystem::path& dir) {
  check(cfg);
  std::filesystem::create_directories(dir);
  const TickGrid grid(cfg.tick_size);
  std::vector<std::filesystem::path> paths;
  for (std::uint32_t d = 0; d < cfg.days; ++d) {
    char name[32];
    std::snprintf(name, sizeof name, "day_%02u.csv", d);
    paths.push_back(dir / name);
    write_events(paths.back(), generate_day(cfg, d), grid);
  }
  return paths;
}

}  // namespace lobrep

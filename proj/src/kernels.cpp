#include <algorithm>
#include <string>
#include <vector>

#include "lobrep/error.hpp"
#include "lobrep/represent.hpp"
#include "parallel.hpp"

namespace lobrep {

namespace {

void check_ends(const SnapshotSeries& series, std::span<const std::size_t> ends,
                const WindowConfig& cfg) {
  for (auto end : ends) {
    if (end + 1 < cfg.history || end >= series.size()) {
      throw Error(Errc::InvalidArgument, "window ending at " + std::to_string(end) +
                                             " does not fit a series of " +
                                             std::to_string(series.size()));
    }
  }
}

Matrix build_windows_serial(const SnapshotSeries& series, std::span<const std::size_t> ends,
                            Scheme scheme, const WindowConfig& cfg) {
  Matrix out(ends.size(), feature_dim(scheme, cfg, series.levels));
  for (std::size_t w = 0; w < ends.size(); ++w) {
    const std::size_t first = ends[w] + 1 - cfg.history;
    RepTensor t;
    if (scheme == Scheme::LevelBased) {
      std::vector<LevelSnapshot> window;
      for (std::size_t i = first; i <= ends[w]; ++i) window.push_back(series.snapshot(i));
      t = build_level_based(window);
    } else {
      std::span<const BookImage> window(series.images.data() + first, cfg.history);
      t = build_mw(window, series.grid, cfg);
      if (scheme == Scheme::AccumulatedMW) t = build_accumulated_mw(t);
      if (scheme == Scheme::SmoothedMW) t = build_smoothed_mw(t, cfg);
    }
    std::copy(t.data.data.begin(), t.data.data.end(), out.row(w).begin());
  }
  return out;
}

void fill_level_row(const SnapshotSeries& series, std::size_t first, std::size_t history,
                    std::span<double> out) {
  const std::size_t L = series.levels;
  for (std::size_t n = 0; n < history; ++n) {
    const auto& img = series.images[first + n];
    if (img.asks.size() < L || img.bids.size() < L) {
      throw Error(Errc::NonUniformDepth, "snapshot below L levels inside window");
    }
    double* row = out.data() + n * 4 * L;
    for (std::size_t i = 0; i < L; ++i) {
      row[4 * i] = series.grid.to_price(img.asks[i].price);
      row[4 * i + 1] = img.asks[i].volume;
      row[4 * i + 2] = series.grid.to_price(img.bids[i].price);
      row[4 * i + 3] = img.bids[i].volume;
    }
  }
}

void scatter_mw_row(const BookImage& img, Tick r, Tick W, std::span<double> row) {
  for (const auto& level : img.asks) {
    const Tick col = level.price - r + W;
    if (col > 2 * W) break;
    if (col >= 0) row[static_cast<std::size_t>(col)] += level.volume;
  }
  for (const auto& level : img.bids) {
    const Tick col = level.price - r + W;
    if (col < 0) break;
    if (col <= 2 * W) row[static_cast<std::size_t>(col)] -= level.volume;
  }
}

Matrix build_windows_parallel(const SnapshotSeries& series, std::span<const std::size_t> ends,
                              Scheme scheme, const WindowConfig& cfg) {
  Matrix out(ends.size(), feature_dim(scheme, cfg, series.levels));
  const std::size_t width = cfg.width();
  const auto W = static_cast<Tick>(cfg.half_width);
  const std::vector<double> kernel =
      scheme == Scheme::SmoothedMW ? gaussian_kernel(cfg.sigma, cfg.truncation)
                                   : std::vector<double>{};

  detail::parallel_for(ends.size(), [&](std::size_t w) {
    const std::size_t first = ends[w] + 1 - cfg.history;
    auto dst = out.row(w);
    if (scheme == Scheme::LevelBased) {
      fill_level_row(series, first, cfg.history, dst);
      return;
    }
    const Tick r = reference_tick(series.images[ends[w]]);
    std::vector<double> scratch(scheme == Scheme::SmoothedMW ? width : 0);
    for (std::size_t n = 0; n < cfg.history; ++n) {
      auto row = dst.subspan(n * width, width);
      const auto& img = series.images[first + n];
      if (scheme == Scheme::SmoothedMW) {
        std::fill(scratch.begin(), scratch.end(), 0.0);
        scatter_mw_row(img, r, W, scratch);
        rowops::smooth(scratch, row, kernel);
      } else {
        scatter_mw_row(img, r, W, row);
        if (scheme == Scheme::AccumulatedMW) rowops::accumulate(row, cfg.half_width);
      }
    }
  });
  return out;
}

}  // namespace

Matrix build_windows(const SnapshotSeries& series, std::span<const std::size_t> ends,
                     Scheme scheme, const WindowConfig& cfg, Exec exec) {
  cfg.validate();
  check_ends(series, ends, cfg);
  return exec == Exec::Serial ? build_windows_serial(series, ends, scheme, cfg)
                              : build_windows_parallel(series, ends, scheme, cfg);
}

}  // namespace lobrep

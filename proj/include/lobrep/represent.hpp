#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "lobrep/ingest.hpp"
#include "lobrep/matrix.hpp"
#include "lobrep/types.hpp"

namespace lobrep {

enum class Scheme : std::uint8_t { LevelBased, MovingWindow, AccumulatedMW, SmoothedMW };

inline constexpr std::array<Scheme, 4> kAllSchemes{
    Scheme::LevelBased, Scheme::MovingWindow, Scheme::AccumulatedMW, Scheme::SmoothedMW};

std::string_view to_string(Scheme scheme) noexcept;
/// Accepts level_based, mw, accumulated_mw, smoothed_mw.
Scheme parse_scheme(std::string_view name);
bool is_moving_window(Scheme scheme) noexcept;

/// history doubles as T for the level-based scheme and N for the MW family.
struct WindowConfig {
  std::size_t history = 10;
  std::size_t half_width = 20;
  double sigma = 1.0;        // ticks
  double truncation = 3.0;   // kernel radius in sigmas

  std::size_t width() const noexcept { return 2 * half_width + 1; }
  void validate() const;
};

struct RepTensor {
  Scheme scheme = Scheme::LevelBased;
  Matrix data;  // rows = time, oldest first
  std::size_t levels = 0;      // level-based
  std::size_t half_width = 0;  // MW family
  double tick_size = 0;
  Tick reference_tick = 0;
  double reference_price = 0;
  double sigma = 0;  // smoothed only
};

/// T x 4L stack, per level p_a, v_a, p_b, v_b. Throws NonUniformDepth, EmptyWindow.
RepTensor build_level_based(std::span<const LevelSnapshot> window);
std::vector<LevelSnapshot> unpack_level_based(const RepTensor& tensor);

/// Snapped mid of the latest image in ticks; a half-tick mid rounds toward the bid.
Tick reference_tick(const BookImage& latest);

/// N x (2W+1) signed volumes: column i holds the volume at r + (i - W) ticks,
/// asks positive, bids negative, with r taken from the last image.
RepTensor build_mw(std::span<const BookImage> window, const TickGrid& grid,
                   const WindowConfig& cfg);

/// Outward cumulative sums on each side of the centre column.
RepTensor build_accumulated_mw(const RepTensor& mw);
/// Inverse of build_accumulated_mw.
RepTensor difference_accumulated(const RepTensor& accumulated);

/// Gaussian smoothing along the price axis, each side within its own cells.
RepTensor build_smoothed_mw(const RepTensor& mw, const WindowConfig& cfg);

/// Normalized weights for offsets -R..R, R = floor(truncation * sigma).
std::vector<double> gaussian_kernel(double sigma, double truncation);

// Row primitives shared by the per-window builders and the batch kernels.
namespace rowops {
void accumulate(std::span<double> row, std::size_t half_width);
void difference(std::span<double> row, std::size_t half_width);
/// Throws MixedSignRow when a positive cell precedes a negative one.
void smooth(std::span<const double> in, std::span<double> out, std::span<const double> kernel);
}  // namespace rowops

enum class Exec : std::uint8_t { Serial, Parallel };

std::size_t feature_dim(Scheme scheme, const WindowConfig& cfg, std::size_t levels) noexcept;

/// Row i is the window of `cfg.history` snapshots ending at ends[i],
/// flattened time-major. Serial goes through the per-window builders above;
/// Parallel is the fused OpenMP kernel and must agree bit for bit.
Matrix build_windows(const SnapshotSeries& series, std::span<const std::size_t> ends,
                     Scheme scheme, const WindowConfig& cfg, Exec exec = Exec::Parallel);

}  // namespace lobrep

#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <vector>

#include "lobrep/book.hpp"
#include "lobrep/matrix.hpp"
#include "lobrep/types.hpp"

namespace lobrep {

/// Prediction horizons of the label columns that trail each FI-2010 row.
inline constexpr std::array<std::size_t, 5> kFi2010Horizons{10, 20, 30, 50, 100};

/// Ordered series of book images sharing one tick grid and view depth L.
struct SnapshotSeries {
  TickGrid grid;
  Volume min_order_size = 1;
  std::size_t levels = 10;
  /// True when images hold only the L visible levels (snapshot-only sources).
  bool depth_truncated = false;

  std::vector<std::uint64_t> index;  // strictly increasing
  std::vector<std::uint32_t> day;
  std::vector<BookImage> images;
  /// Class codes (0 up, 1 stationary, 2 down) per kFi2010Horizons; empty if absent.
  std::vector<std::array<std::int8_t, 5>> provided_labels;

  std::size_t size() const noexcept { return images.size(); }
  LevelSnapshot snapshot(std::size_t i) const;
  std::vector<double> mids() const;
  /// Distinct day tags in order of appearance.
  std::vector<std::uint32_t> days() const;
  /// Checks every structural invariant; throws InvalidSnapshot.
  void validate() const;
};

struct Fi2010Options {
  double tick_size = 0.01;
  Volume min_order_size = 1;
  /// The public dataset ships features as rows and samples as columns.
  bool transposed = false;
  std::uint32_t day = 0;
};

/// Rows hold 40 LOB features (per level: p_a, v_a, p_b, v_b) optionally
/// followed by extra features; when a row has more than 40 values the last
/// five are the labels for kFi2010Horizons (1 up, 2 stationary, 3 down).
SnapshotSeries parse_fi2010(const std::filesystem::path& path, const Fi2010Options& opts = {});
SnapshotSeries parse_fi2010(std::istream& in, const Fi2010Options& opts = {});

/// Writes the comma-separated row layout parse_fi2010 reads.
void write_fixture(const SnapshotSeries& series, const std::filesystem::path& path);

struct TimedEvents {
  std::vector<BookEvent> events;
  std::vector<std::size_t> lines;  // source line per event
};

/// Event CSV with header `seq,kind,side,price,volume`.
TimedEvents read_events(const std::filesystem::path& path, const TickGrid& grid);
TimedEvents read_events(std::istream& in, const TickGrid& grid);
void write_events(const std::filesystem::path& path, std::span<const BookEvent> events,
                  const TickGrid& grid);

struct ReplayOptions {
  std::size_t levels = 10;
  /// Levels per side retained in each image; 0 keeps the whole book.
  std::size_t max_depth = 0;
  std::uint32_t day = 0;
  /// Emit every stride-th eligible snapshot.
  std::size_t stride = 1;
};

/// Replays events through BookState and emits an image after each event once
/// both sides hold at least `levels` levels. Book errors carry the event's line.
SnapshotSeries replay_events(std::span<const BookEvent> events, double tick_size,
                             Volume min_order_size, const ReplayOptions& opts = {},
                             std::span<const std::size_t> lines = {});
SnapshotSeries parse_events(const std::filesystem::path& path, double tick_size,
                            Volume min_order_size, const ReplayOptions& opts = {});

/// Appends series that share grid and depth; indices are renumbered.
SnapshotSeries concat(std::span<const SnapshotSeries> parts);
/// Snapshots whose day tag is in `days`.
SnapshotSeries select_days(const SnapshotSeries& series, std::span<const std::uint32_t> days);

/// S x 4L matrix of level-based features in column order p_a, v_a, p_b, v_b per level.
Matrix level_features(const SnapshotSeries& series);

enum class NormMode : std::uint8_t { None, ZScore };

struct NormalizationSpec {
  NormMode mode = NormMode::None;
  std::vector<double> mean;
  std::vector<double> stddev;

  friend bool operator==(const NormalizationSpec&, const NormalizationSpec&) = default;
};

/// Per-column statistics from training rows. Throws DegenerateFeature.
NormalizationSpec fit_zscore(const Matrix& train_rows);
/// Single scalar scale shared by every column (mean fixed at 0).
NormalizationSpec fit_scalar_scale(const Matrix& train_rows);

Matrix normalize(Matrix rows, const NormalizationSpec& spec);
Matrix denormalize(Matrix rows, const NormalizationSpec& spec);

/// Binary snapshot cache ("LOBS"), exact round trip.
void save_series(const SnapshotSeries& series, const std::filesystem::path& path);
SnapshotSeries load_series(const std::filesystem::path& path);

}  // namespace lobrep

#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string_view>

#include "lobrep/book.hpp"
#include "lobrep/ingest.hpp"
#include "lobrep/represent.hpp"

namespace lobrep {

enum class Paradigm : std::uint8_t { None, Ask, Bid, Both };

inline constexpr std::array<Paradigm, 4> kAllParadigms{Paradigm::None, Paradigm::Ask,
                                                       Paradigm::Bid, Paradigm::Both};

std::string_view to_string(Paradigm paradigm) noexcept;
/// Accepts none, ask, bid, both.
Paradigm parse_paradigm(std::string_view name);

/// Tick filling: every empty tick strictly between a side's best quote and
/// its cap_level-th level receives one resting order of order_size.
struct PerturbationSpec {
  Paradigm paradigm = Paradigm::None;
  Volume order_size = 1;
  /// Level whose (unperturbed) price bounds the fill range; 0 means the
  /// series view depth L.
  std::size_t cap_level = 0;
  /// Snapshot-only series cannot show levels pushed past L; when false such
  /// series are rejected with DepthUnknown instead of being truncated.
  bool allow_truncated = true;
};

BookState perturb_book(const BookState& state, const PerturbationSpec& spec);

/// Flat-image form used by the batch kernel; agrees with perturb_book.
BookImage perturb_image(const BookImage& image, const PerturbationSpec& spec);

/// Perturbs every snapshot independently. Serial replays each image through
/// BookState and perturb_book; Parallel runs perturb_image under OpenMP.
SnapshotSeries perturb_series(const SnapshotSeries& series, PerturbationSpec spec,
                              Exec exec = Exec::Parallel);

struct DisplacementReport {
  double l2_level_based = 0;
  double l2_mw = 0;
  double linf_mw = 0;
  Volume total_added_volume = 0;
  double mid_before = 0;
  double mid_after = 0;
};

/// Distances between the representations of two equally long windows.
DisplacementReport displacement(std::span<const BookImage> before,
                                std::span<const BookImage> after, const TickGrid& grid,
                                std::size_t levels, const WindowConfig& cfg);

}  // namespace lobrep

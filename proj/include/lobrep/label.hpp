#pragma once

#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

namespace lobrep {

/// Class index order used throughout: 0 up, 1 stationary, 2 down.
enum class Movement : std::uint8_t { Up = 0, Stationary = 1, Down = 2 };

inline constexpr std::size_t kNumClasses = 3;
inline constexpr double kDefaultAlpha = 0.002;
inline constexpr std::size_t kDefaultHorizon = 50;

std::string_view to_string(Movement m) noexcept;

/// (mean(mids[t+1..t+k]) - mids[t]) / mids[t]. Throws HorizonOutOfRange.
double micro_movement(std::span<const double> mids, std::size_t t, std::size_t k);

/// Up above alpha, down below -alpha, stationary on the closed band between.
Movement classify(double movement, double alpha = kDefaultAlpha);

struct LabelSeries {
  std::size_t horizon = kDefaultHorizon;
  double alpha = kDefaultAlpha;
  std::vector<double> current_mid;   // p_t
  std::vector<double> forward_mid;   // m_+(t)
  std::vector<double> movement;      // l_t
  std::vector<Movement> classes;

  std::size_t size() const noexcept { return classes.size(); }
};

/// Labels for every t with k future mids available.
LabelSeries compute_labels(std::span<const double> mids, std::size_t k = kDefaultHorizon,
                           double alpha = kDefaultAlpha);

struct LabelAgreement {
  std::size_t compared = 0;
  std::size_t agreeing = 0;
  std::vector<std::size_t> mismatches;

  double rate() const noexcept {
    return compared == 0 ? 1.0 : static_cast<double>(agreeing) / static_cast<double>(compared);
  }
};

/// Compares computed classes with externally provided class codes on the
/// overlapping prefix. Disagreements are reported, never repaired.
LabelAgreement compare_labels(std::span<const Movement> computed,
                              std::span<const std::int8_t> provided);

}  // namespace lobrep

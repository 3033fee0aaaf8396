#pragma once

#include <array>
#include <cstddef>
#include <span>

#include "lobrep/label.hpp"

namespace lobrep {

using ConfusionMatrix = std::array<std::array<std::size_t, kNumClasses>, kNumClasses>;

/// Percentages, macro-averaged over the three classes without weighting.
/// confusion[true][predicted].
struct Metrics {
  double accuracy = 0;
  double precision = 0;
  double recall = 0;
  double fscore = 0;
  ConfusionMatrix confusion{};
  std::array<std::size_t, kNumClasses> support{};
  std::size_t total = 0;
};

/// Throws EmptyInput on empty input and DimMismatch on unequal lengths or
/// class codes outside 0..2. Per-class F is 2PR/(P+R) with 0/0 read as 0.
Metrics compute_metrics(std::span<const int> predictions, std::span<const int> labels);

}  // namespace lobrep

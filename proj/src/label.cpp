#include "lobrep/label.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "lobrep/error.hpp"

namespace lobrep {

std::string_view to_string(Movement m) noexcept {
  switch (m) {
    case Movement::Up: return "up";
    case Movement::Stationary: return "stationary";
    case Movement::Down: return "down";
  }
  return "unknown";
}

namespace {

double forward_mean(std::span<const double> mids, std::size_t t, std::size_t k) {
  double sum = 0;
  for (std::size_t i = 1; i <= k; ++i) sum += mids[t + i];
  return sum / static_cast<double>(k);
}

}  // namespace

double micro_movement(std::span<const double> mids, std::size_t t, std::size_t k) {
  if (k == 0 || t + k >= mids.size()) {
    throw Error(Errc::HorizonOutOfRange, "t=" + std::to_string(t) + " k=" + std::to_string(k) +
                                             " exceeds series of " + std::to_string(mids.size()));
  }
  const double p = mids[t];
  return (forward_mean(mids, t, k) - p) / p;
}

Movement classify(double movement, double alpha) {
  if (movement > alpha) return Movement::Up;
  if (movement < -alpha) return Movement::Down;
  return Movement::Stationary;
}

LabelSeries compute_labels(std::span<const double> mids, std::size_t k, double alpha) {
  if (k == 0) throw Error(Errc::HorizonOutOfRange, "horizon must be positive");
  LabelSeries out;
  out.horizon = k;
  out.alpha = alpha;
  const std::size_t n = mids.size() > k ? mids.size() - k : 0;
  out.current_mid.reserve(n);
  out.forward_mid.reserve(n);
  out.movement.reserve(n);
  out.classes.reserve(n);
  for (std::size_t t = 0; t < n; ++t) {
    const double m = forward_mean(mids, t, k);
    const double l = (m - mids[t]) / mids[t];
    out.current_mid.push_back(mids[t]);
    out.forward_mid.push_back(m);
    out.movement.push_back(l);
    out.classes.push_back(classify(l, alpha));
  }
  return out;
}

LabelAgreement compare_labels(std::span<const Movement> computed,
                              std::span<const std::int8_t> provided) {
  LabelAgreement out;
  out.compared = std::min(computed.size(), provided.size());
  for (std::size_t i = 0; i < out.compared; ++i) {
    if (static_cast<std::int8_t>(computed[i]) == provided[i]) {
      ++out.agreeing;
    } else {
      out.mismatches.push_back(i);
    }
  }
  return out;
}

}  // namespace lobrep

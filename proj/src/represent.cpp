#include "lobrep/represent.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "lobrep/error.hpp"

namespace lobrep {

std::string_view to_string(Scheme scheme) noexcept {
  switch (scheme) {
    case Scheme::LevelBased: return "level_based";
    case Scheme::MovingWindow: return "mw";
    case Scheme::AccumulatedMW: return "accumulated_mw";
    case Scheme::SmoothedMW: return "smoothed_mw";
  }
  return "unknown";
}

Scheme parse_scheme(std::string_view name) {
  for (auto s : kAllSchemes) {
    if (name == to_string(s)) return s;
  }
  throw Error(Errc::InvalidArgument, "unknown scheme '" + std::string(name) + "'");
}

bool is_moving_window(Scheme scheme) noexcept { return scheme != Scheme::LevelBased; }

void WindowConfig::validate() const {
  if (history < 1) throw Error(Errc::InvalidArgument, "history length must be >= 1");
  if (half_width < 1) throw Error(Errc::InvalidArgument, "half width W must be >= 1");
  if (!(sigma > 0)) throw Error(Errc::InvalidArgument, "sigma must be > 0");
  if (!(truncation >= 1)) throw Error(Errc::InvalidArgument, "truncation must be >= 1");
}

std::size_t feature_dim(Scheme scheme, const WindowConfig& cfg, std::size_t levels) noexcept {
  return scheme == Scheme::LevelBased ? cfg.history * 4 * levels : cfg.history * cfg.width();
}

RepTensor build_level_based(std::span<const LevelSnapshot> window) {
  if (window.empty()) throw Error(Errc::EmptyWindow, "level-based window is empty");
  const std::size_t L = window.front().levels();
  RepTensor out;
  out.scheme = Scheme::LevelBased;
  out.levels = L;
  out.data = Matrix(window.size(), 4 * L);
  for (std::size_t t = 0; t < window.size(); ++t) {
    const auto& s = window[t];
    if (s.asks.size() != L || s.bids.size() != L) {
      throw Error(Errc::NonUniformDepth, "snapshot " + std::to_string(t) + " has " +
                                             std::to_string(s.asks.size()) + "/" +
                                             std::to_string(s.bids.size()) +
                                             " levels, expected " + std::to_string(L));
    }
    auto row = out.data.row(t);
    for (std::size_t i = 0; i < L; ++i) {
      row[4 * i] = s.asks[i].price;
      row[4 * i + 1] = s.asks[i].volume;
      row[4 * i + 2] = s.bids[i].price;
      row[4 * i + 3] = s.bids[i].volume;
    }
  }
  return out;
}

std::vector<LevelSnapshot> unpack_level_based(const RepTensor& tensor) {
  if (tensor.scheme != Scheme::LevelBased) {
    throw Error(Errc::WrongScheme, "expected a level-based tensor");
  }
  const std::size_t L = tensor.levels;
  std::vector<LevelSnapshot> out(tensor.data.rows);
  for (std::size_t t = 0; t < tensor.data.rows; ++t) {
    auto row = tensor.data.row(t);
    out[t].t = t;
    for (std::size_t i = 0; i < L; ++i) {
      out[t].asks.push_back({row[4 * i], row[4 * i + 1]});
      out[t].bids.push_back({row[4 * i + 2], row[4 * i + 3]});
    }
  }
  return out;
}

Tick reference_tick(const BookImage& latest) {
  if (latest.asks.empty() || latest.bids.empty()) {
    throw Error(Errc::InsufficientDepth, "reference price needs both sides");
  }
  const Tick sum = latest.asks.front().price + latest.bids.front().price;
  // floor division: an odd sum is a half-tick mid, which goes to the bid side
  return sum >= 0 ? sum / 2 : -((-sum + 1) / 2);
}

RepTensor build_mw(std::span<const BookImage> window, const TickGrid& grid,
                   const WindowConfig& cfg) {
  if (window.empty()) throw Error(Errc::EmptyWindow, "moving window is empty");
  if (cfg.half_width < 1) throw Error(Errc::InvalidArgument, "half width W must be >= 1");
  const Tick r = reference_tick(window.back());
  const auto W = static_cast<Tick>(cfg.half_width);

  RepTensor out;
  out.scheme = Scheme::MovingWindow;
  out.half_width = cfg.half_width;
  out.tick_size = grid.tick_size();
  out.reference_tick = r;
  out.reference_price = grid.to_price(r);
  out.data = Matrix(window.size(), cfg.width());
  for (std::size_t n = 0; n < window.size(); ++n) {
    auto row = out.data.row(n);
    for (const auto& level : window[n].asks) {
      const Tick col = level.price - r + W;
      if (col > 2 * W) break;
      if (col >= 0) row[static_cast<std::size_t>(col)] += level.volume;
    }
    for (const auto& level : window[n].bids) {
      const Tick col = level.price - r + W;
      if (col < 0) break;
      if (col <= 2 * W) row[static_cast<std::size_t>(col)] -= level.volume;
    }
  }
  return out;
}

namespace rowops {

void accumulate(std::span<double> row, std::size_t half_width) {
  const std::size_t W = half_width;
  for (std::size_t j = W + 2; j < row.size(); ++j) row[j] += row[j - 1];
  for (std::size_t j = W - 1; j-- > 0;) row[j] += row[j + 1];
}

void difference(std::span<double> row, std::size_t half_width) {
  const std::size_t W = half_width;
  for (std::size_t j = row.size() - 1; j > W + 1; --j) row[j] -= row[j - 1];
  for (std::size_t j = 0; j + 1 < W; ++j) row[j] -= row[j + 1];
}

void smooth(std::span<const double> in, std::span<double> out, std::span<const double> kernel) {
  const auto n = static_cast<std::ptrdiff_t>(in.size());
  const auto R = static_cast<std::ptrdiff_t>(kernel.size() / 2);

  std::ptrdiff_t last_neg = -1;
  std::ptrdiff_t first_pos = n;
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    if (in[i] < 0) last_neg = i;
    if (in[i] > 0 && first_pos == n) first_pos = i;
  }
  if (last_neg > first_pos) {
    throw Error(Errc::MixedSignRow, "bid volume above ask volume within one row");
  }
  // Bid cells occupy [0, split], ask cells [split + 1, n). The split sits
  // midway through the empty gap between the two sides.
  std::ptrdiff_t split;
  if (last_neg < 0) split = -1;
  else if (first_pos == n) split = n - 1;
  else split = (last_neg + first_pos) / 2;

  std::fill(out.begin(), out.end(), 0.0);
  for (std::ptrdiff_t s = 0; s < n; ++s) {
    const double v = in[s];
    if (v == 0) continue;
    const bool bid = s <= split;
    // Kernel taps that cross into the other side are renormalized away, so
    // a side never loses mass at the split. Window edges are zero padded.
    double z = 0;
    for (std::ptrdiff_t k = -R; k <= R; ++k) {
      const std::ptrdiff_t t = s + k;
      if (bid ? t <= split : t > split) z += kernel[k + R];
    }
    for (std::ptrdiff_t k = -R; k <= R; ++k) {
      const std::ptrdiff_t t = s + k;
      if (t < 0 || t >= n) continue;
      if (bid ? t > split : t <= split) continue;
      out[t] += v * kernel[k + R] / z;
    }
  }
}

}  // namespace rowops

RepTensor build_accumulated_mw(const RepTensor& mw) {
  if (mw.scheme != Scheme::MovingWindow) {
    throw Error(Errc::WrongScheme, "accumulation needs a plain moving-window tensor");
  }
  RepTensor out = mw;
  out.scheme = Scheme::AccumulatedMW;
  for (std::size_t n = 0; n < out.data.rows; ++n) rowops::accumulate(out.data.row(n), mw.half_width);
  return out;
}

RepTensor difference_accumulated(const RepTensor& acc) {
  if (acc.scheme != Scheme::AccumulatedMW) {
    throw Error(Errc::WrongScheme, "differencing needs an accumulated tensor");
  }
  RepTensor out = acc;
  out.scheme = Scheme::MovingWindow;
  for (std::size_t n = 0; n < out.data.rows; ++n) rowops::difference(out.data.row(n), acc.half_width);
  return out;
}

std::vector<double> gaussian_kernel(double sigma, double truncation) {
  if (!(sigma > 0) || !(truncation >= 1)) {
    throw Error(Errc::InvalidArgument, "kernel needs sigma > 0 and truncation >= 1");
  }
  const auto R = static_cast<std::ptrdiff_t>(std::floor(truncation * sigma));
  std::vector<double> k(static_cast<std::size_t>(2 * R + 1));
  double sum = 0;
  for (std::ptrdiff_t j = -R; j <= R; ++j) {
    const double w = std::exp(-0.5 * static_cast<double>(j * j) / (sigma * sigma));
    k[static_cast<std::size_t>(j + R)] = w;
    sum += w;
  }
  for (auto& w : k) w /= sum;
  return k;
}

RepTensor build_smoothed_mw(const RepTensor& mw, const WindowConfig& cfg) {
  if (mw.scheme != Scheme::MovingWindow) {
    throw Error(Errc::WrongScheme, "smoothing needs a plain moving-window tensor");
  }
  const auto kernel = gaussian_kernel(cfg.sigma, cfg.truncation);
  RepTensor out = mw;
  out.scheme = Scheme::SmoothedMW;
  out.sigma = cfg.sigma;
  for (std::size_t n = 0; n < mw.data.rows; ++n) {
    rowops::smooth(mw.data.row(n), out.data.row(n), kernel);
  }
  return out;
}

}  // namespace lobrep

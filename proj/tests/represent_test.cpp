#include <gtest/gtest.h>

#include <cmath>
#include <numeric>
#include <random>

#include "lobrep/error.hpp"
#include "lobrep/represent.hpp"
#include "support.hpp"

namespace lobrep {
namespace {

// Tolerance for sums of up to a few hundred doubles of magnitude <= 1e4.
constexpr double kSumTol = 1e-9;

// Direct lookup: for each column offset scan both sides for a matching price.
std::vector<double> naive_mw_row(const BookImage& img, Tick r, std::size_t W) {
  std::vector<double> row(2 * W + 1, 0.0);
  for (std::size_t i = 0; i < row.size(); ++i) {
    const Tick p = r + static_cast<Tick>(i) - static_cast<Tick>(W);
    for (const auto& l : img.asks) {
      if (l.price == p) row[i] += l.volume;
    }
    for (const auto& l : img.bids) {
      if (l.price == p) row[i] -= l.volume;
    }
  }
  return row;
}

// Gather form of the side-restricted smoothing: each output cell collects
// from same-side sources, every source spreading with weights renormalized
// over its own side (cells beyond the window edge still count as its side).
std::vector<double> naive_smooth(const std::vector<double>& in, double sigma, double truncation) {
  const int n = static_cast<int>(in.size());
  const int R = static_cast<int>(std::floor(truncation * sigma));
  int last_neg = -1, first_pos = n;
  for (int i = 0; i < n; ++i) {
    if (in[i] < 0) last_neg = std::max(last_neg, i);
    if (in[i] > 0) first_pos = std::min(first_pos, i);
  }
  const int split = last_neg < 0 ? -1 : first_pos == n ? n - 1 : (last_neg + first_pos) / 2;
  auto same_side = [&](int a, int b) { return (a <= split) == (b <= split); };
  auto g = [&](int d) { return std::exp(-0.5 * d * d / (sigma * sigma)); };
  std::vector<double> out(in.size(), 0.0);
  for (int t = 0; t < n; ++t) {
    for (int s = std::max(0, t - R); s <= std::min(n - 1, t + R); ++s) {
      if (in[s] == 0 || !same_side(s, t)) continue;
      double z = 0;
      for (int d = -R; d <= R; ++d) {
        if (same_side(s, s + d)) z += g(d);
      }
      out[t] += in[s] * g(t - s) / z;
    }
  }
  return out;
}

std::vector<double> row_of(const Matrix& m, std::size_t r) {
  const auto s = m.row(r);
  return {s.begin(), s.end()};
}

TEST(LevelBased, BuildAndUnpack) {
  std::mt19937_64 rng(1);
  const auto s = testing::random_series(rng, 6, 10, 12);
  std::vector<LevelSnapshot> window;
  for (std::size_t i = 0; i < s.size(); ++i) window.push_back(s.snapshot(i));
  const auto t = build_level_based(window);
  ASSERT_EQ(t.data.rows, 6u);
  ASSERT_EQ(t.data.cols, 40u);
  EXPECT_DOUBLE_EQ(t.data(2, 0), window[2].asks[0].price);
  EXPECT_DOUBLE_EQ(t.data(2, 7), window[2].bids[1].volume);
  auto back = unpack_level_based(t);
  for (std::size_t i = 0; i < back.size(); ++i) back[i].t = window[i].t;
  EXPECT_EQ(back, window);
}

TEST(LevelBased, Errors) {
  EXPECT_THROW(build_level_based({}), Error);
  std::mt19937_64 rng(1);
  const auto s = testing::random_series(rng, 2, 10, 12);
  std::vector<LevelSnapshot> window{s.snapshot(0), s.snapshot(1)};
  window[1].asks.pop_back();
  window[1].bids.pop_back();
  try {
    build_level_based(window);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::NonUniformDepth);
  }
  RepTensor mw;
  mw.scheme = Scheme::MovingWindow;
  EXPECT_THROW(unpack_level_based(mw), Error);
}

TEST(MovingWindow, ReferenceTickFloorsHalfTicks) {
  BookImage img;
  img.asks = {{1002, 1}};
  img.bids = {{998, 1}};
  EXPECT_EQ(reference_tick(img), 1000);
  img.asks = {{1003, 1}};
  img.bids = {{1000, 1}};
  EXPECT_EQ(reference_tick(img), 1001);
  img.asks = {{-1, 1}};
  img.bids = {{-4, 1}};
  EXPECT_EQ(reference_tick(img), -3);
  EXPECT_THROW(reference_tick(BookImage{}), Error);
}

TEST(MovingWindow, HandExample) {
  BookImage img;
  img.asks = {{1002, 30}, {1004, 55}};
  img.bids = {{998, 40}, {997, 25}};
  WindowConfig cfg;
  cfg.half_width = 3;
  const std::vector<BookImage> window{img};
  const auto t = build_mw(window, TickGrid(0.01), cfg);
  EXPECT_EQ(t.reference_tick, 1000);
  EXPECT_DOUBLE_EQ(t.reference_price, 10.0);
  EXPECT_EQ(row_of(t.data, 0), (std::vector<double>{-25, -40, 0, 0, 0, 30, 0}));
}

TEST(MovingWindow, ReferenceComesFromLatestImage) {
  std::mt19937_64 rng(9);
  const auto s = testing::random_series(rng, 8, 10, 40);
  WindowConfig cfg;
  cfg.half_width = 15;
  const auto t = build_mw(s.images, s.grid, cfg);
  const Tick r = reference_tick(s.images.back());
  for (std::size_t n = 0; n < s.size(); ++n) {
    EXPECT_EQ(row_of(t.data, n), naive_mw_row(s.images[n], r, cfg.half_width)) << n;
  }
}

TEST(MovingWindow, RowSignsAreMonotone) {
  std::mt19937_64 rng(10);
  const auto s = testing::random_series(rng, 300, 10, 30);
  WindowConfig cfg;
  const auto t = build_mw(s.images, s.grid, cfg);
  for (std::size_t n = 0; n < t.data.rows; ++n) {
    bool seen_pos = false;
    for (double v : t.data.row(n)) {
      if (v > 0) seen_pos = true;
      ASSERT_FALSE(seen_pos && v < 0) << "row " << n;
    }
  }
}

TEST(Accumulated, HandExample) {
  RepTensor mw;
  mw.scheme = Scheme::MovingWindow;
  mw.half_width = 2;
  mw.data = Matrix(1, 5);
  mw.data.data = {-4, -2, 0, 3, 5};
  const auto acc = build_accumulated_mw(mw);
  EXPECT_EQ(acc.scheme, Scheme::AccumulatedMW);
  EXPECT_EQ(acc.data.data, (std::vector<double>{-6, -2, 0, 3, 8}));
  EXPECT_THROW(build_accumulated_mw(acc), Error);
  EXPECT_THROW(difference_accumulated(mw), Error);
}

TEST(Accumulated, DifferenceInvertsOnRandomRows) {
  std::mt19937_64 rng(21);
  std::uniform_int_distribution<int> vol(0, 500);
  std::uniform_int_distribution<std::size_t> width(1, 30);
  for (int trial = 0; trial < 1000; ++trial) {
    RepTensor mw;
    mw.scheme = Scheme::MovingWindow;
    mw.half_width = width(rng);
    mw.data = Matrix(1, 2 * mw.half_width + 1);
    for (std::size_t j = 0; j < mw.data.cols; ++j) {
      const double v = vol(rng);
      mw.data(0, j) = j < mw.half_width ? -v : j > mw.half_width ? v : 0.0;
    }
    const auto acc = build_accumulated_mw(mw);
    // Outward partial sums: |acc| never shrinks moving away from the centre.
    for (std::size_t j = mw.half_width + 1; j + 1 < mw.data.cols; ++j) {
      ASSERT_LE(acc.data(0, j), acc.data(0, j + 1));
    }
    for (std::size_t j = 1; j < mw.half_width; ++j) ASSERT_LE(acc.data(0, j - 1), acc.data(0, j));
    ASSERT_EQ(difference_accumulated(acc).data, mw.data) << "trial " << trial;
  }
}

TEST(Smoothed, KernelIsNormalizedAndSymmetric) {
  for (double sigma : {0.5, 1.0, 1.7, 3.0}) {
    for (double trunc : {1.0, 2.5, 3.0, 4.0}) {
      const auto k = gaussian_kernel(sigma, trunc);
      const auto R = static_cast<std::size_t>(std::floor(trunc * sigma));
      ASSERT_EQ(k.size(), 2 * R + 1);
      EXPECT_NEAR(std::accumulate(k.begin(), k.end(), 0.0), 1.0, 1e-12);
      for (std::size_t i = 0; i < k.size(); ++i) EXPECT_DOUBLE_EQ(k[i], k[k.size() - 1 - i]);
      for (std::size_t i = R; i + 1 < k.size(); ++i) EXPECT_GT(k[i], k[i + 1]);
    }
  }
  EXPECT_THROW(gaussian_kernel(0, 3), Error);
  EXPECT_THROW(gaussian_kernel(1, 0.5), Error);
}

TEST(Smoothed, MatchesGatherOracle) {
  std::mt19937_64 rng(31);
  const auto s = testing::random_series(rng, 200, 10, 30);
  for (double sigma : {0.6, 1.0, 2.0}) {
    WindowConfig cfg;
    cfg.sigma = sigma;
    const auto mw = build_mw(s.images, s.grid, cfg);
    const auto sm = build_smoothed_mw(mw, cfg);
    for (std::size_t n = 0; n < mw.data.rows; ++n) {
      const auto expected = naive_smooth(row_of(mw.data, n), sigma, cfg.truncation);
      for (std::size_t j = 0; j < expected.size(); ++j) {
        ASSERT_NEAR(sm.data(n, j), expected[j], kSumTol) << "row " << n << " col " << j;
      }
    }
  }
}

TEST(Smoothed, InteriorMassIsConservedPerSide) {
  // Both sides sit well inside the window, so no kernel tap is lost.
  std::mt19937_64 rng(32);
  std::uniform_int_distribution<int> vol(0, 80);
  WindowConfig cfg;
  cfg.half_width = 20;
  cfg.sigma = 1.5;
  const auto k = gaussian_kernel(cfg.sigma, cfg.truncation);
  const std::size_t R = k.size() / 2;
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<double> row(cfg.width(), 0.0);
    for (std::size_t j = R; j < cfg.half_width; ++j) row[j] = -vol(rng);
    for (std::size_t j = cfg.half_width + 1; j + R < row.size(); ++j) row[j] = vol(rng);
    std::vector<double> out(row.size());
    rowops::smooth(row, out, k);
    double bid_in = 0, ask_in = 0, bid_out = 0, ask_out = 0;
    for (std::size_t j = 0; j < row.size(); ++j) {
      (row[j] < 0 ? bid_in : ask_in) += row[j];
      (out[j] < 0 ? bid_out : ask_out) += out[j];
    }
    EXPECT_NEAR(bid_out, bid_in, kSumTol);
    EXPECT_NEAR(ask_out, ask_in, kSumTol);
  }
}

TEST(Smoothed, SidesNeverMix) {
  std::mt19937_64 rng(33);
  const auto s = testing::random_series(rng, 300, 10, 30);
  WindowConfig cfg;
  cfg.sigma = 2.5;
  const auto sm = build_smoothed_mw(build_mw(s.images, s.grid, cfg), cfg);
  for (std::size_t n = 0; n < sm.data.rows; ++n) {
    bool seen_pos = false;
    for (double v : sm.data.row(n)) {
      if (v > 0) seen_pos = true;
      ASSERT_FALSE(seen_pos && v < 0) << "row " << n;
    }
  }
}

TEST(Smoothed, RejectsMixedSignRowAndWrongScheme) {
  const std::vector<double> row{0, 3, -2, 0, 0};
  std::vector<double> out(row.size());
  const auto k = gaussian_kernel(1, 3);
  try {
    rowops::smooth(row, out, k);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::MixedSignRow);
  }
  RepTensor lb;
  EXPECT_THROW(build_smoothed_mw(lb, WindowConfig{}), Error);
}

TEST(Windows, FeatureDims) {
  WindowConfig cfg;
  cfg.history = 10;
  cfg.half_width = 20;
  EXPECT_EQ(feature_dim(Scheme::LevelBased, cfg, 10), 400u);
  EXPECT_EQ(feature_dim(Scheme::SmoothedMW, cfg, 10), 410u);
}

TEST(Windows, SerialAndParallelAgreeBitForBit) {
  std::mt19937_64 rng(41);
  const auto s = testing::random_series(rng, 400, 10, 25);
  WindowConfig cfg;
  cfg.history = 12;
  cfg.half_width = 18;
  cfg.sigma = 1.3;
  std::vector<std::size_t> ends;
  for (std::size_t t = cfg.history - 1; t < s.size(); t += 3) ends.push_back(t);
  for (auto scheme : kAllSchemes) {
    const auto a = build_windows(s, ends, scheme, cfg, Exec::Serial);
    const auto b = build_windows(s, ends, scheme, cfg, Exec::Parallel);
    ASSERT_EQ(a.rows, ends.size());
    EXPECT_EQ(a, b) << to_string(scheme);
  }
}

TEST(Windows, RowsMatchPerWindowBuilders) {
  std::mt19937_64 rng(42);
  const auto s = testing::random_series(rng, 50, 5, 25);
  WindowConfig cfg;
  cfg.history = 4;
  cfg.half_width = 10;
  const std::vector<std::size_t> ends{3, 20, 49};
  const auto m = build_windows(s, ends, Scheme::AccumulatedMW, cfg);
  for (std::size_t w = 0; w < ends.size(); ++w) {
    std::span<const BookImage> window(s.images.data() + ends[w] + 1 - cfg.history, cfg.history);
    const auto t = build_accumulated_mw(build_mw(window, s.grid, cfg));
    EXPECT_EQ(row_of(m, w), t.data.data);
  }
  const std::vector<std::size_t> early{2};
  EXPECT_THROW(build_windows(s, early, Scheme::MovingWindow, cfg), Error);
}

TEST(Schemes, NamesRoundTrip) {
  for (auto s : kAllSchemes) EXPECT_EQ(parse_scheme(to_string(s)), s);
  EXPECT_THROW(parse_scheme("deep"), Error);
  EXPECT_FALSE(is_moving_window(Scheme::LevelBased));
  EXPECT_TRUE(is_moving_window(Scheme::SmoothedMW));
}

}  // namespace
}  // namespace lobrep

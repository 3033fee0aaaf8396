#include <gtest/gtest.h>

#include <random>

#include "lobrep/error.hpp"
#include "lobrep/metrics.hpp"

namespace lobrep {
namespace {

// Metrics are percentages built from a few hundred counts.
constexpr double kTol = 1e-9;

struct Brute {
  double accuracy, precision, recall, fscore;
};

// Straight from the definitions, one class at a time, no confusion matrix.
Brute brute_force(const std::vector<int>& pred, const std::vector<int>& truth) {
  Brute b{0, 0, 0, 0};
  std::size_t correct = 0;
  for (std::size_t i = 0; i < pred.size(); ++i) correct += pred[i] == truth[i];
  b.accuracy = 100.0 * correct / pred.size();
  for (int c = 0; c < 3; ++c) {
    double tp = 0, fp = 0, fn = 0;
    for (std::size_t i = 0; i < pred.size(); ++i) {
      if (pred[i] == c && truth[i] == c) ++tp;
      if (pred[i] == c && truth[i] != c) ++fp;
      if (pred[i] != c && truth[i] == c) ++fn;
    }
    const double p = tp + fp > 0 ? tp / (tp + fp) : 0;
    const double r = tp + fn > 0 ? tp / (tp + fn) : 0;
    const double f = p + r > 0 ? 2 * p * r / (p + r) : 0;
    b.precision += 100.0 * p / 3;
    b.recall += 100.0 * r / 3;
    b.fscore += 100.0 * f / 3;
  }
  return b;
}

TEST(Metrics, PerfectPredictions) {
  const std::vector<int> y{0, 1, 2, 2, 1, 0, 1};
  const auto m = compute_metrics(y, y);
  EXPECT_DOUBLE_EQ(m.accuracy, 100);
  EXPECT_DOUBLE_EQ(m.precision, 100);
  EXPECT_DOUBLE_EQ(m.recall, 100);
  EXPECT_DOUBLE_EQ(m.fscore, 100);
  EXPECT_EQ(m.total, 7u);
  EXPECT_EQ(m.support[1], 3u);
  EXPECT_EQ(m.confusion[2][2], 2u);
}

TEST(Metrics, AllStationaryOnBalancedSet) {
  std::vector<int> truth;
  for (int i = 0; i < 30; ++i) truth.push_back(i % 3);
  const std::vector<int> pred(truth.size(), 1);
  const auto m = compute_metrics(pred, truth);
  EXPECT_NEAR(m.accuracy, 100.0 / 3, kTol);
  // Stationary: P = 1/3, R = 1, F = 0.5. The other classes score 0.
  EXPECT_NEAR(m.fscore, (0 + 0.5 + 0) / 3 * 100, kTol);
  EXPECT_NEAR(m.precision, 100.0 / 9, kTol);
  EXPECT_NEAR(m.recall, 100.0 / 3, kTol);
  EXPECT_EQ(m.confusion[0][1], 10u);
  EXPECT_EQ(m.confusion[0][0], 0u);
}

TEST(MetricsProperty, MatchesBruteForce) {
  std::mt19937_64 rng(71);
  std::uniform_int_distribution<int> cls(0, 2);
  std::bernoulli_distribution copy(0.6);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<int> truth(300), pred(300);
    for (std::size_t i = 0; i < truth.size(); ++i) {
      truth[i] = cls(rng);
      pred[i] = copy(rng) ? truth[i] : cls(rng);
    }
    const auto m = compute_metrics(pred, truth);
    const auto b = brute_force(pred, truth);
    EXPECT_NEAR(m.accuracy, b.accuracy, kTol);
    EXPECT_NEAR(m.precision, b.precision, kTol);
    EXPECT_NEAR(m.recall, b.recall, kTol);
    EXPECT_NEAR(m.fscore, b.fscore, kTol);
    std::size_t trace = 0, sum = 0;
    for (int i = 0; i < 3; ++i) {
      trace += m.confusion[i][i];
      for (int j = 0; j < 3; ++j) sum += m.confusion[i][j];
    }
    EXPECT_EQ(sum, truth.size());
    EXPECT_NEAR(m.accuracy, 100.0 * trace / sum, kTol);
  }
}

TEST(Metrics, Errors) {
  const std::vector<int> empty;
  const std::vector<int> two{0, 1};
  const std::vector<int> three{0, 1, 2};
  const std::vector<int> bad{0, 3};
  auto code = [](std::span<const int> p, std::span<const int> y) {
    try {
      compute_metrics(p, y);
    } catch (const Error& e) {
      return e.code();
    }
    return Errc::InvalidArgument;
  };
  EXPECT_EQ(code(empty, empty), Errc::EmptyInput);
  EXPECT_EQ(code(two, three), Errc::DimMismatch);
  EXPECT_EQ(code(bad, two), Errc::DimMismatch);
  EXPECT_EQ(code(two, bad), Errc::DimMismatch);
}

}  // namespace
}  // namespace lobrep

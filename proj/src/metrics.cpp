#include "lobrep/metrics.hpp"

#include <string>

#include "lobrep/error.hpp"

namespace lobrep {

Metrics compute_metrics(std::span<const int> predictions, std::span<const int> labels) {
  if (predictions.empty()) throw Error(Errc::EmptyInput, "no predictions to score");
  if (predictions.size() != labels.size()) {
    throw Error(Errc::DimMismatch, std::to_string(predictions.size()) + " predictions for " +
                                       std::to_string(labels.size()) + " labels");
  }
  Metrics m;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const int y = labels[i];
    const int p = predictions[i];
    if (y < 0 || y >= static_cast<int>(kNumClasses) || p < 0 ||
        p >= static_cast<int>(kNumClasses)) {
      throw Error(Errc::DimMismatch, "class code out of range at sample " + std::to_string(i));
    }
    ++m.confusion[y][p];
  }
  m.total = labels.size();

  std::size_t correct = 0;
  for (std::size_t c = 0; c < kNumClasses; ++c) {
    correct += m.confusion[c][c];
    std::size_t predicted = 0;
    for (std::size_t r = 0; r < kNumClasses; ++r) predicted += m.confusion[r][c];
    for (std::size_t p = 0; p < kNumClasses; ++p) m.support[c] += m.confusion[c][p];

    const double tp = static_cast<double>(m.confusion[c][c]);
    const double precision = predicted == 0 ? 0.0 : tp / static_cast<double>(predicted);
    const double recall = m.support[c] == 0 ? 0.0 : tp / static_cast<double>(m.support[c]);
    const double f = precision + recall == 0 ? 0.0 : 2 * precision * recall / (precision + recall);
    m.precision += precision;
    m.recall += recall;
    m.fscore += f;
  }
  constexpr double k = static_cast<double>(kNumClasses);
  m.accuracy = 100.0 * static_cast<double>(correct) / static_cast<double>(m.total);
  m.precision = 100.0 * m.precision / k;
  m.recall = 100.0 * m.recall / k;
  m.fscore = 100.0 * m.fscore / k;
  return m;
}

}  // namespace lobrep

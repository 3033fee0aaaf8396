#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "lobrep/ingest.hpp"
#include "lobrep/label.hpp"
#include "lobrep/learn.hpp"
#include "lobrep/metrics.hpp"
#include "lobrep/perturb.hpp"
#include "lobrep/represent.hpp"
#include "lobrep/synth.hpp"

namespace lobrep {

enum class DataFormat : std::uint8_t { Fi2010, Events, Synthetic, Cache };
std::string_view to_string(DataFormat f) noexcept;
DataFormat parse_data_format(std::string_view name);

enum class LabelSource : std::uint8_t { Computed, Provided };
std::string_view to_string(LabelSource s) noexcept;
LabelSource parse_label_source(std::string_view name);

/// Where snapshots come from. Each input file is one trading day.
struct DataConfig {
  DataFormat format = DataFormat::Synthetic;
  std::vector<std::filesystem::path> paths;       // split by train_days
  std::vector<std::filesystem::path> test_paths;  // explicit test files, optional
  double tick_size = 0.01;
  Volume min_order_size = 1;
  std::size_t levels = 10;
  bool transposed = false;       // fi2010
  std::size_t replay_stride = 5; // events, synthetic
  std::size_t max_depth = 0;     // events, synthetic
  SynthConfig synth;
};

struct ExperimentConfig {
  std::vector<ModelKind> models{ModelKind::Linear, ModelKind::Mlp};
  std::vector<Scheme> schemes{kAllSchemes.begin(), kAllSchemes.end()};
  std::vector<Paradigm> paradigms{kAllParadigms.begin(), kAllParadigms.end()};
  std::vector<std::uint64_t> seeds{1, 2, 3, 4, 5};
  std::vector<std::size_t> hidden{100, 50};
  WindowConfig window;
  std::size_t horizon = kDefaultHorizon;
  double alpha = kDefaultAlpha;
  LabelSource label_source = LabelSource::Computed;
  std::size_t train_days = 7;
  double val_fraction = 0.2;   // trailing share of training windows
  std::size_t sample_stride = 1;
  Volume order_size = 0;       // 0 means the series minimum order size
  std::size_t cap_level = 0;
  bool allow_truncated = true;
  bool normalize = true;
  TrainConfig train;
  DataConfig data;

  void validate() const;
};

struct Setting {
  std::string key;
  std::string value;
  std::size_t line = 0;  // 0 for settings that did not come from a file
};

/// key = value lines; '#' starts a comment. Unknown keys and bad values
/// raise MalformedRow naming the line.
std::vector<Setting> read_settings(std::istream& in);
void apply_setting(ExperimentConfig& cfg, std::string_view key, std::string_view value);
ExperimentConfig apply_settings(const std::vector<Setting>& settings, ExperimentConfig base = {});
ExperimentConfig parse_config(std::istream& in, ExperimentConfig base = {});
ExperimentConfig load_config(const std::filesystem::path& path, ExperimentConfig base = {});
/// Every field, for provenance.
nlohmann::json to_json(const ExperimentConfig& cfg);

/// Snapshots of every configured day, train days first.
struct DataSplit {
  SnapshotSeries train;
  SnapshotSeries test;
};
DataSplit load_data(const ExperimentConfig& cfg);
SnapshotSeries load_days(const DataConfig& data, const std::vector<std::filesystem::path>& paths,
                         std::uint32_t first_day);

/// Window end indices whose history and label horizon stay inside one day.
std::vector<std::size_t> window_ends(const SnapshotSeries& series, std::size_t history,
                                     std::size_t horizon, std::size_t stride = 1);
/// Class codes for each end, computed from mids or read from provided labels.
std::vector<int> window_labels(const SnapshotSeries& series, std::span<const std::size_t> ends,
                               std::size_t horizon, double alpha, LabelSource source);

struct PreparedScheme {
  Scheme scheme = Scheme::LevelBased;
  Dataset train;
  Dataset val;
  std::vector<Paradigm> paradigms;
  std::vector<Dataset> test;  // per paradigm, same labels
  NormalizationSpec norm;
};

/// Features for one scheme. Training data is never perturbed; each test set
/// is the test series under one paradigm, normalized with training
/// statistics. Throws InvalidSnapshot if a perturbation moved any label.
PreparedScheme prepare_scheme(const DataSplit& data, Scheme scheme, const ExperimentConfig& cfg);

struct CellResult {
  ModelKind model = ModelKind::Linear;
  Scheme scheme = Scheme::LevelBased;
  Paradigm paradigm = Paradigm::None;
  std::uint64_t seed = 0;
  std::string status = "ok";  // or "failed: <reason>"
  Metrics metrics;
  double pred_change_rate = 0;  // share of test predictions differing from paradigm none
  std::size_t best_epoch = 0;

  bool ok() const noexcept { return status == "ok"; }
};

/// Metrics of one trained model on each requested paradigm; prepared must
/// hold them all plus Paradigm::None.
std::vector<CellResult> evaluate_model(const Model& model, const PreparedScheme& prepared,
                                       std::span<const Paradigm> paradigms);

struct Stat {
  double mean = 0;
  double stddev = 0;  // sample standard deviation, 0 for one seed
};

struct SummaryRow {
  ModelKind model = ModelKind::Linear;
  Scheme scheme = Scheme::LevelBased;
  Paradigm paradigm = Paradigm::None;
  std::size_t runs = 0;
  std::size_t failed = 0;
  Stat accuracy, precision, recall, fscore, pred_change_rate;
  ConfusionMatrix confusion{};  // summed over successful seeds
};

struct GridResult {
  std::vector<CellResult> cells;  // model, scheme, seed, paradigm order
  std::vector<SummaryRow> summary;

  const SummaryRow* find(ModelKind m, Scheme s, Paradigm p) const noexcept;
};

std::vector<SummaryRow> summarize(const std::vector<CellResult>& cells);

/// Trains every (model, scheme, seed) on unperturbed training data and
/// evaluates it on every paradigm. Runs execute in parallel; a failed run
/// is recorded with its reason and the grid continues.
GridResult run_grid(const DataSplit& data, const ExperimentConfig& cfg);

inline constexpr std::string_view kResultsHeader =
    "model,scheme,paradigm,seed,status,accuracy,precision,recall,fscore,support,"
    "pred_change_rate,best_epoch,confusion";

/// results.csv, summary.json, table.txt and confusion/<model>_<scheme>_<paradigm>.csv.
void write_results(const GridResult& grid, const ExperimentConfig& cfg,
                   const std::filesystem::path& dir);
/// Text table: per model, paradigms as rows, schemes as column groups.
std::string format_table(const GridResult& grid, const ExperimentConfig& cfg);
std::string results_csv_row(const CellResult& cell);

}  // namespace lobrep

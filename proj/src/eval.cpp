#include "lobrep/eval.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "io_util.hpp"
#include "lobrep/error.hpp"
#include "lobrep/tensor_io.hpp"
#include "parallel.hpp"

namespace lobrep {

SnapshotSeries load_days(const DataConfig& data, const std::vector<std::filesystem::path>& paths,
                         std::uint32_t first_day) {
  if (paths.empty()) throw Error(Errc::EmptyInput, "no input files");
  std::vector<SnapshotSeries> parts;
  std::uint32_t day = first_day;
  for (const auto& path : paths) {
    switch (data.format) {
      case DataFormat::Fi2010: {
        Fi2010Options opts;
        opts.tick_size = data.tick_size;
        opts.min_order_size = data.min_order_size;
        opts.transposed = data.transposed;
        opts.day = day++;
        auto s = parse_fi2010(path, opts);
        if (s.levels != data.levels) {
          throw Error(Errc::NonUniformDepth, path.string() + " holds " + std::to_string(s.levels) +
                                                 " levels, config expects " +
                                                 std::to_string(data.levels));
        }
        parts.push_back(std::move(s));
        break;
      }
      case DataFormat::Events: {
        ReplayOptions opts{data.levels, data.max_depth, day++, data.replay_stride};
        parts.push_back(parse_events(path, data.tick_size, data.min_order_size, opts));
        break;
      }
      case DataFormat::Cache: {
        auto s = load_series(path);
        // Day tags are renumbered so files never collide.
        const auto tags = s.days();
        for (auto& d : s.day) {
          d = day + static_cast<std::uint32_t>(std::find(tags.begin(), tags.end(), d) - tags.begin());
        }
        day += static_cast<std::uint32_t>(tags.size());
        parts.push_back(std::move(s));
        break;
      }
      case DataFormat::Synthetic:
        throw Error(Errc::InvalidArgument, "synthetic data has no input files");
    }
  }
  return concat(parts);
}

DataSplit load_data(const ExperimentConfig& cfg) {
  cfg.validate();
  const auto& data = cfg.data;
  SnapshotSeries all;
  if (data.format == DataFormat::Synthetic) {
    auto synth = data.synth;
    synth.tick_size = data.tick_size;
    synth.min_order_size = data.min_order_size;
    all = generate_series(synth, {data.levels, data.max_depth, 0, data.replay_stride});
  } else {
    all = load_days(data, data.paths, 0);
  }

  DataSplit split;
  if (!data.test_paths.empty()) {
    const auto first = all.days().back() + 1;
    split.train = std::move(all);
    split.test = load_days(data, data.test_paths, first);
  } else {
    const auto days = all.days();
    if (days.size() <= cfg.train_days) {
      throw Error(Errc::InvalidArgument, "need more than " + std::to_string(cfg.train_days) +
                                             " days to hold out a test split, have " +
                                             std::to_string(days.size()));
    }
    const std::vector<std::uint32_t> train_days(days.begin(),
                                                days.begin() + static_cast<std::ptrdiff_t>(cfg.train_days));
    const std::vector<std::uint32_t> test_days(days.begin() + static_cast<std::ptrdiff_t>(cfg.train_days),
                                               days.end());
    split.train = select_days(all, train_days);
    split.test = select_days(all, test_days);
  }
  split.train.validate();
  split.test.validate();
  return split;
}

std::vector<std::size_t> window_ends(const SnapshotSeries& series, std::size_t history,
                                     std::size_t horizon, std::size_t stride) {
  if (history == 0 || stride == 0) throw Error(Errc::InvalidArgument, "history and stride must be >= 1");
  std::vector<std::size_t> ends;
  std::size_t begin = 0;
  while (begin < series.size()) {
    std::size_t end = begin;
    while (end < series.size() && series.day[end] == series.day[begin]) ++end;
    // t needs history - 1 earlier snapshots and horizon later ones, same day.
    if (end - begin >= history + horizon) {
      for (std::size_t t = begin + history - 1; t + horizon < end; t += stride) ends.push_back(t);
    }
    begin = end;
  }
  return ends;
}

std::vector<int> window_labels(const SnapshotSeries& series, std::span<const std::size_t> ends,
                               std::size_t horizon, double alpha, LabelSource source) {
  std::vector<int> y;
  y.reserve(ends.size());
  if (source == LabelSource::Provided) {
    if (series.provided_labels.empty()) {
      throw Error(Errc::InvalidArgument, "series carries no provided labels");
    }
    const auto it = std::find(kFi2010Horizons.begin(), kFi2010Horizons.end(), horizon);
    if (it == kFi2010Horizons.end()) {
      throw Error(Errc::HorizonOutOfRange,
                  "provided labels exist only for horizons 10, 20, 30, 50, 100");
    }
    const auto col = static_cast<std::size_t>(it - kFi2010Horizons.begin());
    for (auto t : ends) y.push_back(series.provided_labels[t][col]);
    return y;
  }
  const auto mids = series.mids();
  for (auto t : ends) y.push_back(static_cast<int>(classify(micro_movement(mids, t, horizon), alpha)));
  return y;
}

namespace {

PerturbationSpec perturbation_for(Paradigm p, const SnapshotSeries& series,
                                  const ExperimentConfig& cfg) {
  PerturbationSpec spec;
  spec.paradigm = p;
  spec.order_size = cfg.order_size > 0 ? cfg.order_size : series.min_order_size;
  spec.cap_level = cfg.cap_level;
  spec.allow_truncated = cfg.allow_truncated;
  return spec;
}

Dataset take_rows(const Matrix& x, const std::vector<int>& y, std::size_t from, std::size_t to) {
  Dataset d;
  d.x = Matrix(to - from, x.cols);
  std::copy(x.data.begin() + static_cast<std::ptrdiff_t>(from * x.cols),
            x.data.begin() + static_cast<std::ptrdiff_t>(to * x.cols), d.x.data.begin());
  d.y.assign(y.begin() + static_cast<std::ptrdiff_t>(from), y.begin() + static_cast<std::ptrdiff_t>(to));
  return d;
}

/// Perturbed copies of the test series, None included, checked against the
/// label-invariance contract.
struct TestSeries {
  std::vector<Paradigm> paradigms;
  std::vector<SnapshotSeries> series;
  std::vector<std::size_t> ends;
  std::vector<int> labels;
  std::size_t base = 0;  // position of Paradigm::None
};

TestSeries perturb_tests(const SnapshotSeries& test, const ExperimentConfig& cfg) {
  TestSeries out;
  out.paradigms = cfg.paradigms;
  if (std::find(out.paradigms.begin(), out.paradigms.end(), Paradigm::None) == out.paradigms.end()) {
    out.paradigms.push_back(Paradigm::None);
  }
  out.ends = window_ends(test, cfg.window.history, cfg.horizon, cfg.sample_stride);
  if (out.ends.empty()) throw Error(Errc::EmptyInput, "test split yields no windows");
  out.labels = window_labels(test, out.ends, cfg.horizon, cfg.alpha, cfg.label_source);
  const auto base_mids = test.mids();
  for (std::size_t i = 0; i < out.paradigms.size(); ++i) {
    const auto p = out.paradigms[i];
    if (p == Paradigm::None) {
      out.base = i;
      out.series.push_back(test);
      continue;
    }
    auto perturbed = perturb_series(test, perturbation_for(p, test, cfg));
    if (perturbed.mids() != base_mids) {
      throw Error(Errc::InvalidSnapshot,
                  "paradigm " + std::string(to_string(p)) + " moved a mid price");
    }
    if (cfg.label_source == LabelSource::Computed &&
        window_labels(perturbed, out.ends, cfg.horizon, cfg.alpha, cfg.label_source) != out.labels) {
      throw Error(Errc::InvalidSnapshot, "paradigm " + std::string(to_string(p)) + " moved a label");
    }
    out.series.push_back(std::move(perturbed));
  }
  return out;
}

PreparedScheme prepare_with(const SnapshotSeries& train, const TestSeries& tests, Scheme scheme,
                            const ExperimentConfig& cfg) {
  PreparedScheme out;
  out.scheme = scheme;
  out.paradigms = tests.paradigms;

  const auto ends = window_ends(train, cfg.window.history, cfg.horizon, cfg.sample_stride);
  if (ends.empty()) throw Error(Errc::EmptyInput, "training split yields no windows");
  const auto y = window_labels(train, ends, cfg.horizon, cfg.alpha, cfg.label_source);
  auto x = build_windows(train, ends, scheme, cfg.window);

  const auto n_val = static_cast<std::size_t>(std::floor(cfg.val_fraction * static_cast<double>(ends.size())));
  const auto n_train = ends.size() - n_val;
  if (n_train == 0) throw Error(Errc::EmptyInput, "validation share leaves no training windows");
  out.train = take_rows(x, y, 0, n_train);
  out.val = take_rows(x, y, n_train, ends.size());
  x = Matrix();

  if (cfg.normalize) {
    out.norm = is_moving_window(scheme) ? fit_scalar_scale(out.train.x) : fit_zscore(out.train.x);
    out.train.x = normalize(std::move(out.train.x), out.norm);
    out.val.x = normalize(std::move(out.val.x), out.norm);
  }
  for (const auto& series : tests.series) {
    Dataset d;
    d.x = build_windows(series, tests.ends, scheme, cfg.window);
    if (cfg.normalize) d.x = normalize(std::move(d.x), out.norm);
    d.y = tests.labels;
    out.test.push_back(std::move(d));
  }
  return out;
}

double fraction_changed(const std::vector<int>& a, const std::vector<int>& b) {
  std::size_t diff = 0;
  for (std::size_t i = 0; i < a.size(); ++i) diff += a[i] != b[i];
  return a.empty() ? 0.0 : 100.0 * static_cast<double>(diff) / static_cast<double>(a.size());
}

Stat stat_of(const std::vector<double>& v) {
  Stat s;
  if (v.empty()) return s;
  for (double x : v) s.mean += x;
  s.mean /= static_cast<double>(v.size());
  if (v.size() > 1) {
    double ss = 0;
    for (double x : v) ss += (x - s.mean) * (x - s.mean);
    s.stddev = std::sqrt(ss / static_cast<double>(v.size() - 1));
  }
  return s;
}

std::string describe(const std::exception& e) {
  if (const auto* err = dynamic_cast<const Error*>(&e)) {
    return std::string(to_string(err->code())) + ": " + err->detail();
  }
  return e.what();
}

}  // namespace

PreparedScheme prepare_scheme(const DataSplit& data, Scheme scheme, const ExperimentConfig& cfg) {
  cfg.validate();
  return prepare_with(data.train, perturb_tests(data.test, cfg), scheme, cfg);
}

std::vector<CellResult> evaluate_model(const Model& model, const PreparedScheme& prepared,
                                       std::span<const Paradigm> paradigms) {
  auto index_of = [&](Paradigm p) {
    const auto it = std::find(prepared.paradigms.begin(), prepared.paradigms.end(), p);
    if (it == prepared.paradigms.end()) {
      throw Error(Errc::InvalidArgument,
                  "paradigm " + std::string(to_string(p)) + " was not prepared");
    }
    return static_cast<std::size_t>(it - prepared.paradigms.begin());
  };
  const auto base = model.predict(prepared.test[index_of(Paradigm::None)].x);
  std::vector<CellResult> out;
  for (auto p : paradigms) {
    const auto& set = prepared.test[index_of(p)];
    const auto pred = p == Paradigm::None ? base : model.predict(set.x);
    CellResult c;
    c.model = model.spec().kind;
    c.scheme = prepared.scheme;
    c.paradigm = p;
    c.seed = model.spec().seed;
    c.metrics = compute_metrics(pred, set.y);
    c.pred_change_rate = fraction_changed(pred, base);
    out.push_back(std::move(c));
  }
  return out;
}

const SummaryRow* GridResult::find(ModelKind m, Scheme s, Paradigm p) const noexcept {
  for (const auto& row : summary) {
    if (row.model == m && row.scheme == s && row.paradigm == p) return &row;
  }
  return nullptr;
}

std::vector<SummaryRow> summarize(const std::vector<CellResult>& cells) {
  std::vector<SummaryRow> rows;
  auto row_for = [&](const CellResult& c) -> SummaryRow& {
    for (auto& r : rows) {
      if (r.model == c.model && r.scheme == c.scheme && r.paradigm == c.paradigm) return r;
    }
    rows.push_back({});
    rows.back().model = c.model;
    rows.back().scheme = c.scheme;
    rows.back().paradigm = c.paradigm;
    return rows.back();
  };
  struct Samples {
    std::vector<double> acc, prec, rec, f, change;
  };
  std::vector<Samples> samples;
  for (const auto& c : cells) {
    auto& r = row_for(c);
    const auto idx = static_cast<std::size_t>(&r - rows.data());
    if (samples.size() <= idx) samples.resize(idx + 1);
    ++r.runs;
    if (!c.ok()) {
      ++r.failed;
      continue;
    }
    auto& s = samples[idx];
    s.acc.push_back(c.metrics.accuracy);
    s.prec.push_back(c.metrics.precision);
    s.rec.push_back(c.metrics.recall);
    s.f.push_back(c.metrics.fscore);
    s.change.push_back(c.pred_change_rate);
    for (std::size_t i = 0; i < kNumClasses; ++i) {
      for (std::size_t j = 0; j < kNumClasses; ++j) r.confusion[i][j] += c.metrics.confusion[i][j];
    }
  }
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& s = samples[i];
    rows[i].accuracy = stat_of(s.acc);
    rows[i].precision = stat_of(s.prec);
    rows[i].recall = stat_of(s.rec);
    rows[i].fscore = stat_of(s.f);
    rows[i].pred_change_rate = stat_of(s.change);
  }
  return rows;
}

GridResult run_grid(const DataSplit& data, const ExperimentConfig& cfg) {
  cfg.validate();
  const auto tests = perturb_tests(data.test, cfg);

  GridResult grid;
  const std::size_t np = cfg.paradigms.size();
  const std::size_t ns = cfg.seeds.size();
  const std::size_t per_scheme = ns * np;
  const std::size_t per_model = cfg.schemes.size() * per_scheme;
  grid.cells.resize(cfg.models.size() * per_model);
  for (std::size_t m = 0; m < cfg.models.size(); ++m) {
    for (std::size_t s = 0; s < cfg.schemes.size(); ++s) {
      for (std::size_t k = 0; k < ns; ++k) {
        for (std::size_t p = 0; p < np; ++p) {
          auto& c = grid.cells[m * per_model + s * per_scheme + k * np + p];
          c.model = cfg.models[m];
          c.scheme = cfg.schemes[s];
          c.seed = cfg.seeds[k];
          c.paradigm = cfg.paradigms[p];
        }
      }
    }
  }

  for (std::size_t s = 0; s < cfg.schemes.size(); ++s) {
    PreparedScheme prepared;
    std::string failure;
    try {
      prepared = prepare_with(data.train, tests, cfg.schemes[s], cfg);
    } catch (const std::exception& e) {
      failure = describe(e);
    }
    const std::size_t runs = cfg.models.size() * ns;
    detail::parallel_for(
        runs,
        [&](std::size_t r) {
          const std::size_t m = r / ns;
          const std::size_t k = r % ns;
          CellResult* cells = &grid.cells[m * per_model + s * per_scheme + k * np];
          auto fail_all = [&](const std::string& why) {
            for (std::size_t p = 0; p < np; ++p) cells[p].status = "failed: " + why;
          };
          if (!failure.empty()) return fail_all(failure);
          try {
            ModelSpec spec;
            spec.kind = cfg.models[m];
            spec.input_dim = prepared.train.x.cols;
            spec.hidden = cfg.hidden;
            spec.seed = cfg.seeds[k];
            const auto result = train(spec, prepared.train, prepared.val, cfg.train);
            const auto scored = evaluate_model(result.model, prepared, cfg.paradigms);
            for (std::size_t p = 0; p < np; ++p) {
              cells[p].metrics = scored[p].metrics;
              cells[p].pred_change_rate = scored[p].pred_change_rate;
              cells[p].best_epoch = result.history.best_epoch;
            }
          } catch (const std::exception& e) {
            fail_all(describe(e));
          }
        },
        true);
  }
  grid.summary = summarize(grid.cells);
  return grid;
}

std::string results_csv_row(const CellResult& c) {
  std::ostringstream os;
  auto num = [](double v) { return io::format_double(v); };
  os << to_string(c.model) << ',' << to_string(c.scheme) << ',' << to_string(c.paradigm) << ','
     << c.seed << ',';
  // Status text is free-form; keep the row parseable.
  std::string status = c.status;
  std::replace(status.begin(), status.end(), ',', ';');
  std::replace(status.begin(), status.end(), '\n', ' ');
  os << status << ',';
  if (c.ok()) {
    os << num(c.metrics.accuracy) << ',' << num(c.metrics.precision) << ','
       << num(c.metrics.recall) << ',' << num(c.metrics.fscore) << ',' << c.metrics.total << ','
       << num(c.pred_change_rate) << ',' << c.best_epoch << ',';
    for (std::size_t i = 0; i < kNumClasses; ++i) {
      for (std::size_t j = 0; j < kNumClasses; ++j) {
        os << c.metrics.confusion[i][j] << (i + j == 2 * (kNumClasses - 1) ? "" : " ");
      }
    }
  } else {
    os << ",,,,,,,";
  }
  return os.str();
}

std::string format_table(const GridResult& grid, const ExperimentConfig& cfg) {
  std::ostringstream os;
  char cell[64];
  auto pm = [&](const Stat& s) {
    std::snprintf(cell, sizeof cell, "%6.2f+-%-5.2f", s.mean, s.stddev);
    return std::string(cell);
  };
  os << "Accuracy and macro F-score (%), mean+-std over seeds\n";
  for (auto m : cfg.models) {
    os << '\n' << to_string(m) << '\n';
    os << "  " << std::string(10, ' ');
    for (auto s : cfg.schemes) {
      std::snprintf(cell, sizeof cell, " | %-27s", std::string(to_string(s)).c_str());
      os << cell;
    }
    os << "\n  " << std::string(10, ' ');
    for (std::size_t i = 0; i < cfg.schemes.size(); ++i) {
      std::snprintf(cell, sizeof cell, " | %-13s %-13s", "acc", "F");
      os << cell;
    }
    os << '\n';
    for (auto p : cfg.paradigms) {
      std::snprintf(cell, sizeof cell, "  %-10s", std::string(to_string(p)).c_str());
      os << cell;
      for (auto s : cfg.schemes) {
        const auto* row = grid.find(m, s, p);
        if (!row || row->failed == row->runs) {
          std::snprintf(cell, sizeof cell, " | %-27s", "failed");
          os << cell;
        } else {
          os << " | " << pm(row->accuracy) << ' ' << pm(row->fscore);
        }
      }
      os << '\n';
    }
  }
  return os.str();
}

void write_results(const GridResult& grid, const ExperimentConfig& cfg,
                   const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir / "confusion");
  io::write_atomic(
      dir / "results.csv",
      [&](std::ostream& out) {
        out << kResultsHeader << '\n';
        for (const auto& c : grid.cells) out << results_csv_row(c) << '\n';
      },
      false);

  const char* names[] = {"up", "stationary", "down"};
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& r : grid.summary) {
    auto stat = [](const Stat& s) { return nlohmann::json{{"mean", s.mean}, {"std", s.stddev}}; };
    nlohmann::json cm = nlohmann::json::array();
    for (const auto& line : r.confusion) cm.push_back(line);
    rows.push_back({{"model", to_string(r.model)},
                    {"scheme", to_string(r.scheme)},
                    {"paradigm", to_string(r.paradigm)},
                    {"runs", r.runs},
                    {"failed", r.failed},
                    {"accuracy", stat(r.accuracy)},
                    {"precision", stat(r.precision)},
                    {"recall", stat(r.recall)},
                    {"fscore", stat(r.fscore)},
                    {"pred_change_rate", stat(r.pred_change_rate)},
                    {"confusion", cm}});

    const auto file = dir / "confusion" /
                      (std::string(to_string(r.model)) + "_" + std::string(to_string(r.scheme)) +
                       "_" + std::string(to_string(r.paradigm)) + ".csv");
    io::write_atomic(
        file,
        [&](std::ostream& out) {
          out << "true\\pred,up,stationary,down\n";
          for (std::size_t i = 0; i < kNumClasses; ++i) {
            out << names[i];
            for (std::size_t j = 0; j < kNumClasses; ++j) out << ',' << r.confusion[i][j];
            out << '\n';
          }
        },
        false);
  }
  nlohmann::json doc;
  doc["config"] = to_json(cfg);
  doc["class_order"] = {"up", "stationary", "down"};
  doc["rows"] = rows;
  write_json(dir / "summary.json", doc);
  io::write_atomic(dir / "table.txt", [&](std::ostream& out) { out << format_table(grid, cfg); },
                   false);
}

}  // namespace lobrep

#include "cli.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iterator>
#include <sstream>

#include "io_util.hpp"
#include "lobrep/error.hpp"
#include "lobrep/eval.hpp"
#include "lobrep/tensor_io.hpp"

namespace lobrep::cli {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

std::string fixed(double v, int digits = 2) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

/// FNV-1a over a byte stream.
class Fnv1a {
 public:
  void add(std::string_view bytes) {
    for (unsigned char c : bytes) {
      hash_ ^= c;
      hash_ *= 0x100000001b3ULL;
    }
  }
  void add_file(const fs::path& path) {
    auto in = io::open_in(path, true);
    char buf[1 << 16];
    while (in.read(buf, sizeof buf) || in.gcount() > 0) add({buf, static_cast<std::size_t>(in.gcount())});
  }
  std::string hex() const {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(hash_));
    return buf;
  }

 private:
  std::uint64_t hash_ = 0xcbf29ce484222325ULL;
};

// --- shared option groups ---------------------------------------------------

const CLI::IsMember kSchemeNames({"level_based", "mw", "accumulated_mw", "smoothed_mw"});

struct SourceOptions {
  std::string format = "events";
  double tick_size = 0.01;
  double min_order_size = 1;
  std::size_t levels = 10;
  bool transposed = false;
  std::size_t stride = 1;
  std::size_t max_depth = 0;

  void attach(CLI::App* app) {
    app->add_option("--format", format, "fi2010 | events | cache")
        ->check(CLI::IsMember({"fi2010", "events", "cache"}))
        ->capture_default_str();
    app->add_option("--tick-size", tick_size)->capture_default_str();
    app->add_option("--min-order-size", min_order_size)->capture_default_str();
    app->add_option("--levels,-L", levels, "view depth L")->capture_default_str();
    app->add_flag("--transposed", transposed, "fi2010 rows are features, columns samples");
    app->add_option("--replay-stride", stride, "emit every n-th snapshot of an event replay")
        ->capture_default_str();
    app->add_option("--max-depth", max_depth, "levels kept per side on replay, 0 = all")
        ->capture_default_str();
  }

  DataConfig config() const {
    DataConfig d;
    d.format = parse_data_format(format);
    d.tick_size = tick_size;
    d.min_order_size = min_order_size;
    d.levels = levels;
    d.transposed = transposed;
    d.replay_stride = stride;
    d.max_depth = max_depth;
    return d;
  }

  std::string canonical() const {
    std::ostringstream os;
    os << format << '|' << io::format_double(tick_size) << '|' << io::format_double(min_order_size)
       << '|' << levels << '|' << transposed << '|' << stride << '|' << max_depth;
    return os.str();
  }
};

struct WindowOptions {
  WindowConfig cfg;
  std::string scheme = "mw";
  std::size_t stride = 1;

  void attach(CLI::App* app) {
    app->add_option("--scheme", scheme, "level_based | mw | accumulated_mw | smoothed_mw")
        ->check(kSchemeNames)
        ->capture_default_str();
    app->add_option("--N,--history,-T", cfg.history, "snapshots per window")->capture_default_str();
    app->add_option("--W,--half-width", cfg.half_width, "price half width in ticks")
        ->capture_default_str();
    app->add_option("--sigma", cfg.sigma, "smoothing width in ticks")->capture_default_str();
    app->add_option("--truncation", cfg.truncation, "kernel radius in sigmas")->capture_default_str();
    app->add_option("--stride", stride, "distance between window ends")->capture_default_str();
  }
};

/// Config file plus flag overrides, kept as settings so a checkpoint can
/// record exactly what produced it.
struct ExperimentOptions {
  std::string config_path;
  std::vector<std::string> sets;

  void attach(CLI::App* app) {
    app->add_option("--config", config_path, "key = value experiment file")->check(CLI::ExistingFile);
    app->add_option("--set", sets, "override one key, key=value (repeatable)");
  }

  std::vector<Setting> settings() const {
    std::vector<Setting> out;
    if (!config_path.empty()) {
      auto in = io::open_in(config_path);
      out = read_settings(in);
    }
    for (const auto& s : sets) {
      const auto eq = s.find('=');
      if (eq == std::string::npos) throw Error(Errc::MalformedRow, "--set expects key=value, got '" + s + "'");
      out.push_back({s.substr(0, eq), s.substr(eq + 1), 0});
    }
    return out;
  }
};

json settings_json(const std::vector<Setting>& settings) {
  json j = json::array();
  for (const auto& s : settings) j.push_back({s.key, s.value});
  return j;
}

std::vector<Setting> settings_from_json(const json& j) {
  std::vector<Setting> out;
  for (const auto& kv : j) out.push_back({kv.at(0).get<std::string>(), kv.at(1).get<std::string>(), 0});
  return out;
}

json norm_json(const NormalizationSpec& n) {
  if (n.mode == NormMode::None) return nullptr;
  return {{"mode", "zscore"}, {"mean", n.mean}, {"std", n.stddev}};
}

NormalizationSpec norm_from_json(const json& j) {
  NormalizationSpec n;
  if (j.is_null()) return n;
  n.mode = NormMode::ZScore;
  n.mean = j.at("mean").get<std::vector<double>>();
  n.stddev = j.at("std").get<std::vector<double>>();
  return n;
}

std::vector<std::uint64_t> tensor_dims(Scheme scheme, std::size_t windows, const WindowConfig& w,
                                       std::size_t levels) {
  const std::uint64_t inner = scheme == Scheme::LevelBased ? 4 * levels : w.width();
  return {windows, w.history, inner};
}

json window_json(Scheme scheme, const WindowConfig& w, const SnapshotSeries& s) {
  return {{"scheme", to_string(scheme)},
          {"history", w.history},
          {"half_width", w.half_width},
          {"sigma", w.sigma},
          {"truncation", w.truncation},
          {"levels", s.levels},
          {"tick_size", s.grid.tick_size()}};
}

std::string metrics_line(const CellResult& c) {
  return std::string(to_string(c.model)) + " " + std::string(to_string(c.scheme)) + " " +
         std::string(to_string(c.paradigm)) + " seed=" + std::to_string(c.seed) +
         " accuracy=" + fixed(c.metrics.accuracy) + " precision=" + fixed(c.metrics.precision) +
         " recall=" + fixed(c.metrics.recall) + " fscore=" + fixed(c.metrics.fscore) +
         " changed=" + fixed(c.pred_change_rate, 3);
}

// --- subcommands --------------------------------------------------------------

struct Synth {
  SynthConfig cfg;
  std::string out = "corpus";

  void attach(CLI::App* app) {
    app->add_option("--out", out, "directory for day_XX.csv event files")->capture_default_str();
    app->add_option("--days", cfg.days)->capture_default_str();
    app->add_option("--events", cfg.events_per_day, "events per day")->capture_default_str();
    app->add_option("--seed", cfg.seed)->capture_default_str();
  }

  void run(std::ostream& os) const {
    const auto paths = write_corpus(cfg, out);
    os << "days=" << paths.size() << " events_per_day=" << cfg.events_per_day << " dir=" << out
       << '\n';
  }
};

struct Ingest {
  SourceOptions src;
  std::vector<std::string> inputs;
  std::string out;
  std::string normalize = "none";

  void attach(CLI::App* app) {
    src.attach(app);
    app->add_option("inputs", inputs, "one file per day")->required()->check(CLI::ExistingFile);
    app->add_option("--out", out, "cache path (default <first input>.lobs)");
    app->add_option("--normalize", normalize, "none | zscore: record level-feature statistics")
        ->check(CLI::IsMember({"none", "zscore"}))
        ->capture_default_str();
  }

  void run(std::ostream& os) const {
    const fs::path cache = out.empty() ? fs::path(inputs.front() + ".lobs") : fs::path(out);
    Fnv1a h;
    h.add(src.canonical());
    h.add(normalize);
    for (const auto& p : inputs) {
      h.add(p);
      h.add_file(p);
    }
    const auto side = sidecar_path(cache);
    if (fs::exists(cache) && fs::exists(side)) {
      const auto meta = read_json(side);
      if (meta.value("hash", "") == h.hex()) {
        os << "rows=" << meta.at("rows").get<std::size_t>() << " days=" << meta.at("days").get<std::size_t>()
           << " levels=" << meta.at("levels").get<std::size_t>() << " cache=" << cache.string()
           << " (reused)\n";
        return;
      }
    }
    auto data = src.config();
    if (data.format == DataFormat::Synthetic) throw Error(Errc::InvalidArgument, "ingest reads files");
    const std::vector<fs::path> paths(inputs.begin(), inputs.end());
    const auto series = load_days(data, paths, 0);
    series.validate();
    save_series(series, cache);

    json meta;
    meta["hash"] = h.hex();
    meta["format"] = src.format;
    meta["inputs"] = inputs;
    meta["options"] = src.canonical();
    meta["rows"] = series.size();
    meta["days"] = series.days().size();
    meta["levels"] = series.levels;
    meta["depth_truncated"] = series.depth_truncated;
    meta["has_labels"] = !series.provided_labels.empty();
    meta["normalization"] =
        normalize == "zscore" ? norm_json(fit_zscore(level_features(series))) : json(nullptr);
    write_json(side, meta);
    os << "rows=" << series.size() << " days=" << series.days().size() << " levels=" << series.levels
       << " cache=" << cache.string() << " (written)\n";
  }
};

struct Represent {
  std::string input, out;
  WindowOptions win;

  void attach(CLI::App* app) {
    app->add_option("--input", input, "snapshot cache")->required()->check(CLI::ExistingFile);
    app->add_option("--out", out, "tensor file")->required();
    win.attach(app);
  }

  void run(std::ostream& os) const {
    const auto series = load_series(input);
    const auto scheme = parse_scheme(win.scheme);
    win.cfg.validate();
    const auto ends = window_ends(series, win.cfg.history, 0, win.stride);
    if (ends.empty()) throw Error(Errc::EmptyInput, "no complete window in " + input);
    Tensor t;
    t.dims = tensor_dims(scheme, ends.size(), win.cfg, series.levels);
    t.values = build_windows(series, ends, scheme, win.cfg).data;
    write_tensor(out, t);
    auto meta = window_json(scheme, win.cfg, series);
    meta["dims"] = t.dims;
    meta["dtype"] = "f32";
    meta["stride"] = win.stride;
    meta["source"] = input;
    write_json(sidecar_path(out), meta);
    os << "windows=" << ends.size() << " dims=[" << t.dims[0] << ", " << t.dims[1] << ", " << t.dims[2]
       << "] tensor=" << out << '\n';
  }
};

struct Perturb {
  std::string input, out, paradigm = "both";
  PerturbationSpec spec;
  bool strict = false;

  void attach(CLI::App* app) {
    app->add_option("--input", input, "snapshot cache")->required()->check(CLI::ExistingFile);
    app->add_option("--out", out, "perturbed cache")->required();
    app->add_option("--paradigm", paradigm, "none | ask | bid | both")
        ->check(CLI::IsMember({"none", "ask", "bid", "both"}))
        ->capture_default_str();
    app->add_option("--order-size", spec.order_size, "volume per filled tick, 0 = min order size")
        ->default_val(0);
    app->add_option("--cap-level", spec.cap_level, "fill up to this level's price, 0 = L")
        ->capture_default_str();
    app->add_flag("--strict", strict, "reject depth-truncated series");
  }

  void run(std::ostream& os) const {
    const auto series = load_series(input);
    auto s = spec;
    s.paradigm = parse_paradigm(paradigm);
    if (s.order_size == 0) s.order_size = series.min_order_size;
    s.allow_truncated = !strict;
    const auto perturbed = perturb_series(series, s);
    save_series(perturbed, out);
    Volume added = 0;
    for (std::size_t i = 0; i < series.size(); ++i) {
      for (const auto* side : {&perturbed.images[i].asks, &perturbed.images[i].bids}) {
        for (const auto& l : *side) added += l.volume;
      }
      for (const auto* side : {&series.images[i].asks, &series.images[i].bids}) {
        for (const auto& l : *side) added -= l.volume;
      }
    }
    write_json(sidecar_path(out), {{"paradigm", paradigm},
                                   {"order_size", s.order_size},
                                   {"cap_level", s.cap_level},
                                   {"allow_truncated", s.allow_truncated},
                                   {"source", input},
                                   {"rows", perturbed.size()}});
    os << "rows=" << perturbed.size() << " paradigm=" << paradigm
       << " added_volume=" << io::format_double(added) << " cache=" << out << '\n';
  }
};

struct Label {
  std::string input, out;
  std::size_t horizon = kDefaultHorizon;
  double alpha = kDefaultAlpha;

  void attach(CLI::App* app) {
    app->add_option("--input", input, "snapshot cache")->required()->check(CLI::ExistingFile);
    app->add_option("--out", out, "labels CSV")->required();
    app->add_option("--horizon,-k", horizon)->capture_default_str();
    app->add_option("--alpha", alpha)->capture_default_str();
  }

  void run(std::ostream& os) const {
    const auto series = load_series(input);
    const auto ends = window_ends(series, 1, horizon);
    const auto mids = series.mids();
    const auto labels = compute_labels(mids, horizon, alpha);
    std::size_t counts[kNumClasses] = {};
    io::write_atomic(
        out,
        [&](std::ostream& f) {
          f << "index,day,mid,forward_mid,movement,class\n";
          for (auto t : ends) {
            const auto c = labels.classes[t];
            ++counts[static_cast<int>(c)];
            f << series.index[t] << ',' << series.day[t] << ',' << io::format_double(labels.current_mid[t])
              << ',' << io::format_double(labels.forward_mid[t]) << ','
              << io::format_double(labels.movement[t]) << ',' << to_string(c) << '\n';
          }
        },
        false);
    os << "labels=" << ends.size() << " up=" << counts[0] << " stationary=" << counts[1]
       << " down=" << counts[2] << " out=" << out << '\n';
  }
};

struct Export {
  std::string input, out, split = "all", label_source = "computed", norm_from;
  WindowOptions win;
  std::size_t horizon = kDefaultHorizon;
  double alpha = kDefaultAlpha;
  bool normalize = false;

  void attach(CLI::App* app) {
    app->add_option("--input", input, "snapshot cache")->required()->check(CLI::ExistingFile);
    app->add_option("--out", out, "feature tensor path; labels go to <out>.labels")->required();
    win.attach(app);
    app->add_option("--horizon,-k", horizon)->capture_default_str();
    app->add_option("--alpha", alpha)->capture_default_str();
    app->add_option("--label-source", label_source, "computed | provided")
        ->check(CLI::IsMember({"computed", "provided"}))
        ->capture_default_str();
    app->add_option("--split", split, "split tag recorded in the sidecar")->capture_default_str();
    auto* fit = app->add_flag("--normalize", normalize, "fit normalization on this export");
    app->add_option("--norm-from", norm_from, "apply normalization from another export's sidecar")
        ->check(CLI::ExistingFile)
        ->excludes(fit);
  }

  void run(std::ostream& os) const {
    const auto series = load_series(input);
    const auto scheme = parse_scheme(win.scheme);
    win.cfg.validate();
    const auto ends = window_ends(series, win.cfg.history, horizon, win.stride);
    if (ends.empty()) throw Error(Errc::EmptyInput, "no labelled window in " + input);
    const auto y = window_labels(series, ends, horizon, alpha, parse_label_source(label_source));
    auto x = build_windows(series, ends, scheme, win.cfg);

    NormalizationSpec norm;
    if (normalize) {
      norm = is_moving_window(scheme) ? fit_scalar_scale(x) : fit_zscore(x);
    } else if (!norm_from.empty()) {
      const auto other = read_json(norm_from);
      if (other.at("scheme") != to_string(scheme)) {
        throw Error(Errc::WrongScheme, "normalization source was exported for another scheme");
      }
      norm = norm_from_json(other.at("normalization"));
    }
    if (norm.mode != NormMode::None) x = lobrep::normalize(std::move(x), norm);

    Tensor features;
    features.dims = tensor_dims(scheme, ends.size(), win.cfg, series.levels);
    features.values = std::move(x.data);
    write_tensor(out, features);

    const fs::path label_path = out + ".labels";
    Tensor labels;
    labels.dims = {ends.size()};
    labels.values.assign(y.begin(), y.end());
    write_tensor(label_path, labels);

    auto meta = window_json(scheme, win.cfg, series);
    meta["dims"] = features.dims;
    meta["dtype"] = "f32";
    meta["labels"] = label_path.filename().string();
    meta["split"] = split;
    meta["horizon"] = horizon;
    meta["alpha"] = alpha;
    meta["label_source"] = label_source;
    meta["class_order"] = {"up", "stationary", "down"};
    meta["normalization"] = norm_json(norm);
    meta["stride"] = win.stride;
    meta["source"] = input;
    write_json(sidecar_path(out), meta);
    write_json(sidecar_path(label_path), {{"kind", "labels"},
                                          {"features", fs::path(out).filename().string()},
                                          {"dims", labels.dims},
                                          {"class_order", {"up", "stationary", "down"}},
                                          {"split", split}});
    os << "windows=" << ends.size() << " dims=[" << features.dims[0] << ", " << features.dims[1] << ", "
       << features.dims[2] << "] tensor=" << out << " labels=" << label_path.string() << '\n';
  }
};

struct Inspect {
  std::string input;

  void attach(CLI::App* app) {
    app->add_option("tensor", input, "tensor file")->required()->check(CLI::ExistingFile);
  }

  void run(std::ostream& os) const {
    const auto t = read_tensor(input);
    Fnv1a h;
    h.add_file(input);
    os << "dtype=" << (t.dtype == DType::F32 ? "f32" : "f64") << " dims=[";
    for (std::size_t i = 0; i < t.dims.size(); ++i) os << (i ? ", " : "") << t.dims[i];
    os << "] elements=" << t.element_count() << " fnv1a=" << h.hex() << '\n';
    if (fs::exists(sidecar_path(input))) os << read_json(sidecar_path(input)).dump(2) << '\n';
  }
};

struct Train {
  ExperimentOptions exp;
  std::string model = "linear", scheme = "mw", out;
  std::uint64_t seed = 1;

  void attach(CLI::App* app) {
    exp.attach(app);
    app->add_option("--model", model, "linear | mlp")
        ->check(CLI::IsMember({"linear", "mlp"}))
        ->capture_default_str();
    app->add_option("--scheme", scheme)->check(kSchemeNames)->capture_default_str();
    app->add_option("--seed", seed)->capture_default_str();
    app->add_option("--out", out, "checkpoint path")->required();
  }

  void run(std::ostream& os) const {
    auto settings = exp.settings();
    settings.push_back({"models", model, 0});
    settings.push_back({"schemes", scheme, 0});
    settings.push_back({"seed_list", std::to_string(seed), 0});
    settings.push_back({"paradigms", "none", 0});
    const auto cfg = apply_settings(settings);
    const auto data = load_data(cfg);
    const auto prepared = prepare_scheme(data, cfg.schemes.front(), cfg);

    ModelSpec spec;
    spec.kind = cfg.models.front();
    spec.input_dim = prepared.train.x.cols;
    spec.hidden = cfg.hidden;
    spec.seed = seed;
    const auto result = lobrep::train(spec, prepared.train, prepared.val, cfg.train);
    const Paradigm none[] = {Paradigm::None};
    const auto cell = evaluate_model(result.model, prepared, none).front();

    json extra;
    extra["scheme"] = to_string(prepared.scheme);
    extra["settings"] = settings_json(settings);
    extra["config"] = to_json(cfg);
    extra["best_epoch"] = result.history.best_epoch;
    extra["normalization"] = norm_json(prepared.norm);
    extra["metrics"] = {{"accuracy", cell.metrics.accuracy},
                        {"precision", cell.metrics.precision},
                        {"recall", cell.metrics.recall},
                        {"fscore", cell.metrics.fscore}};
    save_checkpoint(out, result.model, extra);
    os << metrics_line(cell) << " best_epoch=" << result.history.best_epoch << " checkpoint=" << out
       << '\n';
  }
};

struct Evaluate {
  std::string checkpoint, paradigms = "all", out;

  void attach(CLI::App* app) {
    app->add_option("--checkpoint", checkpoint)->required()->check(CLI::ExistingFile);
    app->add_option("--paradigms", paradigms, "comma list or all")->capture_default_str();
    app->add_option("--out", out, "directory for results.csv");
  }

  int run(std::ostream& os, std::ostream& es) const {
    json extra;
    const auto model = load_checkpoint(checkpoint, &extra);
    auto settings = settings_from_json(extra.at("settings"));
    settings.push_back({"paradigms", paradigms, 0});
    const auto cfg = apply_settings(settings);
    const auto data = load_data(cfg);
    const auto prepared = prepare_scheme(data, parse_scheme(extra.at("scheme").get<std::string>()), cfg);
    const auto cells = evaluate_model(model, prepared, cfg.paradigms);
    for (const auto& c : cells) os << metrics_line(c) << '\n';

    if (!out.empty()) {
      fs::create_directories(out);
      io::write_atomic(
          fs::path(out) / "results.csv",
          [&](std::ostream& f) {
            f << kResultsHeader << '\n';
            for (const auto& c : cells) f << results_csv_row(c) << '\n';
          },
          false);
    }

    const Paradigm none[] = {Paradigm::None};
    const auto base = evaluate_model(model, prepared, none).front().metrics;
    const auto& stored = extra.at("metrics");
    const bool same = stored.at("accuracy").get<double>() == base.accuracy &&
                      stored.at("precision").get<double>() == base.precision &&
                      stored.at("recall").get<double>() == base.recall &&
                      stored.at("fscore").get<double>() == base.fscore;
    if (!same) {
      es << "error: metrics differ from those stored with the checkpoint\n";
      return 1;
    }
    os << "stored metrics reproduced\n";
    return 0;
  }
};

struct Grid {
  ExperimentOptions exp;
  std::string models, schemes, paradigms, out = "results";
  std::size_t seeds = 0, epochs = 0;

  void attach(CLI::App* app) {
    exp.attach(app);
    app->add_option("--models", models, "comma list or all");
    app->add_option("--schemes", schemes, "comma list or all");
    app->add_option("--paradigms", paradigms, "comma list or all");
    app->add_option("--seeds", seeds, "number of seeds, 1..n");
    app->add_option("--epochs", epochs);
    app->add_option("--out", out, "results directory")->capture_default_str();
  }

  void run(std::ostream& os) const {
    auto settings = exp.settings();
    if (!models.empty()) settings.push_back({"models", models, 0});
    if (!schemes.empty()) settings.push_back({"schemes", schemes, 0});
    if (!paradigms.empty()) settings.push_back({"paradigms", paradigms, 0});
    if (seeds > 0) settings.push_back({"seeds", std::to_string(seeds), 0});
    if (epochs > 0) settings.push_back({"epochs", std::to_string(epochs), 0});
    const auto cfg = apply_settings(settings);
    const auto data = load_data(cfg);
    const auto grid = run_grid(data, cfg);
    write_results(grid, cfg, out);
    std::size_t failed = 0;
    for (const auto& c : grid.cells) failed += !c.ok();
    os << format_table(grid, cfg) << "\nrows=" << grid.cells.size() << " failed=" << failed
       << " results=" << (fs::path(out) / "results.csv").string() << '\n';
  }
};

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Limit order book representations, perturbation and forecasting experiments", "lobrep"};
  app.require_subcommand(1);

  Synth synth;
  Ingest ingest;
  Represent represent;
  Perturb perturb;
  Label label;
  Export exporter;
  Inspect inspect;
  Train train;
  Evaluate evaluate;
  Grid grid;
  auto* c_synth = app.add_subcommand("synth", "generate a synthetic event-stream corpus");
  auto* c_ingest = app.add_subcommand("ingest", "parse raw files into a snapshot cache");
  auto* c_represent = app.add_subcommand("represent", "build representation tensors");
  auto* c_perturb = app.add_subcommand("perturb", "fill empty ticks with minimum-size orders");
  auto* c_label = app.add_subcommand("label", "compute mid-price movement labels");
  auto* c_export = app.add_subcommand("export", "write feature and label tensors with sidecars");
  auto* c_inspect = app.add_subcommand("inspect", "print a tensor's header and sidecar");
  auto* c_train = app.add_subcommand("train", "train one model and save a checkpoint");
  auto* c_evaluate = app.add_subcommand("evaluate", "score a checkpoint on every paradigm");
  auto* c_grid = app.add_subcommand("grid", "run the model x scheme x paradigm x seed grid");
  synth.attach(c_synth);
  ingest.attach(c_ingest);
  represent.attach(c_represent);
  perturb.attach(c_perturb);
  label.attach(c_label);
  exporter.attach(c_export);
  inspect.attach(c_inspect);
  train.attach(c_train);
  evaluate.attach(c_evaluate);
  grid.attach(c_grid);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  }

  try {
    if (c_synth->parsed()) synth.run(out);
    if (c_ingest->parsed()) ingest.run(out);
    if (c_represent->parsed()) represent.run(out);
    if (c_perturb->parsed()) perturb.run(out);
    if (c_label->parsed()) label.run(out);
    if (c_export->parsed()) exporter.run(out);
    if (c_inspect->parsed()) inspect.run(out);
    if (c_train->parsed()) train.run(out);
    if (c_evaluate->parsed()) return evaluate.run(out, err);
    if (c_grid->parsed()) grid.run(out);
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return is_parse_error(e.code()) ? 2 : 1;
  } catch (const json::exception& e) {
    err << "error: malformed sidecar: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}

}  // namespace lobrep::cli

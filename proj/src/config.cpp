#include <algorithm>
#include <charconv>
#include <functional>
#include <istream>
#include <string>
#include <unordered_map>

#include "io_util.hpp"
#include "lobrep/error.hpp"
#include "lobrep/eval.hpp"

namespace lobrep {

std::string_view to_string(DataFormat f) noexcept {
  switch (f) {
    case DataFormat::Fi2010: return "fi2010";
    case DataFormat::Events: return "events";
    case DataFormat::Synthetic: return "synthetic";
    case DataFormat::Cache: return "cache";
  }
  return "?";
}

DataFormat parse_data_format(std::string_view name) {
  if (name == "fi2010") return DataFormat::Fi2010;
  if (name == "events") return DataFormat::Events;
  if (name == "synthetic") return DataFormat::Synthetic;
  if (name == "cache") return DataFormat::Cache;
  throw Error(Errc::InvalidArgument, "unknown data format '" + std::string(name) + "'");
}

std::string_view to_string(LabelSource s) noexcept {
  return s == LabelSource::Computed ? "computed" : "provided";
}

LabelSource parse_label_source(std::string_view name) {
  if (name == "computed") return LabelSource::Computed;
  if (name == "provided") return LabelSource::Provided;
  throw Error(Errc::InvalidArgument, "unknown label source '" + std::string(name) + "'");
}

void ExperimentConfig::validate() const {
  auto need = [](bool ok, const char* what) {
    if (!ok) throw Error(Errc::InvalidArgument, what);
  };
  need(!models.empty(), "no models selected");
  need(!schemes.empty(), "no schemes selected");
  need(!paradigms.empty(), "no paradigms selected");
  need(!seeds.empty(), "no seeds selected");
  need(std::none_of(hidden.begin(), hidden.end(), [](auto h) { return h == 0; }),
       "hidden layer sizes must be > 0");
  need(horizon >= 1, "horizon must be >= 1");
  need(alpha >= 0, "alpha must be >= 0");
  need(train_days >= 1, "train_days must be >= 1");
  need(val_fraction >= 0 && val_fraction < 1, "val_fraction must be in [0, 1)");
  need(sample_stride >= 1, "sample_stride must be >= 1");
  need(order_size >= 0, "order_size must be >= 0");
  need(data.levels >= 1, "levels must be >= 1");
  need(data.replay_stride >= 1, "replay_stride must be >= 1");
  need(data.tick_size > 0, "tick_size must be > 0");
  need(data.format == DataFormat::Synthetic || !data.paths.empty(), "no data paths given");
  window.validate();
  train.validate();
}

namespace {

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  return s.substr(b, s.find_last_not_of(" \t\r") - b + 1);
}

std::vector<std::string_view> split_list(std::string_view s) {
  std::vector<std::string_view> out;
  while (true) {
    const auto comma = s.find(',');
    const auto item = trim(s.substr(0, comma));
    if (!item.empty()) out.push_back(item);
    if (comma == std::string_view::npos) break;
    s.remove_prefix(comma + 1);
  }
  return out;
}

template <typename T>
T number(std::string_view s) {
  T value{};
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc{} || ptr != s.data() + s.size()) {
    throw Error(Errc::InvalidArgument, "'" + std::string(s) + "' is not a valid number");
  }
  return value;
}

bool boolean(std::string_view s) {
  if (s == "true" || s == "1" || s == "yes" || s == "on") return true;
  if (s == "false" || s == "0" || s == "no" || s == "off") return false;
  throw Error(Errc::InvalidArgument, "'" + std::string(s) + "' is not a boolean");
}

template <typename T, typename Parse, std::size_t N>
std::vector<T> enum_list(std::string_view s, Parse parse, const std::array<T, N>& all) {
  if (trim(s) == "all") return {all.begin(), all.end()};
  std::vector<T> out;
  for (auto item : split_list(s)) {
    const T v = parse(item);
    if (std::find(out.begin(), out.end(), v) == out.end()) out.push_back(v);
  }
  return out;
}

template <typename T>
std::vector<T> number_list(std::string_view s) {
  std::vector<T> out;
  for (auto item : split_list(s)) out.push_back(number<T>(item));
  return out;
}

std::vector<std::filesystem::path> path_list(std::string_view s) {
  std::vector<std::filesystem::path> out;
  for (auto item : split_list(s)) out.emplace_back(std::string(item));
  return out;
}

using Setter = std::function<void(ExperimentConfig&, std::string_view)>;

const std::unordered_map<std::string_view, Setter>& setters() {
  static const std::unordered_map<std::string_view, Setter> table = {
      {"models", [](auto& c, auto v) {
         c.models = enum_list(v, parse_model_kind,
                              std::array{ModelKind::Linear, ModelKind::Mlp});
       }},
      {"schemes", [](auto& c, auto v) { c.schemes = enum_list(v, parse_scheme, kAllSchemes); }},
      {"paradigms",
       [](auto& c, auto v) { c.paradigms = enum_list(v, parse_paradigm, kAllParadigms); }},
      {"seeds", [](auto& c, auto v) {
         const auto n = number<std::size_t>(v);
         c.seeds.clear();
         for (std::size_t i = 1; i <= n; ++i) c.seeds.push_back(i);
       }},
      {"seed_list", [](auto& c, auto v) { c.seeds = number_list<std::uint64_t>(v); }},
      {"hidden", [](auto& c, auto v) { c.hidden = number_list<std::size_t>(v); }},
      {"history", [](auto& c, auto v) { c.window.history = number<std::size_t>(v); }},
      {"half_width", [](auto& c, auto v) { c.window.half_width = number<std::size_t>(v); }},
      {"sigma", [](auto& c, auto v) { c.window.sigma = number<double>(v); }},
      {"truncation", [](auto& c, auto v) { c.window.truncation = number<double>(v); }},
      {"horizon", [](auto& c, auto v) { c.horizon = number<std::size_t>(v); }},
      {"alpha", [](auto& c, auto v) { c.alpha = number<double>(v); }},
      {"label_source", [](auto& c, auto v) { c.label_source = parse_label_source(v); }},
      {"train_days", [](auto& c, auto v) { c.train_days = number<std::size_t>(v); }},
      {"val_fraction", [](auto& c, auto v) { c.val_fraction = number<double>(v); }},
      {"sample_stride", [](auto& c, auto v) { c.sample_stride = number<std::size_t>(v); }},
      {"order_size", [](auto& c, auto v) { c.order_size = number<double>(v); }},
      {"cap_level", [](auto& c, auto v) { c.cap_level = number<std::size_t>(v); }},
      {"allow_truncated", [](auto& c, auto v) { c.allow_truncated = boolean(v); }},
      {"normalize", [](auto& c, auto v) { c.normalize = boolean(v); }},
      {"optimizer", [](auto& c, auto v) { c.train.optimizer = parse_optimizer(v); }},
      {"learning_rate", [](auto& c, auto v) { c.train.learning_rate = number<double>(v); }},
      {"batch_size", [](auto& c, auto v) { c.train.batch_size = number<std::size_t>(v); }},
      {"epochs", [](auto& c, auto v) { c.train.epochs = number<std::size_t>(v); }},
      {"patience", [](auto& c, auto v) { c.train.patience = number<std::size_t>(v); }},
      {"momentum", [](auto& c, auto v) { c.train.momentum = number<double>(v); }},
      {"format", [](auto& c, auto v) { c.data.format = parse_data_format(v); }},
      {"data", [](auto& c, auto v) { c.data.paths = path_list(v); }},
      {"test_data", [](auto& c, auto v) { c.data.test_paths = path_list(v); }},
      {"tick_size", [](auto& c, auto v) {
         c.data.tick_size = number<double>(v);
         c.data.synth.tick_size = c.data.tick_size;
       }},
      {"min_order_size", [](auto& c, auto v) {
         c.data.min_order_size = number<double>(v);
         c.data.synth.min_order_size = c.data.min_order_size;
       }},
      {"levels", [](auto& c, auto v) { c.data.levels = number<std::size_t>(v); }},
      {"transposed", [](auto& c, auto v) { c.data.transposed = boolean(v); }},
      {"replay_stride", [](auto& c, auto v) { c.data.replay_stride = number<std::size_t>(v); }},
      {"max_depth", [](auto& c, auto v) { c.data.max_depth = number<std::size_t>(v); }},
      {"synth_seed", [](auto& c, auto v) { c.data.synth.seed = number<std::uint64_t>(v); }},
      {"synth_days", [](auto& c, auto v) { c.data.synth.days = number<std::uint32_t>(v); }},
      {"synth_events",
       [](auto& c, auto v) { c.data.synth.events_per_day = number<std::size_t>(v); }},
      {"synth_start_tick", [](auto& c, auto v) { c.data.synth.start_tick = number<Tick>(v); }},
      {"synth_regime_switch",
       [](auto& c, auto v) { c.data.synth.regime_switch_prob = number<double>(v); }},
      {"synth_flow_tilt", [](auto& c, auto v) { c.data.synth.flow_tilt = number<double>(v); }},
      {"synth_placement_tilt",
       [](auto& c, auto v) { c.data.synth.placement_tilt = number<double>(v); }},
  };
  return table;
}

}  // namespace

void apply_setting(ExperimentConfig& cfg, std::string_view key, std::string_view value) {
  const auto it = setters().find(trim(key));
  if (it == setters().end()) {
    throw Error(Errc::MalformedRow, "unknown config key '" + std::string(trim(key)) + "'");
  }
  try {
    it->second(cfg, trim(value));
  } catch (const Error& e) {
    throw Error(Errc::MalformedRow, std::string(trim(key)) + ": " + e.detail());
  }
}

std::vector<Setting> read_settings(std::istream& in) {
  std::vector<Setting> out;
  std::string line;
  std::size_t n = 0;
  while (std::getline(in, line)) {
    ++n;
    std::string_view view = line;
    view = trim(view.substr(0, view.find('#')));
    if (view.empty()) continue;
    const auto eq = view.find('=');
    if (eq == std::string_view::npos) {
      throw Error(Errc::MalformedRow, "expected key = value", n);
    }
    out.push_back({std::string(trim(view.substr(0, eq))), std::string(trim(view.substr(eq + 1))), n});
  }
  return out;
}

ExperimentConfig apply_settings(const std::vector<Setting>& settings, ExperimentConfig base) {
  for (const auto& s : settings) {
    try {
      apply_setting(base, s.key, s.value);
    } catch (const Error& e) {
      throw Error(Errc::MalformedRow, e.detail(), s.line);
    }
  }
  return base;
}

ExperimentConfig parse_config(std::istream& in, ExperimentConfig base) {
  return apply_settings(read_settings(in), std::move(base));
}

ExperimentConfig load_config(const std::filesystem::path& path, ExperimentConfig base) {
  auto in = io::open_in(path);
  return parse_config(in, std::move(base));
}

nlohmann::json to_json(const ExperimentConfig& c) {
  auto names = [](const auto& items) {
    std::vector<std::string> out;
    for (auto v : items) out.emplace_back(to_string(v));
    return out;
  };
  auto paths = [](const auto& items) {
    std::vector<std::string> out;
    for (const auto& p : items) out.push_back(p.generic_string());
    return out;
  };
  nlohmann::json j;
  j["models"] = names(c.models);
  j["schemes"] = names(c.schemes);
  j["paradigms"] = names(c.paradigms);
  j["seeds"] = c.seeds;
  j["hidden"] = c.hidden;
  j["window"] = {{"history", c.window.history},
                 {"half_width", c.window.half_width},
                 {"sigma", c.window.sigma},
                 {"truncation", c.window.truncation}};
  j["horizon"] = c.horizon;
  j["alpha"] = c.alpha;
  j["label_source"] = to_string(c.label_source);
  j["train_days"] = c.train_days;
  j["val_fraction"] = c.val_fraction;
  j["sample_stride"] = c.sample_stride;
  j["perturbation"] = {{"order_size", c.order_size},
                       {"cap_level", c.cap_level},
                       {"allow_truncated", c.allow_truncated}};
  j["normalize"] = c.normalize;
  j["train"] = {{"optimizer", to_string(c.train.optimizer)},
                {"learning_rate", c.train.learning_rate},
                {"batch_size", c.train.batch_size},
                {"epochs", c.train.epochs},
                {"patience", c.train.patience},
                {"momentum", c.train.momentum}};
  const auto& d = c.data;
  j["data"] = {{"format", to_string(d.format)},
               {"paths", paths(d.paths)},
               {"test_paths", paths(d.test_paths)},
               {"tick_size", d.tick_size},
               {"min_order_size", d.min_order_size},
               {"levels", d.levels},
               {"transposed", d.transposed},
               {"replay_stride", d.replay_stride},
               {"max_depth", d.max_depth}};
  if (d.format == DataFormat::Synthetic) {
    const auto& s = d.synth;
    j["data"]["synth"] = {{"seed", s.seed},
                          {"days", s.days},
                          {"events_per_day", s.events_per_day},
                          {"start_tick", s.start_tick},
                          {"initial_levels", s.initial_levels},
                          {"min_depth", s.min_depth},
                          {"empty_tick_prob", s.empty_tick_prob},
                          {"regime_switch_prob", s.regime_switch_prob},
                          {"place_prob", s.place_prob},
                          {"cancel_prob", s.cancel_prob},
                          {"join_prob", s.join_prob},
                          {"flow_tilt", s.flow_tilt},
                          {"placement_tilt", s.placement_tilt},
                          {"min_volume", s.min_volume},
                          {"max_volume", s.max_volume}};
  }
  return j;
}

}  // namespace lobrep

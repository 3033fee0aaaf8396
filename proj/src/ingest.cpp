#include "lobrep/ingest.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>

#include "io_util.hpp"
#include "lobrep/error.hpp"

namespace lobrep {

namespace {

constexpr std::size_t kFi2010Features = 40;
constexpr std::size_t kLabelColumns = kFi2010Horizons.size();

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) {
    s.remove_prefix(1);
  }
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r' ||
                        s.back() == '\n')) {
    s.remove_suffix(1);
  }
  return s;
}

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> out;
  const bool comma = line.find(',') != std::string_view::npos;
  if (comma) {
    std::size_t start = 0;
    while (true) {
      auto pos = line.find(',', start);
      out.push_back(trim(line.substr(start, pos - start)));
      if (pos == std::string_view::npos) break;
      start = pos + 1;
    }
    return out;
  }
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
    const std::size_t start = i;
    while (i < line.size() && line[i] != ' ' && line[i] != '\t' && line[i] != '\r') ++i;
    if (i > start) out.push_back(line.substr(start, i - start));
  }
  return out;
}

double parse_number(std::string_view field, std::size_t line) {
  if (!field.empty() && field.front() == '+') field.remove_prefix(1);
  double value = 0;
  auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
  if (ec != std::errc() || ptr != field.data() + field.size() || !std::isfinite(value)) {
    throw Error(Errc::MalformedRow, "non-numeric field '" + std::string(field) + "'", line);
  }
  return value;
}

std::int8_t parse_label(double value, std::size_t line) {
  if (value == 1.0) return 0;
  if (value == 2.0) return 1;
  if (value == 3.0) return 2;
  throw Error(Errc::MalformedRow, "label must be 1, 2 or 3, got " + io::format_double(value),
              line);
}

BookImage image_from_features(std::span<const double> f, const TickGrid& grid,
                              std::size_t line) {
  BookImage img;
  constexpr std::size_t levels = kFi2010Features / 4;
  img.asks.reserve(levels);
  img.bids.reserve(levels);
  try {
    for (std::size_t i = 0; i < levels; ++i) {
      img.asks.push_back({grid.to_tick(f[4 * i]), f[4 * i + 1]});
      img.bids.push_back({grid.to_tick(f[4 * i + 2]), f[4 * i + 3]});
    }
    validate(img);
  } catch (const Error& e) {
    throw Error(Errc::InvalidSnapshot, e.detail(), line);
  }
  return img;
}

struct RawRow {
  std::vector<double> values;
  std::size_t line = 0;
};

std::vector<RawRow> read_rows(std::istream& in) {
  std::vector<RawRow> rows;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto view = trim(line);
    if (view.empty()) continue;
    RawRow row;
    row.line = lineno;
    for (auto field : split_fields(view)) row.values.push_back(parse_number(field, lineno));
    rows.push_back(std::move(row));
  }
  return rows;
}

std::vector<RawRow> transpose_rows(const std::vector<RawRow>& rows) {
  if (rows.empty()) return {};
  const std::size_t samples = rows.front().values.size();
  for (const auto& r : rows) {
    if (r.values.size() != samples) {
      throw Error(Errc::MalformedRow,
                  "transposed layout needs equal-length feature rows, expected " +
                      std::to_string(samples) + " got " + std::to_string(r.values.size()),
                  r.line);
    }
  }
  std::vector<RawRow> out(samples);
  for (std::size_t s = 0; s < samples; ++s) {
    out[s].line = s + 1;
    out[s].values.reserve(rows.size());
    for (const auto& r : rows) out[s].values.push_back(r.values[s]);
  }
  return out;
}

}  // namespace

LevelSnapshot SnapshotSeries::snapshot(std::size_t i) const {
  return top_levels(images.at(i), levels, grid, static_cast<std::size_t>(index.at(i)));
}

std::vector<double> SnapshotSeries::mids() const {
  std::vector<double> out;
  out.reserve(images.size());
  for (const auto& img : images) {
    out.push_back((grid.to_price(img.asks.front().price) +
                   grid.to_price(img.bids.front().price)) /
                  2.0);
  }
  return out;
}

std::vector<std::uint32_t> SnapshotSeries::days() const {
  std::vector<std::uint32_t> out;
  for (auto d : day) {
    if (std::find(out.begin(), out.end(), d) == out.end()) out.push_back(d);
  }
  return out;
}

void SnapshotSeries::validate() const {
  if (index.size() != images.size() || day.size() != images.size()) {
    throw Error(Errc::InvalidSnapshot, "series columns have inconsistent lengths");
  }
  if (!provided_labels.empty() && provided_labels.size() != images.size()) {
    throw Error(Errc::InvalidSnapshot, "provided labels do not cover every snapshot");
  }
  for (std::size_t i = 0; i < images.size(); ++i) {
    if (i > 0 && index[i] <= index[i - 1]) {
      throw Error(Errc::InvalidSnapshot, "snapshot indices not strictly increasing", i + 1);
    }
    try {
      lobrep::validate(images[i]);
    } catch (const Error& e) {
      throw Error(Errc::InvalidSnapshot, e.detail(), i + 1);
    }
    if (images[i].asks.size() < levels || images[i].bids.size() < levels) {
      throw Error(Errc::InvalidSnapshot, "fewer than L levels in snapshot", i + 1);
    }
  }
}

SnapshotSeries parse_fi2010(const std::filesystem::path& path, const Fi2010Options& opts) {
  auto in = io::open_in(path);
  return parse_fi2010(in, opts);
}

SnapshotSeries parse_fi2010(std::istream& in, const Fi2010Options& opts) {
  SnapshotSeries series;
  series.grid = TickGrid(opts.tick_size);
  series.min_order_size = opts.min_order_size;
  series.levels = kFi2010Features / 4;
  series.depth_truncated = true;

  auto rows = read_rows(in);
  if (opts.transposed) rows = transpose_rows(rows);

  std::optional<bool> labelled;
  for (const auto& row : rows) {
    const std::size_t n = row.values.size();
    if (n < kFi2010Features || (n > kFi2010Features && n < kFi2010Features + kLabelColumns)) {
      throw Error(Errc::MalformedRow,
                  "expected 40 features or at least 45 columns, got " + std::to_string(n),
                  row.line);
    }
    const bool has_labels = n > kFi2010Features;
    if (labelled && *labelled != has_labels) {
      throw Error(Errc::MalformedRow, "label columns present on some rows only", row.line);
    }
    labelled = has_labels;

    series.images.push_back(image_from_features(
        std::span<const double>(row.values).first(kFi2010Features), series.grid, row.line));
    series.index.push_back(series.images.size() - 1);
    series.day.push_back(opts.day);
    if (has_labels) {
      std::array<std::int8_t, 5> labels{};
      for (std::size_t h = 0; h < kLabelColumns; ++h) {
        labels[h] = parse_label(row.values[n - kLabelColumns + h], row.line);
      }
      series.provided_labels.push_back(labels);
    }
  }
  return series;
}

void write_fixture(const SnapshotSeries& series, const std::filesystem::path& path) {
  io::write_atomic(path, [&](std::ostream& out) {
    for (std::size_t i = 0; i < series.size(); ++i) {
      const auto s = series.snapshot(i);
      std::string line;
      for (std::size_t l = 0; l < s.levels(); ++l) {
        if (l > 0) line += ',';
        line += io::format_double(s.asks[l].price) + ',' + io::format_double(s.asks[l].volume) +
                ',' + io::format_double(s.bids[l].price) + ',' +
                io::format_double(s.bids[l].volume);
      }
      if (!series.provided_labels.empty()) {
        for (auto code : series.provided_labels[i]) line += ',' + std::to_string(code + 1);
      }
      out << line << '\n';
    }
  }, false);
}

TimedEvents read_events(const std::filesystem::path& path, const TickGrid& grid) {
  auto in = io::open_in(path);
  return read_events(in, grid);
}

TimedEvents read_events(std::istream& in, const TickGrid& grid) {
  TimedEvents out;
  std::string line;
  std::size_t lineno = 0;
  bool header = false;
  std::int64_t last_seq = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto view = trim(line);
    if (view.empty()) continue;
    if (!header) {
      std::string h;
      for (char c : view) {
        if (c != ' ') h += c;
      }
      if (h != "seq,kind,side,price,volume") {
        throw Error(Errc::MalformedRow, "event file must start with header "
                                        "'seq,kind,side,price,volume'", lineno);
      }
      header = true;
      continue;
    }
    auto fields = split_fields(view);
    if (fields.size() != 5) {
      throw Error(Errc::MalformedRow, "expected 5 fields, got " + std::to_string(fields.size()),
                  lineno);
    }
    std::int64_t seq = 0;
    auto [ptr, ec] = std::from_chars(fields[0].data(), fields[0].data() + fields[0].size(), seq);
    if (ec != std::errc() || ptr != fields[0].data() + fields[0].size()) {
      throw Error(Errc::MalformedRow, "seq is not an integer", lineno);
    }
    if (!out.events.empty() && seq <= last_seq) {
      throw Error(Errc::MalformedRow, "seq not strictly increasing", lineno);
    }
    last_seq = seq;

    BookEvent ev;
    if (fields[1] == "place") ev.kind = EventKind::Place;
    else if (fields[1] == "cancel") ev.kind = EventKind::Cancel;
    else if (fields[1] == "execute") ev.kind = EventKind::Execute;
    else throw Error(Errc::MalformedRow, "unknown kind '" + std::string(fields[1]) + "'", lineno);

    if (fields[2] == "ask") ev.side = Side::Ask;
    else if (fields[2] == "bid") ev.side = Side::Bid;
    else throw Error(Errc::MalformedRow, "unknown side '" + std::string(fields[2]) + "'", lineno);

    const double price = parse_number(fields[3], lineno);
    try {
      ev.price = grid.to_tick(price);
    } catch (const Error& e) {
      throw Error(Errc::OffTickGrid, e.detail(), lineno);
    }
    ev.volume = parse_number(fields[4], lineno);
    out.events.push_back(ev);
    out.lines.push_back(lineno);
  }
  if (!header) throw Error(Errc::MalformedRow, "empty event file", 1);
  return out;
}

void write_events(const std::filesystem::path& path, std::span<const BookEvent> events,
                  const TickGrid& grid) {
  io::write_atomic(path, [&](std::ostream& out) {
    out << "seq,kind,side,price,volume\n";
    std::uint64_t seq = 1;
    for (const auto& ev : events) {
      out << seq++ << ',' << to_string(ev.kind) << ',' << to_string(ev.side) << ','
          << io::format_double(grid.to_price(ev.price)) << ','
          << io::format_double(ev.volume) << '\n';
    }
  }, false);
}

SnapshotSeries replay_events(std::span<const BookEvent> events, double tick_size,
                             Volume min_order_size, const ReplayOptions& opts,
                             std::span<const std::size_t> lines) {
  if (opts.levels == 0 || opts.stride == 0) {
    throw Error(Errc::InvalidArgument, "levels and stride must be positive");
  }
  if (opts.max_depth != 0 && opts.max_depth < opts.levels) {
    throw Error(Errc::InvalidArgument, "max_depth must be 0 or at least levels");
  }
  SnapshotSeries series;
  series.grid = TickGrid(tick_size);
  series.min_order_size = min_order_size;
  series.levels = opts.levels;
  series.depth_truncated = opts.max_depth != 0;

  BookState book(tick_size, min_order_size);
  std::size_t eligible = 0;
  for (std::size_t i = 0; i < events.size(); ++i) {
    try {
      book.apply(events[i]);
    } catch (const Error& e) {
      const std::size_t line = i < lines.size() ? lines[i] : i + 1;
      throw Error(e.code(), e.detail(), line);
    }
    if (book.depth(Side::Ask) >= opts.levels && book.depth(Side::Bid) >= opts.levels) {
      if (eligible++ % opts.stride == 0) {
        series.images.push_back(book.image(opts.max_depth));
        series.index.push_back(i + 1);
        series.day.push_back(opts.day);
      }
    }
  }
  return series;
}

SnapshotSeries parse_events(const std::filesystem::path& path, double tick_size,
                            Volume min_order_size, const ReplayOptions& opts) {
  const auto timed = read_events(path, TickGrid(tick_size));
  return replay_events(timed.events, tick_size, min_order_size, opts, timed.lines);
}

SnapshotSeries concat(std::span<const SnapshotSeries> parts) {
  if (parts.empty()) throw Error(Errc::EmptyInput, "nothing to concatenate");
  SnapshotSeries out;
  out.grid = parts.front().grid;
  out.min_order_size = parts.front().min_order_size;
  out.levels = parts.front().levels;
  const bool labelled = !parts.front().provided_labels.empty();
  for (const auto& p : parts) {
    if (p.grid.tick_size() != out.grid.tick_size() || p.levels != out.levels) {
      throw Error(Errc::NonUniformDepth, "series differ in tick size or depth");
    }
    if (labelled != !p.provided_labels.empty() && !p.images.empty()) {
      throw Error(Errc::InvalidArgument, "cannot mix labelled and unlabelled series");
    }
    out.depth_truncated = out.depth_truncated || p.depth_truncated;
    for (std::size_t i = 0; i < p.size(); ++i) {
      out.index.push_back(out.images.size());
      out.day.push_back(p.day[i]);
      out.images.push_back(p.images[i]);
      if (labelled) out.provided_labels.push_back(p.provided_labels[i]);
    }
  }
  return out;
}

SnapshotSeries select_days(const SnapshotSeries& series, std::span<const std::uint32_t> days) {
  SnapshotSeries out;
  out.grid = series.grid;
  out.min_order_size = series.min_order_size;
  out.levels = series.levels;
  out.depth_truncated = series.depth_truncated;
  for (std::size_t i = 0; i < series.size(); ++i) {
    if (std::find(days.begin(), days.end(), series.day[i]) == days.end()) continue;
    out.index.push_back(series.index[i]);
    out.day.push_back(series.day[i]);
    out.images.push_back(series.images[i]);
    if (!series.provided_labels.empty()) out.provided_labels.push_back(series.provided_labels[i]);
  }
  return out;
}

Matrix level_features(const SnapshotSeries& series) {
  const std::size_t L = series.levels;
  Matrix out(series.size(), 4 * L);
  for (std::size_t i = 0; i < series.size(); ++i) {
    const auto& img = series.images[i];
    if (img.asks.size() < L || img.bids.size() < L) {
      throw Error(Errc::InsufficientDepth, "snapshot " + std::to_string(i) + " below L levels");
    }
    auto row = out.row(i);
    for (std::size_t l = 0; l < L; ++l) {
      row[4 * l] = series.grid.to_price(img.asks[l].price);
      row[4 * l + 1] = img.asks[l].volume;
      row[4 * l + 2] = series.grid.to_price(img.bids[l].price);
      row[4 * l + 3] = img.bids[l].volume;
    }
  }
  return out;
}

NormalizationSpec fit_zscore(const Matrix& rows) {
  if (rows.rows == 0) throw Error(Errc::EmptyInput, "no rows to fit normalization on");
  NormalizationSpec spec;
  spec.mode = NormMode::ZScore;
  spec.mean.assign(rows.cols, 0.0);
  spec.stddev.assign(rows.cols, 0.0);
  const double n = static_cast<double>(rows.rows);
  for (std::size_t r = 0; r < rows.rows; ++r) {
    for (std::size_t c = 0; c < rows.cols; ++c) spec.mean[c] += rows(r, c);
  }
  for (auto& m : spec.mean) m /= n;
  for (std::size_t r = 0; r < rows.rows; ++r) {
    for (std::size_t c = 0; c < rows.cols; ++c) {
      const double d = rows(r, c) - spec.mean[c];
      spec.stddev[c] += d * d;
    }
  }
  for (std::size_t c = 0; c < rows.cols; ++c) {
    spec.stddev[c] = std::sqrt(spec.stddev[c] / n);
    if (!(spec.stddev[c] > 0)) {
      throw Error(Errc::DegenerateFeature, "feature " + std::to_string(c) + " has zero variance");
    }
  }
  return spec;
}

NormalizationSpec fit_scalar_scale(const Matrix& rows) {
  if (rows.data.empty()) throw Error(Errc::EmptyInput, "no cells to fit scale on");
  double mean = 0;
  for (double v : rows.data) mean += v;
  mean /= static_cast<double>(rows.data.size());
  double var = 0;
  for (double v : rows.data) var += (v - mean) * (v - mean);
  const double sd = std::sqrt(var / static_cast<double>(rows.data.size()));
  if (!(sd > 0)) throw Error(Errc::DegenerateFeature, "all cells identical");
  NormalizationSpec spec;
  spec.mode = NormMode::ZScore;
  spec.mean.assign(rows.cols, 0.0);
  spec.stddev.assign(rows.cols, sd);
  return spec;
}

Matrix normalize(Matrix rows, const NormalizationSpec& spec) {
  if (spec.mode == NormMode::None) return rows;
  if (spec.mean.size() != rows.cols || spec.stddev.size() != rows.cols) {
    throw Error(Errc::DimMismatch, "normalization fitted on " + std::to_string(spec.mean.size()) +
                                       " features, applied to " + std::to_string(rows.cols));
  }
  for (std::size_t r = 0; r < rows.rows; ++r) {
    auto row = rows.row(r);
    for (std::size_t c = 0; c < rows.cols; ++c) row[c] = (row[c] - spec.mean[c]) / spec.stddev[c];
  }
  return rows;
}

Matrix denormalize(Matrix rows, const NormalizationSpec& spec) {
  if (spec.mode == NormMode::None) return rows;
  if (spec.mean.size() != rows.cols || spec.stddev.size() != rows.cols) {
    throw Error(Errc::DimMismatch, "normalization width mismatch");
  }
  for (std::size_t r = 0; r < rows.rows; ++r) {
    auto row = rows.row(r);
    for (std::size_t c = 0; c < rows.cols; ++c) row[c] = row[c] * spec.stddev[c] + spec.mean[c];
  }
  return rows;
}

namespace {
constexpr char kSeriesMagic[4] = {'L', 'O', 'B', 'S'};
constexpr std::uint16_t kSeriesVersion = 1;
}  // namespace

void save_series(const SnapshotSeries& s, const std::filesystem::path& path) {
  io::write_atomic(path, [&](std::ostream& out) {
    out.write(kSeriesMagic, 4);
    io::put(out, kSeriesVersion);
    io::put(out, s.grid.tick_size());
    io::put(out, s.min_order_size);
    io::put(out, static_cast<std::uint64_t>(s.levels));
    io::put(out, static_cast<std::uint8_t>(s.depth_truncated));
    io::put(out, static_cast<std::uint8_t>(!s.provided_labels.empty()));
    io::put(out, static_cast<std::uint64_t>(s.size()));
    for (std::size_t i = 0; i < s.size(); ++i) {
      io::put(out, s.index[i]);
      io::put(out, s.day[i]);
      io::put(out, static_cast<std::uint32_t>(s.images[i].asks.size()));
      io::put(out, static_cast<std::uint32_t>(s.images[i].bids.size()));
      for (const auto& l : s.images[i].asks) {
        io::put(out, l.price);
        io::put(out, l.volume);
      }
      for (const auto& l : s.images[i].bids) {
        io::put(out, l.price);
        io::put(out, l.volume);
      }
      if (!s.provided_labels.empty()) out.write(reinterpret_cast<const char*>(s.provided_labels[i].data()), 5);
    }
  });
}

SnapshotSeries load_series(const std::filesystem::path& path) {
  auto in = io::open_in(path, true);
  char magic[4];
  in.read(magic, 4);
  if (!in || !std::equal(magic, magic + 4, kSeriesMagic)) {
    throw Error(Errc::CorruptTensor, path.string() + " is not a snapshot cache");
  }
  if (io::get<std::uint16_t>(in) != kSeriesVersion) {
    throw Error(Errc::CorruptTensor, "unsupported snapshot cache version");
  }
  SnapshotSeries s;
  s.grid = TickGrid(io::get<double>(in));
  s.min_order_size = io::get<double>(in);
  s.levels = static_cast<std::size_t>(io::get<std::uint64_t>(in));
  s.depth_truncated = io::get<std::uint8_t>(in) != 0;
  const bool labelled = io::get<std::uint8_t>(in) != 0;
  const auto count = io::get<std::uint64_t>(in);
  s.index.reserve(count);
  s.day.reserve(count);
  s.images.reserve(count);
  for (std::uint64_t i = 0; i < count; ++i) {
    s.index.push_back(io::get<std::uint64_t>(in));
    s.day.push_back(io::get<std::uint32_t>(in));
    const auto na = io::get<std::uint32_t>(in);
    const auto nb = io::get<std::uint32_t>(in);
    BookImage img;
    img.asks.resize(na);
    img.bids.resize(nb);
    for (auto& l : img.asks) {
      l.price = io::get<Tick>(in);
      l.volume = io::get<double>(in);
    }
    for (auto& l : img.bids) {
      l.price = io::get<Tick>(in);
      l.volume = io::get<double>(in);
    }
    s.images.push_back(std::move(img));
    if (labelled) {
      std::array<std::int8_t, 5> lab{};
      in.read(reinterpret_cast<char*>(lab.data()), 5);
      if (!in) throw Error(Errc::CorruptTensor, "truncated snapshot cache");
      s.provided_labels.push_back(lab);
    }
  }
  return s;
}

}  // namespace lobrep

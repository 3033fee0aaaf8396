#include <gtest/gtest.h>

#include <cmath>
#include <fstream>
#include <random>
#include <sstream>

#include "lobrep/error.hpp"
#include "lobrep/ingest.hpp"
#include "support.hpp"

namespace lobrep {
namespace {

using testing::TempDir;

// One FI-2010 style row for an image shifted by `shift` ticks.
std::string fi_row(Tick shift, const std::string& labels = "") {
  const auto img = testing::example_book();
  std::ostringstream os;
  for (std::size_t l = 0; l < 10; ++l) {
    if (l > 0) os << ',';
    os << (img.asks[l].price + shift) / 100.0 << ',' << img.asks[l].volume << ','
       << (img.bids[l].price + shift) / 100.0 << ',' << img.bids[l].volume;
  }
  if (!labels.empty()) os << ',' << labels;
  return os.str();
}

Error parse_error(const std::string& text, const Fi2010Options& opts = {}) {
  std::istringstream in(text);
  try {
    parse_fi2010(in, opts);
  } catch (const Error& e) {
    return e;
  }
  ADD_FAILURE() << "input was accepted";
  return Error(Errc::InvalidArgument, "none");
}

TEST(Fi2010, ParsesRowsIntoImages) {
  std::istringstream in(fi_row(0) + "\n" + fi_row(1) + "\n");
  const auto s = parse_fi2010(in);
  ASSERT_EQ(s.size(), 2u);
  EXPECT_EQ(s.levels, 10u);
  EXPECT_TRUE(s.depth_truncated);
  EXPECT_EQ(s.images[0], testing::example_book());
  EXPECT_EQ(s.images[1].asks[0].price, 1003);
  EXPECT_DOUBLE_EQ(s.snapshot(0).asks[0].price, 10.02);
  EXPECT_DOUBLE_EQ(s.mids()[0], 10.0);
  EXPECT_TRUE(s.provided_labels.empty());
}

TEST(Fi2010, LabelColumnsMapToClassCodes) {
  // 144-column rows: 40 LOB features, 99 other features, 5 labels.
  std::string extra;
  for (int i = 0; i < 99; ++i) extra += "0.5,";
  std::istringstream in(fi_row(0, extra + "1,2,3,2,1") + "\n");
  const auto s = parse_fi2010(in);
  ASSERT_EQ(s.provided_labels.size(), 1u);
  const std::array<std::int8_t, 5> expected{0, 1, 2, 1, 0};
  EXPECT_EQ(s.provided_labels[0], expected);
}

TEST(Fi2010, TransposedLayoutMatchesRowLayout) {
  std::istringstream rows_in(fi_row(0) + "\n" + fi_row(2) + "\n" + fi_row(-1) + "\n");
  const auto by_rows = parse_fi2010(rows_in);

  std::vector<std::vector<std::string>> cells;
  for (Tick shift : {0, 2, -1}) {
    std::vector<std::string> fields;
    std::stringstream ss(fi_row(shift));
    std::string f;
    while (std::getline(ss, f, ',')) fields.push_back(f);
    cells.push_back(fields);
  }
  std::string text;
  for (std::size_t feature = 0; feature < 40; ++feature) {
    for (std::size_t s = 0; s < cells.size(); ++s) {
      text += (s ? " " : "") + cells[s][feature];
    }
    text += '\n';
  }
  std::istringstream t_in(text);
  Fi2010Options opts;
  opts.transposed = true;
  const auto by_cols = parse_fi2010(t_in, opts);
  EXPECT_EQ(by_cols.images, by_rows.images);
}

TEST(Fi2010, MalformedRowIsReportedByLine) {
  std::string text;
  for (int i = 1; i <= 20; ++i) text += (i == 17 ? fi_row(0) + ",abc" : fi_row(0)) + "\n";
  const auto e = parse_error(text);
  EXPECT_EQ(e.code(), Errc::MalformedRow);
  EXPECT_EQ(e.line(), 17u);
  EXPECT_NE(std::string(e.what()).find("17"), std::string::npos);
}

TEST(Fi2010, ShortRowAndBadLabelAreMalformed) {
  EXPECT_EQ(parse_error("1,2,3\n").code(), Errc::MalformedRow);
  const auto bad = parse_error(fi_row(0) + "\n" + fi_row(0, "1,2,4,1,1") + "\n");
  EXPECT_EQ(bad.code(), Errc::MalformedRow);
  EXPECT_EQ(bad.line(), 2u);
}

TEST(Fi2010, CrossedOrOffGridSnapshotIsInvalid) {
  std::string crossed = fi_row(0);
  crossed.replace(0, crossed.find(','), "9.9");
  auto e = parse_error(fi_row(0) + "\n" + crossed + "\n");
  EXPECT_EQ(e.code(), Errc::InvalidSnapshot);
  EXPECT_EQ(e.line(), 2u);

  std::string off = fi_row(0);
  off.replace(0, off.find(','), "10.025");
  EXPECT_EQ(parse_error(off + "\n").code(), Errc::InvalidSnapshot);
}

TEST(Fi2010, FixtureRoundTrip) {
  TempDir dir;
  std::mt19937_64 rng(3);
  auto s = testing::random_series(rng, 50, 10, 10);
  s.depth_truncated = true;
  for (std::size_t i = 0; i < s.size(); ++i) s.provided_labels.push_back({0, 1, 2, 1, 0});
  write_fixture(s, dir / "fix.txt");
  const auto back = parse_fi2010(dir / "fix.txt");
  EXPECT_EQ(back.images, s.images);
  EXPECT_EQ(back.provided_labels, s.provided_labels);
}

TEST(Events, WriteReadRoundTrip) {
  TempDir dir;
  std::mt19937_64 rng(8);
  const auto events = testing::random_valid_events(rng, 500);
  const TickGrid grid(0.01);
  write_events(dir / "e.csv", events, grid);
  const auto back = read_events(dir / "e.csv", grid);
  ASSERT_EQ(back.events.size(), events.size());
  for (std::size_t i = 0; i < events.size(); ++i) {
    EXPECT_EQ(back.events[i].kind, events[i].kind);
    EXPECT_EQ(back.events[i].side, events[i].side);
    EXPECT_EQ(back.events[i].price, events[i].price);
    EXPECT_EQ(back.events[i].volume, events[i].volume);
    EXPECT_EQ(back.lines[i], i + 2);
  }
}

TEST(Events, RejectsMalformedInput) {
  const TickGrid grid(0.01);
  auto code_line = [&](const std::string& text) {
    std::istringstream in(text);
    try {
      read_events(in, grid);
    } catch (const Error& e) {
      return std::make_pair(e.code(), e.line());
    }
    return std::make_pair(Errc::InvalidArgument, std::size_t{0});
  };
  const std::string head = "seq,kind,side,price,volume\n";
  EXPECT_EQ(code_line("1,place,ask,10.01,5\n"), std::make_pair(Errc::MalformedRow, 1ul));
  EXPECT_EQ(code_line(head + "1,place,ask,10.01,5\n1,place,ask,10.02,5\n"),
            std::make_pair(Errc::MalformedRow, 3ul));
  EXPECT_EQ(code_line(head + "1,modify,ask,10.01,5\n"), std::make_pair(Errc::MalformedRow, 2ul));
  EXPECT_EQ(code_line(head + "1,place,up,10.01,5\n"), std::make_pair(Errc::MalformedRow, 2ul));
  EXPECT_EQ(code_line(head + "1,place,ask,10.015,5\n"), std::make_pair(Errc::OffTickGrid, 2ul));
  EXPECT_EQ(code_line(head + "1,place,ask,10.01\n"), std::make_pair(Errc::MalformedRow, 2ul));
}

TEST(Events, ReplayEmitsOnceDepthIsReached) {
  std::vector<BookEvent> events;
  for (Tick i = 0; i < 3; ++i) {
    events.push_back({EventKind::Place, Side::Ask, 1001 + i, 5});
    events.push_back({EventKind::Place, Side::Bid, 999 - i, 5});
  }
  events.push_back({EventKind::Place, Side::Ask, 1010, 1});
  events.push_back({EventKind::Execute, Side::Ask, 1001, 2});
  ReplayOptions opts;
  opts.levels = 3;
  const auto s = replay_events(events, 0.01, 1, opts);
  ASSERT_EQ(s.size(), 3u);
  EXPECT_EQ(s.index, (std::vector<std::uint64_t>{6, 7, 8}));
  EXPECT_EQ(s.images[2].asks[0].volume, 3);
  EXPECT_EQ(s.images[1].asks.size(), 4u);
  EXPECT_FALSE(s.depth_truncated);

  opts.max_depth = 3;
  opts.stride = 2;
  const auto t = replay_events(events, 0.01, 1, opts);
  ASSERT_EQ(t.size(), 2u);
  EXPECT_EQ(t.images[1].asks.size(), 3u);
  EXPECT_TRUE(t.depth_truncated);
}

TEST(Events, ReplayErrorCarriesSourceLine) {
  const std::vector<BookEvent> events{{EventKind::Place, Side::Ask, 1001, 5},
                                      {EventKind::Cancel, Side::Ask, 1002, 1}};
  const std::vector<std::size_t> lines{4, 9};
  try {
    replay_events(events, 0.01, 1, {}, lines);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::UnknownLevel);
    EXPECT_EQ(e.line(), 9u);
  }
}

TEST(Series, ConcatAndSelectDays) {
  std::mt19937_64 rng(4);
  auto a = testing::random_series(rng, 10, 5, 6);
  auto b = testing::random_series(rng, 7, 5, 6);
  for (auto& d : b.day) d = 1;
  const std::vector<SnapshotSeries> parts{a, b};
  const auto all = concat(parts);
  ASSERT_EQ(all.size(), 17u);
  EXPECT_EQ(all.days(), (std::vector<std::uint32_t>{0, 1}));
  all.validate();
  const std::vector<std::uint32_t> keep{1};
  const auto only = select_days(all, keep);
  ASSERT_EQ(only.size(), 7u);
  EXPECT_EQ(only.images.front(), b.images.front());

  auto c = testing::random_series(rng, 3, 4, 6);
  const std::vector<SnapshotSeries> bad{a, c};
  EXPECT_THROW(concat(bad), Error);
}

TEST(Series, ValidateFlagsBrokenInvariants) {
  std::mt19937_64 rng(4);
  auto s = testing::random_series(rng, 5, 5, 6);
  s.index[3] = s.index[2];
  EXPECT_THROW(s.validate(), Error);
  s = testing::random_series(rng, 5, 5, 4);
  try {
    s.validate();
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::InvalidSnapshot);
  }
}

TEST(Series, LevelFeaturesColumnOrder) {
  SnapshotSeries s;
  s.levels = 10;
  s.images.push_back(testing::example_book());
  s.index.push_back(0);
  s.day.push_back(0);
  const auto m = level_features(s);
  ASSERT_EQ(m.cols, 40u);
  EXPECT_DOUBLE_EQ(m(0, 0), 10.02);
  EXPECT_DOUBLE_EQ(m(0, 1), 30);
  EXPECT_DOUBLE_EQ(m(0, 2), 9.98);
  EXPECT_DOUBLE_EQ(m(0, 3), 40);
  EXPECT_DOUBLE_EQ(m(0, 36), 10.17);
  EXPECT_DOUBLE_EQ(m(0, 39), 60);
}

TEST(Series, CacheRoundTripIsExact) {
  TempDir dir;
  std::mt19937_64 rng(12);
  auto s = testing::random_series(rng, 40, 10, 15, 2);
  s.images[5].asks[0].volume = 0.1 + 0.2;
  for (std::size_t i = 0; i < s.size(); ++i) s.provided_labels.push_back({2, 1, 0, 1, 2});
  save_series(s, dir / "s.lobs");
  const auto back = load_series(dir / "s.lobs");
  EXPECT_EQ(back.images, s.images);
  EXPECT_EQ(back.index, s.index);
  EXPECT_EQ(back.day, s.day);
  EXPECT_EQ(back.provided_labels, s.provided_labels);
  EXPECT_EQ(back.levels, s.levels);

  std::ofstream(dir / "bad.lobs", std::ios::binary) << "LOBX";
  try {
    load_series(dir / "bad.lobs");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::CorruptTensor);
  }
}

TEST(Normalization, ZScoreRoundTrip) {
  std::mt19937_64 rng(2);
  std::normal_distribution<double> g(5, 3);
  Matrix m(1000, 6);
  for (auto& v : m.data) v = g(rng);
  const auto spec = fit_zscore(m);
  const auto z = normalize(m, spec);
  for (std::size_t c = 0; c < m.cols; ++c) {
    double mean = 0, sq = 0;
    for (std::size_t r = 0; r < m.rows; ++r) mean += z(r, c);
    mean /= m.rows;
    for (std::size_t r = 0; r < m.rows; ++r) sq += (z(r, c) - mean) * (z(r, c) - mean);
    EXPECT_NEAR(mean, 0, 1e-12);
    EXPECT_NEAR(sq / m.rows, 1, 1e-12);
  }
  const auto back = denormalize(z, spec);
  for (std::size_t i = 0; i < m.data.size(); ++i) EXPECT_NEAR(back.data[i], m.data[i], 1e-12);
}

TEST(Normalization, ScalarScaleSharesOneStd) {
  Matrix m(2, 2);
  m.data = {1, -1, 3, -3};
  const auto spec = fit_scalar_scale(m);
  EXPECT_EQ(spec.mean, (std::vector<double>{0, 0}));
  EXPECT_DOUBLE_EQ(spec.stddev[0], std::sqrt(5.0));
  EXPECT_DOUBLE_EQ(spec.stddev[1], spec.stddev[0]);
}

TEST(Normalization, Errors) {
  Matrix flat(3, 2, 1.0);
  EXPECT_THROW(fit_zscore(flat), Error);
  EXPECT_THROW(fit_scalar_scale(flat), Error);
  EXPECT_THROW(fit_zscore(Matrix(0, 2)), Error);
  Matrix m(2, 2);
  m.data = {1, 2, 3, 5};
  const auto spec = fit_zscore(m);
  EXPECT_THROW(normalize(Matrix(2, 3), spec), Error);
  NormalizationSpec none;
  EXPECT_EQ(normalize(m, none), m);
}

}  // namespace
}  // namespace lobrep

#include "texgeo/retrieval.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <boost/math/special_functions/digamma.hpp>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>

#include <unistd.h>

#include "texgeo/report_io.hpp"

namespace texgeo {
namespace {

namespace fs = std::filesystem;

class TempDir : public ::testing::Test {
 protected:
  void SetUp() override {
    const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
    dir_ = fs::temp_directory_path() / ("texgeo_retr_" + std::to_string(::getpid()) + "_" + info->name());
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }
  void touch(const fs::path& rel) const {
    fs::create_directories((dir_ / rel).parent_path());
    std::ofstream(dir_ / rel) << "x";
  }
  fs::path dir_;
};

// ---------------------------------------------------------------------------
// Ingestion

TEST_F(TempDir, DirPerClassCounts) {
  for (int c = 0; c < 40; ++c)
    for (int i = 0; i < 16; ++i) touch("class" + std::to_string(c) + "/img" + std::to_string(i) + ".png");
  touch("class0/notes.txt");
  touch("stray.png");  // not inside a class directory
  const auto idx = ingest_dataset(dir_.string(), Layout::DirPerClass);
  EXPECT_EQ(idx.size(), 640u);
  EXPECT_EQ(idx.uniform_class_size(), 16u);
  EXPECT_EQ(idx.class_sizes().size(), 40u);
  EXPECT_TRUE(std::is_sorted(idx.items.begin(), idx.items.end(), [](auto& a, auto& b) { return a.id < b.id; }));
  EXPECT_EQ(idx.items.front().id, "class0/img0.png");
  EXPECT_TRUE(idx.warnings.empty());
}

TEST_F(TempDir, PrefixMapCounts) {
  std::ofstream m(dir_ / "classes.txt");
  m << "# prefix,class\n";
  for (int c = 0; c < 111; ++c) {
    m << "D" << c << "_,D" << c << "\n";
    for (int i = 0; i < 16; ++i) touch("D" + std::to_string(c) + "_" + std::to_string(i) + ".pgm");
  }
  m.close();
  touch("unknown.png");
  const auto idx = ingest_dataset(dir_.string(), Layout::PrefixMap);
  EXPECT_EQ(idx.size(), 1776u);
  EXPECT_EQ(idx.uniform_class_size(), 16u);
  ASSERT_EQ(idx.warnings.size(), 1u);
  EXPECT_NE(idx.warnings[0].find("unknown.png"), std::string::npos);
}

TEST_F(TempDir, PrefixMapLongestPrefixWins) {
  std::ofstream(dir_ / "classes.txt") << "D1,one\nD10,ten\n";
  touch("D1a.png");
  touch("D10a.png");
  const auto idx = ingest_dataset(dir_.string(), Layout::PrefixMap);
  ASSERT_EQ(idx.size(), 2u);
  EXPECT_EQ(idx.items[0].id, "D10a.png");
  EXPECT_EQ(idx.items[0].label, "ten");
  EXPECT_EQ(idx.items[1].label, "one");
}

TEST_F(TempDir, EmptyAndSingleton) {
  EXPECT_THROW(ingest_dataset(dir_.string(), Layout::DirPerClass), EmptyDataset);
  fs::create_directories(dir_ / "a");
  EXPECT_THROW(ingest_dataset(dir_.string(), Layout::DirPerClass), EmptyDataset);
  touch("a/1.png");
  touch("a/2.png");
  touch("b/1.png");
  const auto idx = ingest_dataset(dir_.string(), Layout::DirPerClass);
  EXPECT_EQ(idx.size(), 3u);
  ASSERT_FALSE(idx.warnings.empty());
  EXPECT_NE(idx.warnings[0].find("'b'"), std::string::npos);
  EXPECT_THROW(ingest_dataset((dir_ / "missing").string(), Layout::DirPerClass), IoError);
  EXPECT_THROW(ingest_dataset(dir_.string(), Layout::PrefixMap), IoError);  // no manifest
}

// ---------------------------------------------------------------------------
// Signature distance

double gamma_kl_oracle(double a1, double b1, double a2, double b2) {
  return (b1 - b2) * boost::math::digamma(b1) - std::lgamma(b1) + std::lgamma(b2) + b2 * std::log(a2 / a1) +
         b1 * (a1 - a2) / a2;
}

TEST(SignatureDistance, ZeroForIdentical) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> U(0.3, 3);
  std::vector<Vec2> p;
  for (int j = 0; j < 12; ++j) p.push_back({U(rng), U(rng)});
  for (Family f : {Family::Gamma, Family::Weibull}) {
    const Signature a(f, 2, p);
    for (Measure m : {Measure::KLD, Measure::SKLD, Measure::GDSKLD})
      for (Aggregation g : {Aggregation::Sum, Aggregation::L2}) EXPECT_EQ(signature_distance(a, a, m, g), 0.0);
  }
}

TEST(SignatureDistance, SingleDifference) {
  std::vector<Vec2> p(6, Vec2{1.0, 2.0});
  auto q = p;
  q[4] = {1.5, 3.0};
  const Signature a(Family::Weibull, 1, p), b(Family::Weibull, 1, q);
  for (Measure m : {Measure::KLD, Measure::SKLD, Measure::GDSKLD}) {
    const double one = point_measure(ManifoldPoint(Family::Weibull, p[4]), ManifoldPoint(Family::Weibull, q[4]), m);
    EXPECT_NEAR(signature_distance(a, b, m, Aggregation::Sum), one, 1e-15);
    EXPECT_NEAR(signature_distance(a, b, m, Aggregation::L2), one, 1e-15);
  }
}

TEST(SignatureDistance, GdskldSumMatchesRecomputation) {
  const std::vector<Vec2> p = {{1, 1}, {2, 0.5}, {0.7, 3}, {1.2, 1.2}, {3, 2}, {0.4, 0.9}};
  const std::vector<Vec2> q = {{1.5, 1}, {1.8, 0.6}, {0.7, 2.5}, {1.0, 1.4}, {2.5, 2.5}, {0.5, 0.8}};
  double expect = 0, expect_l2 = 0;
  for (std::size_t j = 0; j < 6; ++j) {
    const double s = 0.5 * (gamma_kl_oracle(p[j][0], p[j][1], q[j][0], q[j][1]) +
                            gamma_kl_oracle(q[j][0], q[j][1], p[j][0], p[j][1]));
    expect += std::sqrt(2 * s);
    expect_l2 += 2 * s;
  }
  const Signature a(Family::Gamma, 1, p), b(Family::Gamma, 1, q);
  EXPECT_NEAR(signature_distance(a, b), expect, 1e-12 * expect);
  EXPECT_NEAR(signature_distance(a, b, Measure::GDSKLD, Aggregation::L2), std::sqrt(expect_l2), 1e-12);
}

TEST(SignatureDistance, StructureMismatch) {
  const Signature a(Family::Gamma, 1, std::vector<Vec2>(6, Vec2{1, 1}));
  const Signature b(Family::Gamma, 2, std::vector<Vec2>(12, Vec2{1, 1}));
  const Signature c(Family::Weibull, 1, std::vector<Vec2>(6, Vec2{1, 1}));
  EXPECT_THROW(signature_distance(a, b), StructureMismatch);
  EXPECT_THROW(signature_distance(a, c), StructureMismatch);
}

// ---------------------------------------------------------------------------
// ARR and evaluation

TEST(Arr, HandComputedCase) {
  const std::vector<std::size_t> hits = {2, 2, 1, 2};
  EXPECT_EQ(arr_from_hits(hits, 2), 0.875);
  EXPECT_EQ(arr_from_hits(std::vector<std::size_t>{3, 1}, std::vector<std::size_t>{3, 2}), 0.75);
  EXPECT_THROW(arr_from_hits(std::vector<std::size_t>{}, 2), EmptyDataset);
}

DatasetIndex make_index(const std::vector<std::string>& labels) {
  DatasetIndex idx;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    char id[16];
    std::snprintf(id, sizeof id, "item%03zu", i);
    idx.items.push_back({id, {}, labels[i]});
  }
  return idx;
}

TEST(Arr, RankingProducesHandCase) {
  const auto idx = make_index({"A", "A", "B", "B"});
  DistanceMatrix D(4, {0, 0.5, 1, 3, 0.5, 0, 3, 3, 1, 3, 0, 2, 3, 3, 2, 0}, {});
  const auto R = rank_all(D, idx, Method::KLD, true);
  const auto rep = report_at(R, 2);
  EXPECT_EQ(rep.hits, (std::vector<std::size_t>{2, 2, 1, 2}));
  EXPECT_EQ(rep.arr, 0.875);
  EXPECT_THROW(report_at(R, 1), DomainError);  // K < N_R
  EXPECT_THROW(report_at(R, 5), DomainError);
  EXPECT_EQ(report_at(R, 4).arr, 1.0);
}

TEST(Arr, TiesBrokenByIdOrder) {
  const auto idx = make_index({"A", "B", "A", "B"});
  DistanceMatrix D(4, std::vector<double>(16, 1.0), {});
  for (std::size_t i = 0; i < 4; ++i) D(i, i) = 0;
  const auto R = rank_all(D, idx, Method::SKLD, true);
  EXPECT_EQ(R.queries[3].ranking, (std::vector<std::size_t>{3, 0, 1, 2}));
  const auto X = rank_all(D, idx, Method::SKLD, false);
  EXPECT_EQ(X.queries[3].ranking, (std::vector<std::size_t>{0, 1, 2}));
  EXPECT_EQ(X.queries[3].relevant, 1u);
}

Signature jittered(Family f, int levels, Vec2 centre, double spread, std::mt19937_64& rng) {
  std::normal_distribution<double> N(0, spread);
  std::vector<Vec2> p;
  for (int j = 0; j < 6 * levels; ++j) p.push_back({centre[0] * std::exp(N(rng)), centre[1] * std::exp(N(rng))});
  return Signature(f, levels, p);
}

SignatureDB two_class_db(Family f, double spread, double separation, std::uint64_t seed, int per_class = 5) {
  std::mt19937_64 rng(seed);
  DbConfig cfg;
  cfg.family = f;
  cfg.levels = 1;
  SignatureDB db(cfg);
  for (int c = 0; c < 2; ++c)
    for (int i = 0; i < per_class; ++i) {
      char id[32];
      std::snprintf(id, sizeof id, "c%d/%02d", c, i);
      db.put(id, "c" + std::to_string(c), jittered(f, 1, {1.0 * (c ? separation : 1.0), 2.0}, spread, rng));
    }
  return db;
}

const Method kMethods[] = {Method::KLD, Method::SKLD, Method::GDSKLD, Method::GDFloyd};

TEST(Evaluate, IdenticalOneClassIsPerfect) {
  DbConfig cfg;
  cfg.levels = 1;
  SignatureDB db(cfg);
  for (int i = 0; i < 5; ++i)
    db.put("i" + std::to_string(i), "only", Signature(Family::Gamma, 1, std::vector<Vec2>(6, Vec2{1.3, 0.8})));
  const auto idx = index_from_db(db);
  for (Method m : kMethods) {
    EXPECT_EQ(evaluate(db, idx, m).arr, 1.0) << to_string(m);
    const auto pr = precision_recall(db, idx, m);
    for (std::size_t i = 0; i < pr.points.size(); ++i) {
      EXPECT_EQ(pr.points[i].precision, 1.0);
      if (i) EXPECT_LE(pr.points[i].precision, pr.points[i - 1].precision);
    }
  }
}

TEST(Evaluate, WellSeparatedClassesArePerfect) {
  for (Family f : {Family::Gamma, Family::Weibull}) {
    // separation factor 30 in scale with 1% jitter: inter-class distance >> 100x intra-class
    const auto db = two_class_db(f, 0.01, 30.0, 7);
    const auto idx = index_from_db(db);
    for (Method m : kMethods) {
      const auto rep = evaluate(db, idx, m);
      EXPECT_EQ(rep.K, 5u);
      EXPECT_EQ(rep.arr, 1.0) << to_string(f) << " " << to_string(m);
    }
  }
}

TEST(Evaluate, SelfRetrievalAndFullDepth) {
  const auto db = two_class_db(Family::Gamma, 0.4, 1.3, 11, 6);
  const auto idx = index_from_db(db);
  for (Method m : kMethods) {
    const auto R = rank_dataset(db, idx, m);
    for (std::size_t q = 0; q < R.queries.size(); ++q) EXPECT_EQ(R.queries[q].ranking.front(), q);
    EXPECT_EQ(report_at(R, idx.size()).arr, 1.0);
    const auto pr = pr_curve(R);
    ASSERT_EQ(pr.points.size(), idx.size());
    EXPECT_EQ(pr.points.front().precision, 1.0);
    EXPECT_DOUBLE_EQ(pr.points.back().recall, 1.0);
    for (std::size_t i = 1; i < pr.points.size(); ++i) EXPECT_GE(pr.points[i].recall, pr.points[i - 1].recall);
  }
}

TEST(Evaluate, InvariantUnderRelabellingAndOrder) {
  const auto db = two_class_db(Family::Weibull, 0.4, 1.3, 12, 6);
  const auto idx = index_from_db(db);
  // reversed ids reverse the storage order and the tie-break order
  DbConfig cfg = db.config();
  SignatureDB rev(cfg);
  for (auto it = db.entries().rbegin(); it != db.entries().rend(); ++it)
    rev.put("z" + std::string(1, static_cast<char>('z' - (it - db.entries().rbegin()))), it->label, it->signature);
  const auto ridx = index_from_db(rev);
  for (Method m : kMethods) EXPECT_DOUBLE_EQ(evaluate(db, idx, m).arr, evaluate(rev, ridx, m).arr) << to_string(m);
}

TEST(Evaluate, FloydClosureIsIdempotentForRanking) {
  const auto db = two_class_db(Family::Gamma, 0.5, 1.2, 13, 8);
  const auto idx = index_from_db(db);
  const auto D = method_matrix(db, idx, Method::GDFloyd);
  const auto DD = floyd_warshall(D).dist;
  const auto a = rank_all(D, idx, Method::GDFloyd, true), b = rank_all(DD, idx, Method::GDFloyd, true);
  for (std::size_t q = 0; q < a.queries.size(); ++q) EXPECT_EQ(a.queries[q].ranking, b.queries[q].ranking);
  EXPECT_TRUE(db.has_cached_closure());
}

TEST(Evaluate, Errors) {
  const auto db = two_class_db(Family::Gamma, 0.1, 3, 14);
  auto idx = index_from_db(db);
  EvalOptions opt;
  opt.expected_levels = 2;
  EXPECT_THROW(evaluate(db, idx, Method::KLD, 0, opt), VersionMismatch);
  opt.expected_levels = 1;
  opt.expected_family = Family::Weibull;
  EXPECT_THROW(evaluate(db, idx, Method::KLD, 0, opt), VersionMismatch);
  idx.items.push_back({"zzz", {}, "c0"});
  EXPECT_THROW(evaluate(db, idx, Method::GDFloyd), MissingSignatures);
}

TEST(Evaluate, FloydNotWorseOnOverlappingClasses) {
  // soft property: median over seeds of ARR(GDFloyd) - ARR(GDSKLD) must not drop below -0.01
  std::vector<double> diff;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto db = two_class_db(Family::Gamma, 0.25, 1.35, 100 + seed, 8);
    const auto idx = index_from_db(db);
    diff.push_back(evaluate(db, idx, Method::GDFloyd).arr - evaluate(db, idx, Method::GDSKLD).arr);
  }
  std::sort(diff.begin(), diff.end());
  EXPECT_GE(0.5 * (diff[4] + diff[5]), -0.01);
}

// ---------------------------------------------------------------------------
// Report files

TEST_F(TempDir, ReportFiles) {
  RetrievalReport r;
  r.method = "GDFloyd";
  r.K = 2;
  r.arr = 7.0 / 8.0 + 1.0 / 3.0e6;
  r.query_ids = {"a", "b"};
  r.hits = {2, 1};
  r.relevant = {2, 2};
  PrCurve c;
  c.method = "GDFloyd";
  c.points = {{1, 1.0, 0.5}, {2, 2.0 / 3.0, 1.0}};
  write_arr_csv({r}, (dir_ / "arr.csv").string());
  write_pr_csv({c}, (dir_ / "pr.csv").string());
  write_report_json({r}, {c}, (dir_ / "r.json").string());
  auto slurp = [&](const char* n) {
    std::ifstream is(dir_ / n);
    return std::string(std::istreambuf_iterator<char>(is), {});
  };
  EXPECT_EQ(slurp("arr.csv"), "method,K,ARR\nGDFloyd,2,0.875000333\n");
  EXPECT_EQ(slurp("pr.csv"), "method,N,precision,recall\nGDFloyd,1,1,0.5\nGDFloyd,2,0.666666667,1\n");
  const auto j = nlohmann::json::parse(slurp("r.json"));
  EXPECT_EQ(j["reports"][0]["queries"][1]["n_q"], 1);
  EXPECT_EQ(j["reports"][0]["queries"][1]["N_R"], 2);
  EXPECT_EQ(j["reports"][0]["ARR"].get<double>(), 0.875000333);
  EXPECT_EQ(j["pr_curves"][0]["precision"][1].get<double>(), 0.666666667);
}

}  // namespace
}  // namespace texgeo

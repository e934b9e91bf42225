#include <gtest/gtest.h>

#include <cmath>
#include <numeric>

#include "dvr/matcher.hpp"
#include "dvr/random.hpp"
#include "test_util.hpp"

namespace dvr::matcher {
namespace {

using dvr::test::expect_error;

features::DescriptorSet make_set(const std::string& person, const std::vector<std::vector<double>>& rows) {
  features::DescriptorSet set;
  set.person = person;
  set.camera = "x";
  for (const auto& r : rows) {
    features::FragmentDescriptor d;
    d.combined = Eigen::Map<const Eigen::VectorXd>(r.data(), static_cast<Eigen::Index>(r.size()));
    set.descriptors.push_back(d);
  }
  return set;
}

Eigen::VectorXd vec(std::initializer_list<double> v) {
  Eigen::VectorXd out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) out[i++] = x;
  return out;
}

RankedGallery ranked_with_truth_at(std::size_t rank, std::size_t gallery_size, const std::string& person) {
  std::vector<double> scores(gallery_size);
  std::vector<std::string> ids(gallery_size);
  for (std::size_t g = 0; g < gallery_size; ++g) {
    scores[g] = static_cast<double>(gallery_size - g);
    ids[g] = "other" + std::to_string(g);
  }
  ids[rank - 1] = person;
  return rank_scores(person, "a", scores, ids);
}

TEST(ScorePair, IdenticalFragmentsScoreZero) {
  const auto a = make_set("p", {{1.0, 2.0, 3.0}});
  EXPECT_EQ(score_pair(vec({1, 1, 1}), a, a), 0.0);
}

TEST(ScorePair, MaximumOverFragmentPairs) {
  const auto probe = make_set("p", {{0.0}, {2.0}});
  const auto gallery = make_set("g", {{5.0}});
  EXPECT_DOUBLE_EQ(score_pair(vec({1}), probe, gallery), 5.0);
}

TEST(ScorePair, DuplicatesAndSymmetry) {
  auto rng = seed_stream(1, "matcher-dup");
  std::normal_distribution<double> n;
  std::vector<std::vector<double>> pr(3, std::vector<double>(4)), gr(4, std::vector<double>(4));
  for (auto& r : pr)
    for (double& x : r) x = n(rng);
  for (auto& r : gr)
    for (double& x : r) x = n(rng);
  const Eigen::VectorXd w = vec({0.5, -1.0, 2.0, 0.1});
  const auto probe = make_set("p", pr), gallery = make_set("g", gr);
  const double base = score_pair(w, probe, gallery);
  auto pr2 = pr;
  pr2.push_back(pr[1]);
  auto gr2 = gr;
  gr2.insert(gr2.begin(), gr[3]);
  EXPECT_EQ(score_pair(w, make_set("p", pr2), gallery), base);
  EXPECT_EQ(score_pair(w, probe, make_set("g", gr2)), base);
  EXPECT_EQ(score_pair(w, gallery, probe), base);
}

TEST(ScorePair, SelfScoreIsZeroAndRanksLastForNonNegativeWeights) {
  const auto self = make_set("p", {{0.2, 0.4}});
  std::vector<features::DescriptorSet> gallery = {make_set("q", {{0.9, 0.1}}), self, make_set("r", {{0.3, 0.3}})};
  ranker::RankModel model;
  model.w = vec({1.0, 0.5});
  const auto ranked = rank_gallery(model, self, gallery);
  EXPECT_EQ(ranked.entries.back().person, "p");
  EXPECT_EQ(ranked.entries.back().score, 0.0);
}

TEST(ScorePair, Errors) {
  const auto a = make_set("p", {{1.0, 2.0}});
  expect_error(ErrorKind::ShapeError, [&] { score_pair(vec({1, 1, 1}), a, a); });
  expect_error(ErrorKind::EmptyFragmentSet, [&] { score_pair(vec({1, 1}), a, make_set("g", {})); });
}

TEST(Ranking, TiesKeepGalleryOrder) {
  const std::vector<double> scores = {2, 5, 5};
  const std::vector<std::string> ids = {"a", "b", "c"};
  const auto r = rank_scores("b", "a", scores, ids);
  ASSERT_EQ(r.entries.size(), 3u);
  EXPECT_EQ(r.entries[0].gallery_index, 1u);
  EXPECT_EQ(r.entries[1].gallery_index, 2u);
  EXPECT_EQ(r.entries[2].gallery_index, 0u);
  EXPECT_EQ(r.rank_of("b"), 1u);
  EXPECT_EQ(r.rank_of("a"), 3u);
  EXPECT_EQ(r.rank_of("z"), 0u);
}

TEST(Ranking, SingleMemberGallery) {
  ranker::RankModel model;
  model.w = vec({1.0});
  const auto probe = make_set("p", {{1.0}});
  const std::vector<features::DescriptorSet> gallery = {make_set("g", {{3.0}})};
  const auto r = rank_gallery(model, probe, gallery);
  ASSERT_EQ(r.entries.size(), 1u);
  EXPECT_EQ(r.entries[0].person, "g");
  EXPECT_DOUBLE_EQ(r.entries[0].score, 2.0);
}

TEST(Ranking, PermutingGalleryPermutesEntries) {
  const std::vector<double> scores = {0.3, 0.9, 0.1, 0.5};
  const std::vector<std::string> ids = {"a", "b", "c", "d"};
  const std::vector<double> perm_scores = {0.5, 0.1, 0.9, 0.3};
  const std::vector<std::string> perm_ids = {"d", "c", "b", "a"};
  const auto r1 = rank_scores("a", "a", scores, ids);
  const auto r2 = rank_scores("a", "a", perm_scores, perm_ids);
  for (std::size_t i = 0; i < ids.size(); ++i) {
    EXPECT_EQ(r1.entries[i].person, r2.entries[i].person);
    EXPECT_EQ(r1.entries[i].score, r2.entries[i].score);
  }
}

TEST(Ranking, Errors) {
  ranker::RankModel model;
  model.w = vec({1.0});
  const auto probe = make_set("p", {{1.0}});
  expect_error(ErrorKind::EmptyGallery, [&] { rank_gallery(model, probe, {}); });
  const std::vector<double> scores = {1.0};
  const std::vector<std::string> ids = {"a", "b"};
  expect_error(ErrorKind::ShapeError, [&] { rank_scores("a", "a", scores, ids); });
}

TEST(ScoreMatrix, MatchesPairwiseScores) {
  const std::vector<features::DescriptorSet> probes = {make_set("p", {{0.0, 1.0}}), make_set("q", {{2.0, 0.0}, {1.0, 1.0}})};
  const std::vector<features::DescriptorSet> gallery = {make_set("p", {{0.5, 0.5}}), make_set("q", {{2.0, 2.0}}),
                                                        make_set("r", {{0.0, 0.0}})};
  const Eigen::VectorXd w = vec({1.0, -0.5});
  const auto m = score_matrix(w, probes, gallery);
  ASSERT_EQ(m.rows(), 2);
  ASSERT_EQ(m.cols(), 3);
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 3; ++j) EXPECT_EQ(m(i, j), score_pair(w, probes[i], gallery[j]));
}

TEST(Fusion, Examples) {
  const std::vector<double> base = {1.0, 2.0};
  EXPECT_EQ(fuse_scores(base, {}, {}), base);
  const std::vector<std::vector<double>> ext = {{10.0, 0.0}};
  EXPECT_EQ(fuse_scores(base, ext, {{0.0}}), base);
  EXPECT_EQ(fuse_scores(base, ext, {{0.5}}), (std::vector<double>{6.0, 2.0}));
  const std::vector<std::vector<double>> two = {{10.0, 0.0}, {1.0, -1.0}};
  EXPECT_EQ(fuse_scores(base, two, {{0.5, 2.0}}), (std::vector<double>{8.0, 0.0}));
}

TEST(Fusion, Errors) {
  const std::vector<double> base = {1.0, 2.0};
  const std::vector<std::vector<double>> short_ext = {{1.0}};
  expect_error(ErrorKind::ShapeError, [&] { fuse_scores(base, short_ext, {{1.0}}); });
  const std::vector<std::vector<double>> ext = {{1.0, 2.0}};
  expect_error(ErrorKind::ShapeError, [&] { fuse_scores(base, ext, {}); });
}

TEST(Cmc, AllCorrectAtRankOne) {
  std::vector<RankedGallery> ranked;
  for (int p = 0; p < 5; ++p) ranked.push_back(ranked_with_truth_at(1, 5, "p" + std::to_string(p)));
  const auto c = cmc_curve(ranked, 5);
  EXPECT_EQ(c.values, std::vector<double>(5, 1.0));
  EXPECT_TRUE(is_monotone(c));
}

TEST(Cmc, CountsRanks) {
  const std::vector<RankedGallery> ranked = {ranked_with_truth_at(1, 4, "p"), ranked_with_truth_at(3, 4, "q")};
  const auto c = cmc_curve(ranked, 3);
  EXPECT_EQ(c.values, (std::vector<double>{0.5, 0.5, 1.0}));
  EXPECT_DOUBLE_EQ(c.at_rank(3), 1.0);
}

TEST(Cmc, ReachesOneAtGallerySize) {
  std::vector<RankedGallery> ranked;
  for (std::size_t r = 1; r <= 6; ++r) ranked.push_back(ranked_with_truth_at(r, 6, "p" + std::to_string(r)));
  const auto c = cmc_curve(ranked, 6);
  EXPECT_DOUBLE_EQ(c.values.back(), 1.0);
  EXPECT_NEAR(c.values[0], 1.0 / 6.0, 1e-15);
  EXPECT_TRUE(is_monotone(c));
}

TEST(Cmc, AveragesTrials) {
  const std::vector<std::vector<RankedGallery>> trials = {{ranked_with_truth_at(1, 3, "p")},
                                                          {ranked_with_truth_at(2, 3, "p")}};
  const auto c = cmc_curve(trials, 3);
  EXPECT_EQ(c.values, (std::vector<double>{0.5, 1.0, 1.0}));
  EXPECT_EQ(c.trials, 2u);
}

TEST(Cmc, RandomScoresGiveChanceRankOne) {
  constexpr std::size_t G = 10, trials = 4000;
  auto rng = seed_stream(2, "cmc-chance");
  std::uniform_real_distribution<double> u;
  std::vector<std::string> ids(G);
  for (std::size_t g = 0; g < G; ++g) ids[g] = "p" + std::to_string(g);
  std::vector<RankedGallery> ranked;
  for (std::size_t t = 0; t < trials; ++t) {
    std::vector<double> scores(G);
    for (double& s : scores) s = u(rng);
    ranked.push_back(rank_scores(ids[t % G], "a", scores, ids));
  }
  const auto c = cmc_curve(ranked, G);
  const double p = 1.0 / G;
  const double se = std::sqrt(p * (1 - p) / trials);
  EXPECT_NEAR(c.values[0], p, 3 * se);
  EXPECT_TRUE(is_monotone(c));
  EXPECT_DOUBLE_EQ(c.values.back(), 1.0);
}

TEST(Cmc, Errors) {
  const std::vector<double> scores = {1.0, 2.0};
  const std::vector<std::string> ids = {"a", "b"};
  const std::vector<RankedGallery> missing = {rank_scores("z", "a", scores, ids)};
  expect_error(ErrorKind::MissingMatch, [&] { cmc_curve(missing, 2); });
  expect_error(ErrorKind::InsufficientData, [] { cmc_curve(std::span<const RankedGallery>{}, 2); });
  const std::vector<CmcCurve> uneven = {{{1.0}, 1}, {{0.5, 1.0}, 1}};
  expect_error(ErrorKind::ShapeError, [&] { average_curves(uneven); });
}

TEST(Cmc, MonotoneCheck) {
  EXPECT_TRUE(is_monotone({{0.2, 0.2, 0.9}, 1}));
  EXPECT_FALSE(is_monotone({{0.5, 0.4}, 1}));
  EXPECT_FALSE(is_monotone({{0.5, 1.2}, 1}));
}

TEST(Cmc, TextOutputs) {
  const CmcCurve c{{0.25, 0.5, 0.75, 1.0}, 1};
  EXPECT_EQ(cmc_csv(c), "rank,match_rate\n1,0.250000\n2,0.500000\n3,0.750000\n4,1.000000\n");
  EXPECT_EQ(cmc_table(c, 4), "rank  match rate\n   1   25.00%\n   2   50.00%\n   3   75.00%\n   4  100.00%\n");
  CmcCurve big;
  big.values.assign(25, 1.0);
  const auto table = cmc_table(big, 25);
  EXPECT_NE(table.find("  20  100.00%"), std::string::npos);
  EXPECT_NE(table.find("   5  100.00%"), std::string::npos);
  EXPECT_EQ(table.find("   2  "), std::string::npos);
}

}  // namespace
}  // namespace dvr::matcher

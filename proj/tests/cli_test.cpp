#include <gtest/gtest.h>

#include <fstream>
#include <sstream>

#include "dvr/cli.hpp"
#include "dvr/synthetic.hpp"
#include "test_util.hpp"

namespace dvr::cli {
namespace {

namespace fs = std::filesystem;
using dvr::test::expect_error;
using dvr::test::TempDir;

struct RunResult {
  int status;
  std::string out;
  std::string err;
};

RunResult run(std::vector<std::string> args) {
  args.insert(args.begin(), "dvr");
  std::ostringstream out, err;
  const int status = run_command(args, out, err);
  return {status, out.str(), err.str()};
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::vector<std::string> lines(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);) out.push_back(line);
  return out;
}

// One synthetic dataset shared by the pipeline tests.
class Pipeline : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    dir_ = new TempDir;
    const auto r = run({"synth", "--persons", "8", "--frames", "48", "--seed", "3", "--out", data().string()});
    ASSERT_EQ(r.status, 0) << r.err;
  }
  static void TearDownTestSuite() {
    delete dir_;
    dir_ = nullptr;
  }
  static fs::path root() { return dir_->path(); }
  static fs::path data() { return dir_->path() / "data"; }

  static TempDir* dir_;
};
TempDir* Pipeline::dir_ = nullptr;

// ---------------------------------------------------------------------------
// Config

TEST(ConfigFile, RoundTrip) {
  Config c;
  c.L = 7;
  c.sigma = 1.25;
  c.C = 0.1;
  c.k = 2;
  c.negative_fraction = 0.3;
  c.feature_mode = features::FeatureMode::Hog3d;
  c.seed = 18446744073709551615ull;
  c.max_iters = 9;
  c.solver_tolerance = 1e-9;
  c.flow_lambda = 0.2;
  c.flow_iterations = 40;
  const Config back = parse_config(serialize_config(c));
  EXPECT_EQ(serialize_config(back), serialize_config(c));
  EXPECT_EQ(back.seed, c.seed);
  EXPECT_EQ(back.sigma, 1.25);
  EXPECT_EQ(back.feature_mode, features::FeatureMode::Hog3d);

  TempDir dir;
  save_config(dir.path() / "c.txt", c);
  EXPECT_EQ(serialize_config(load_config(dir.path() / "c.txt")), serialize_config(c));
}

TEST(ConfigFile, CommentsAndDefaults) {
  const Config c = parse_config("# comment\n\nk = 5\nsigma=0.5  # trailing\n");
  EXPECT_EQ(c.k, 5);
  EXPECT_EQ(c.sigma, 0.5);
  EXPECT_EQ(c.L, 10);
  EXPECT_EQ(c.negative_fraction, 0.10);
  Config base;
  base.C = 4.0;
  EXPECT_EQ(parse_config("k=2\n", base).C, 4.0);
}

TEST(ConfigFile, RejectsBadInput) {
  expect_error(ErrorKind::ConfigError, [] { parse_config("colour_bins=3\n"); });
  expect_error(ErrorKind::ConfigError, [] { parse_config("k=three\n"); });
  expect_error(ErrorKind::ConfigError, [] { parse_config("k\n"); });
  expect_error(ErrorKind::ConfigError, [] { parse_config("feature_mode=lbp\n"); });
  expect_error(ErrorKind::ConfigError, [] { parse_config("k=0\n").validate(); });
  expect_error(ErrorKind::ConfigError, [] { parse_config("negative_fraction=0\n").validate(); });
  expect_error(ErrorKind::ConfigError, [] { parse_config("C=-1\n").validate(); });
  expect_error(ErrorKind::ConfigError, [] { parse_config("L=0\n").validate(); });
  TempDir dir;
  expect_error(ErrorKind::IoError, [&] { load_config(dir.path() / "absent.txt"); });
}

TEST(ConfigFile, DerivedSettings) {
  Config c;
  c.L = 6;
  EXPECT_EQ(c.feature_config().hog3d.fragment_length, 13);
  c.k = 1;
  c.C = 2.5;
  const auto t = c.train_options();
  EXPECT_EQ(t.k, 1);
  EXPECT_EQ(t.C, 2.5);
  EXPECT_EQ(t.max_iters, 20);
}

// ---------------------------------------------------------------------------
// Synthetic data

TEST(Synthetic, IsDeterministic) {
  synth::SyntheticSpec spec;
  spec.persons = 3;
  spec.frames = 25;
  spec.noise = 0.4;
  spec.seed = 11;
  const auto a = synth::synthesize(spec);
  const auto b = synth::synthesize(spec);
  ASSERT_EQ(a.size(), 3u);
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a[i].person, b[i].person);
    ASSERT_EQ(a[i].a.frames.size(), 25u);
    for (std::size_t t = 0; t < a[i].a.frames.size(); ++t) {
      EXPECT_EQ(a[i].a.frames[t].rgb, b[i].a.frames[t].rgb);
      EXPECT_EQ(a[i].b.frames[t].rgb, b[i].b.frames[t].rgb);
    }
  }
  spec.seed = 12;
  EXPECT_NE(synth::synthesize(spec)[0].a.frames[0].rgb, a[0].a.frames[0].rgb);
}

TEST(Synthetic, RejectsBadSpecs) {
  synth::SyntheticSpec spec;
  spec.persons = 1;
  expect_error(ErrorKind::ConfigError, [&] { spec.validate(); });
  spec = {};
  spec.frames = 20;
  expect_error(ErrorKind::ConfigError, [&] { spec.validate(); });
  spec = {};
  spec.noise = -0.1;
  expect_error(ErrorKind::ConfigError, [&] { spec.validate(); });
  spec = {};
  spec.min_period = 20;
  spec.max_period = 10;
  expect_error(ErrorKind::ConfigError, [&] { spec.validate(); });
  spec = {};
  spec.signatures.resize(3);
  expect_error(ErrorKind::ConfigError, [&] { spec.validate(); });
}

TEST(Synthetic, LandmarksFollowTheGaitPeriod) {
  synth::SyntheticSpec spec;
  spec.persons = 2;
  spec.frames = 100;
  spec.seed = 4;
  for (int period : {10, 14, 18}) {
    spec.signatures = synth::make_signatures(spec);
    for (auto& s : spec.signatures) s.period = period;
    const auto seq = synth::render_sequence(spec.signatures[0], 0, spec, 0, "p");
    const auto analysis = analyse_sequence(seq, Config{});
    const auto& lm = analysis.landmarks;
    ASSERT_GE(lm.size(), 4u) << "period " << period;
    // Extrema alternate, half a period apart, away from the sequence ends.
    for (std::size_t i = 2; i + 2 < lm.size(); ++i) {
      EXPECT_NEAR(lm[i].index - lm[i - 1].index, period / 2.0, 1.0) << "period " << period;
      EXPECT_NE(lm[i].kind, lm[i - 1].kind);
    }
  }
}

TEST(Synthetic, CleanPairIsMatchedAtRankOne) {
  synth::SyntheticSpec spec;
  spec.persons = 2;
  spec.frames = 40;
  spec.seed = 5;
  const auto pairs = synth::synthesize(spec);
  Config cfg;
  const auto views = describe_pairs(pairs, cfg);
  const auto model = train_model(views, cfg);
  const auto ranked = evaluate(model, views);
  EXPECT_EQ(matcher::cmc_curve(ranked, 2).values[0], 1.0);
}

TEST(Synthetic, DatasetLayoutOnDisk) {
  TempDir dir;
  synth::SyntheticSpec spec;
  spec.persons = 2;
  spec.frames = 21;
  synth::generate_synthetic(spec, dir.path());
  EXPECT_TRUE(fs::exists(dir.path() / "cam_a" / "person_000" / "f0000.png"));
  EXPECT_TRUE(fs::exists(dir.path() / "cam_b" / "person_001" / "f0020.png"));
  const auto ds = load_dataset(dir.path());
  ASSERT_EQ(ds.pairs.size(), 2u);
  EXPECT_EQ(ds.pairs[1].person, "person_001");
  EXPECT_EQ(ds.pairs[1].b.frames.size(), 21u);
}

// ---------------------------------------------------------------------------
// Command line

TEST(Commands, UnknownFlagOrSubcommandFails) {
  EXPECT_NE(run({"train", "--bogus", "1"}).status, 0);
  EXPECT_NE(run({"launch"}).status, 0);
  EXPECT_NE(run({}).status, 0);
}

TEST(Commands, MissingDataFails) {
  TempDir dir;
  const auto r = run({"train", "--data", (dir.path() / "nowhere").string(), "--out", dir.path().string()});
  EXPECT_NE(r.status, 0);
}

TEST(Commands, OnePersonCannotTrain) {
  TempDir dir;
  synth::SyntheticSpec spec;
  spec.persons = 2;
  spec.frames = 21;
  auto pairs = synth::synthesize(spec);
  pairs.pop_back();
  synth::write_dataset(dir.path() / "data", pairs);
  const auto r = run({"train", "--data", (dir.path() / "data").string(), "--out", (dir.path() / "m").string()});
  EXPECT_NE(r.status, 0);
  EXPECT_NE(r.err.find("InsufficientData"), std::string::npos) << r.err;
  EXPECT_FALSE(fs::exists(dir.path() / "m" / "model.dvr"));

  const auto views = describe_pairs(pairs, Config{});
  expect_error(ErrorKind::InsufficientData, [&] { train_model(views, Config{}); });
}

TEST(Commands, InvalidSettingsAreReported) {
  TempDir dir;
  const auto r = run({"synth", "--persons", "1", "--out", dir.path().string()});
  EXPECT_NE(r.status, 0);
  EXPECT_NE(r.err.find("ConfigError"), std::string::npos) << r.err;
  EXPECT_NE(run({"synth", "--persons", "4", "--k", "0", "--out", dir.path().string()}).status, 0);
}

TEST_F(Pipeline, TrainThenEvaluate) {
  const auto model_dir = root() / "train";
  const auto t = run({"train", "--data", data().string(), "--out", model_dir.string(), "--seed", "3"});
  ASSERT_EQ(t.status, 0) << t.err;
  EXPECT_TRUE(fs::exists(model_dir / "model.dvr"));
  EXPECT_TRUE(fs::exists(model_dir / "config.txt"));
  const auto history = lines(slurp(model_dir / "history.csv"));
  ASSERT_GE(history.size(), 2u);
  EXPECT_EQ(history[0], "iteration,objective,newton_steps,cost_before,cost_after,constraints");

  const auto e = run({"eval", "--data", data().string(), "--model", (model_dir / "model.dvr").string(), "--out",
                      (root() / "eval").string()});
  ASSERT_EQ(e.status, 0) << e.err;
  const auto cmc = lines(slurp(root() / "eval" / "cmc.csv"));
  ASSERT_EQ(cmc.size(), 9u);
  EXPECT_EQ(cmc[0], "rank,match_rate");
  EXPECT_EQ(cmc[8], "8,1.000000");
  double previous = 0.0;
  for (std::size_t i = 1; i < cmc.size(); ++i) {
    const double v = std::stod(cmc[i].substr(cmc[i].find(',') + 1));
    EXPECT_GE(v, previous);
    previous = v;
  }
  EXPECT_NE(e.out.find("rank  match rate"), std::string::npos);
  EXPECT_EQ(slurp(root() / "eval" / "cmc.txt"), e.out);
}

TEST_F(Pipeline, IdenticalArgumentsGiveIdenticalOutput) {
  const auto a = run({"train", "--data", data().string(), "--out", (root() / "rep1").string(), "--seed", "9",
                      "--split", "train"});
  const auto b = run({"train", "--data", data().string(), "--out", (root() / "rep2").string(), "--seed", "9",
                      "--split", "train"});
  ASSERT_EQ(a.status, 0) << a.err;
  ASSERT_EQ(b.status, 0) << b.err;
  EXPECT_EQ(slurp(root() / "rep1" / "model.dvr"), slurp(root() / "rep2" / "model.dvr"));
  EXPECT_EQ(slurp(root() / "rep1" / "history.csv"), slurp(root() / "rep2" / "history.csv"));
  const auto out1 = a.out.substr(0, a.out.find(" iterations"));
  EXPECT_EQ(out1, b.out.substr(0, b.out.find(" iterations")));
  EXPECT_NE(a.out.find("trained on 4 persons"), std::string::npos) << a.out;
}

TEST_F(Pipeline, RepeatedHalvingWithoutModel) {
  const auto e = run({"eval", "--data", data().string(), "--trials", "2", "--k", "1", "--out",
                      (root() / "halves").string()});
  ASSERT_EQ(e.status, 0) << e.err;
  const auto cmc = lines(slurp(root() / "halves" / "cmc.csv"));
  ASSERT_EQ(cmc.size(), 5u);
  EXPECT_EQ(cmc[4], "4,1.000000");
}

TEST_F(Pipeline, MatchWritesRankLists) {
  const auto model_dir = root() / "mtrain";
  ASSERT_EQ(run({"train", "--data", data().string(), "--out", model_dir.string(), "--k", "1"}).status, 0);
  const auto m = run({"match", "--data", data().string(), "--model", (model_dir / "model.dvr").string(), "--out",
                      (root() / "match").string()});
  ASSERT_EQ(m.status, 0) << m.err;
  const auto ranks = lines(slurp(root() / "match" / "ranks" / "person_000.csv"));
  ASSERT_EQ(ranks.size(), 9u);
  EXPECT_EQ(ranks[0], "rank,person,score");
  std::set<std::string> persons;
  double previous = std::numeric_limits<double>::infinity();
  for (std::size_t i = 1; i < ranks.size(); ++i) {
    std::istringstream row(ranks[i]);
    std::string rank, person, score;
    std::getline(row, rank, ',');
    std::getline(row, person, ',');
    std::getline(row, score);
    EXPECT_EQ(rank, std::to_string(i));
    persons.insert(person);
    EXPECT_LE(std::stod(score), previous);
    previous = std::stod(score);
  }
  EXPECT_EQ(persons.size(), 8u);
}

TEST_F(Pipeline, ExternalScoresShiftTheRanking) {
  const auto model_dir = root() / "ftrain";
  ASSERT_EQ(run({"train", "--data", data().string(), "--out", model_dir.string(), "--k", "1"}).status, 0);
  // An external source that strongly favours person_007 for every probe.
  std::string csv = "probe,gallery,score\n";
  for (int p = 0; p < 8; ++p)
    for (int g = 0; g < 8; ++g) {
      char row[64];
      std::snprintf(row, sizeof row, "person_%03d,person_%03d,%d\n", p, g, g == 7 ? 1000000 : 0);
      csv += row;
    }
  std::ofstream(root() / "ext.csv") << csv;
  const auto m = run({"match", "--data", data().string(), "--model", (model_dir / "model.dvr").string(), "--out",
                      (root() / "fused").string(), "--external", (root() / "ext.csv").string(), "--alpha", "1"});
  ASSERT_EQ(m.status, 0) << m.err;
  const auto ranks = lines(slurp(root() / "fused" / "ranks" / "person_002.csv"));
  ASSERT_GE(ranks.size(), 2u);
  EXPECT_EQ(ranks[1].substr(0, 13), "1,person_007,");

  const auto bad = run({"match", "--data", data().string(), "--model", (model_dir / "model.dvr").string(), "--out",
                        (root() / "fused2").string(), "--external", (root() / "ext.csv").string()});
  EXPECT_NE(bad.status, 0);
}

TEST_F(Pipeline, FragmentWritesProfilesAndLandmarks) {
  const auto out = root() / "frag";
  const auto r = run({"fragment", "--data", data().string(), "--out", out.string(), "--descriptors"});
  ASSERT_EQ(r.status, 0) << r.err;
  const auto fep = lines(slurp(out / "cam_a" / "person_000.fep"));
  EXPECT_EQ(fep.size(), 48u);
  const auto lm = lines(slurp(out / "cam_b" / "person_003.landmarks"));
  ASSERT_FALSE(lm.empty());
  for (const auto& line : lm) {
    std::istringstream row(line);
    int index, first, last;
    std::string kind;
    ASSERT_TRUE(row >> index >> kind >> first >> last) << line;
    EXPECT_EQ(first, index - 10);
    EXPECT_EQ(last, index + 10);
    EXPECT_TRUE(kind == "max" || kind == "min" || kind == "centre") << kind;
  }
  const auto desc = lines(slurp(out / "cam_a" / "person_000.desc"));
  EXPECT_FALSE(desc.empty());
  EXPECT_EQ(desc[0].rfind("person_000 cam_a ", 0), 0u);
}

}  // namespace
}  // namespace dvr::cli

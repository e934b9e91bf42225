#include <CLI11.hpp>

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <map>
#include <numeric>
#include <ostream>
#include <sstream>

#include "dvr/cli.hpp"
#include "dvr/parallel.hpp"
#include "dvr/random.hpp"
#include "dvr/synthetic.hpp"

namespace fs = std::filesystem;

namespace dvr::cli {

namespace {

struct CommonFlags {
  std::string config_path;
  std::uint64_t seed = 0;
  int k = 0;
  double C = 0.0;
  std::string feature_mode;
  unsigned threads = 0;
  std::string out;
  int L = 0;
  double sigma = 0.0;
  double negative_fraction = 0.0;
  int max_iters = 0;

  std::multimap<std::string, CLI::Option*> given;

  void attach(CLI::App& app, bool out_required) {
    given.emplace("config", app.add_option("--config", config_path, "key=value configuration file")->check(CLI::ExistingFile));
    given.emplace("seed", app.add_option("--seed", seed, "random seed"));
    given.emplace("k", app.add_option("--k", k, "instances selected per person"));
    given.emplace("C", app.add_option("--C", C, "ranking loss weight"));
    given.emplace("feature-mode", app.add_option("--feature-mode", feature_mode, "colhog3d, hog3d or colour"));
    given.emplace("threads", app.add_option("--threads", threads, "worker threads (0 = available cores)"));
    auto* o = app.add_option("--out", out, "output directory");
    if (out_required) o->required();
    given.emplace("L", app.add_option("--L", L, "fragment half-width"));
    given.emplace("sigma", app.add_option("--sigma", sigma, "profile smoothing sigma"));
    given.emplace("negative-fraction", app.add_option("--negative-fraction", negative_fraction, "sampled share of negatives"));
    given.emplace("max-iters", app.add_option("--max-iters", max_iters, "alternating iteration cap"));
  }

  // The same flags are registered on every subcommand.
  bool has(const std::string& name) const {
    const auto [first, last] = given.equal_range(name);
    return std::any_of(first, last, [](const auto& entry) { return entry.second->count() > 0; });
  }

  Config resolve() const {
    Config c = has("config") ? load_config(config_path) : Config{};
    if (has("seed")) c.seed = seed;
    if (has("k")) c.k = k;
    if (has("C")) c.C = C;
    if (has("feature-mode")) c.feature_mode = features::parse_feature_mode(feature_mode);
    if (has("L")) c.L = L;
    if (has("sigma")) c.sigma = sigma;
    if (has("negative-fraction")) c.negative_fraction = negative_fraction;
    if (has("max-iters")) c.max_iters = max_iters;
    c.validate();
    return c;
  }
};

std::string fmt(const char* pattern, double v) {
  char buf[48];
  std::snprintf(buf, sizeof buf, pattern, v);
  return buf;
}

void write_text(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::IoError, "cannot write " + path.string());
  out << text;
}

std::vector<PersonPair> select_split(Dataset&& data, const std::string& split, std::uint64_t seed) {
  if (split == "all") return std::move(data.pairs);
  TrainingSplit s = split_dataset(std::move(data.pairs), seed);
  return split == "train" ? std::move(s.train_pairs) : std::move(s.test_pairs);
}

// External scores: `probe,gallery,score` rows; an optional header is skipped.
using ExternalTable = std::map<std::pair<std::string, std::string>, double>;

ExternalTable read_external(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::IoError, "cannot read external scores " + path.string());
  ExternalTable table;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || (line_no == 1 && line.rfind("probe,", 0) == 0)) continue;
    const auto c1 = line.find(',');
    const auto c2 = c1 == std::string::npos ? c1 : line.find(',', c1 + 1);
    if (c2 == std::string::npos)
      throw Error(ErrorKind::ConfigError, path.string() + ":" + std::to_string(line_no) + " is not probe,gallery,score");
    try {
      table[{line.substr(0, c1), line.substr(c1 + 1, c2 - c1 - 1)}] = std::stod(line.substr(c2 + 1));
    } catch (const std::logic_error&) {
      throw Error(ErrorKind::ConfigError, path.string() + ":" + std::to_string(line_no) + " has an invalid score");
    }
  }
  return table;
}

struct ScoreTable {
  std::vector<std::string> probe_persons;
  std::string probe_camera;
  std::vector<std::string> gallery_persons;
  Eigen::MatrixXd scores;
};

ScoreTable score_views(const ranker::RankModel& model, std::span<const ranker::PersonViews> views) {
  ScoreTable t;
  std::vector<features::DescriptorSet> probes, gallery;
  for (const auto& v : views) {
    if (!v.a || !v.b) throw Error(ErrorKind::MissingView, "person " + v.person + " lacks a camera view");
    probes.push_back(*v.a);
    gallery.push_back(*v.b);
    t.probe_persons.push_back(v.person);
    t.gallery_persons.push_back(v.person);
  }
  if (gallery.empty()) throw Error(ErrorKind::EmptyGallery, "evaluation needs a non-empty gallery");
  if (model.w.size() != gallery.front().dim())
    throw Error(ErrorKind::ShapeError, "model dimension " + std::to_string(model.w.size()) +
                                           " does not match descriptor length " + std::to_string(gallery.front().dim()));
  t.probe_camera = probes.front().camera;
  t.scores = matcher::score_matrix(model.w, probes, gallery);
  return t;
}

std::vector<double> external_row(const ExternalTable& table, const ScoreTable& t, std::size_t p) {
  std::vector<double> row(t.gallery_persons.size());
  for (std::size_t g = 0; g < row.size(); ++g) {
    auto it = table.find({t.probe_persons[p], t.gallery_persons[g]});
    if (it == table.end())
      throw Error(ErrorKind::ConfigError,
                  "external scores lack the pair " + t.probe_persons[p] + "," + t.gallery_persons[g]);
    row[g] = it->second;
  }
  return row;
}

std::vector<matcher::RankedGallery> rank_table(const ScoreTable& t, std::span<const ExternalTable> externals,
                                               const matcher::FusionWeights& weights,
                                               std::span<const std::size_t> probe_rows) {
  std::vector<matcher::RankedGallery> ranked;
  for (std::size_t p : probe_rows) {
    std::vector<double> base(t.gallery_persons.size());
    for (std::size_t g = 0; g < base.size(); ++g)
      base[g] = t.scores(static_cast<Eigen::Index>(p), static_cast<Eigen::Index>(g));
    if (!externals.empty()) {
      std::vector<std::vector<double>> ext;
      for (const auto& table : externals) ext.push_back(external_row(table, t, p));
      base = matcher::fuse_scores(base, ext, weights);
    }
    ranked.push_back(matcher::rank_scores(t.probe_persons[p], t.probe_camera, base, t.gallery_persons));
  }
  return ranked;
}

std::vector<std::size_t> all_rows(std::size_t n) {
  std::vector<std::size_t> rows(n);
  std::iota(rows.begin(), rows.end(), std::size_t{0});
  return rows;
}

// Grid search of a single fusion weight on a seeded half of the probes,
// maximizing rank-1 and then the mean rank of the true match.
double search_alpha(const ScoreTable& t, const ExternalTable& external, std::uint64_t seed) {
  const std::size_t n = t.probe_persons.size();
  std::vector<std::size_t> rows = all_rows(n);
  if (n >= 2) {
    auto rng = seed_stream(seed, "fusion");
    std::shuffle(rows.begin(), rows.end(), rng);
    rows.resize((n + 1) / 2);
    std::sort(rows.begin(), rows.end());
  }
  const std::vector<ExternalTable> externals{external};
  double best_alpha = 0.0, best_rank1 = -1.0, best_mean = 0.0;
  for (int step = 0; step <= 40; ++step) {
    const double alpha = 0.05 * step;
    const auto ranked = rank_table(t, externals, {{alpha}}, rows);
    double hits = 0.0, mean = 0.0;
    for (const auto& r : ranked) {
      const std::size_t rank = r.rank_of(r.probe_person);
      hits += rank == 1 ? 1.0 : 0.0;
      mean += static_cast<double>(rank);
    }
    if (hits > best_rank1 || (hits == best_rank1 && mean < best_mean)) {
      best_alpha = alpha;
      best_rank1 = hits;
      best_mean = mean;
    }
  }
  return best_alpha;
}

struct FusionFlags {
  std::vector<std::string> externals;
  std::vector<double> alphas;
  bool alpha_search = false;

  void attach(CLI::App& app) {
    app.add_option("--external", externals, "external score CSV (probe,gallery,score); repeatable")
        ->check(CLI::ExistingFile);
    app.add_option("--alpha", alphas, "fusion weight per external score source");
    app.add_flag("--alpha-search", alpha_search, "grid-search the weight of a single external source");
  }

  std::vector<ExternalTable> load() const {
    std::vector<ExternalTable> tables;
    for (const auto& path : externals) tables.push_back(read_external(path));
    return tables;
  }

  matcher::FusionWeights weights(const ScoreTable& t, std::span<const ExternalTable> tables, std::uint64_t seed,
                                 std::ostream& out) const {
    if (tables.empty()) {
      if (!alphas.empty() || alpha_search) throw Error(ErrorKind::ConfigError, "fusion weights need --external");
      return {};
    }
    if (alpha_search) {
      if (tables.size() != 1) throw Error(ErrorKind::ConfigError, "--alpha-search supports one external source");
      const double alpha = search_alpha(t, tables.front(), seed);
      out << "fusion alpha " << fmt("%.2f", alpha) << '\n';
      return {{alpha}};
    }
    if (alphas.size() != tables.size())
      throw Error(ErrorKind::ConfigError, "give one --alpha per --external");
    return {alphas};
  }
};

void check_curve(const matcher::CmcCurve& curve) {
  if (!matcher::is_monotone(curve)) throw Error(ErrorKind::NumericalError, "CMC curve is not monotone");
}

void write_cmc(const fs::path& dir, const matcher::CmcCurve& curve, std::size_t gallery_size, std::ostream& out) {
  check_curve(curve);
  write_text(dir / "cmc.csv", matcher::cmc_csv(curve));
  const std::string table = matcher::cmc_table(curve, gallery_size);
  write_text(dir / "cmc.txt", table);
  out << table;
}

// ---------------------------------------------------------------------------

int cmd_synth(const CommonFlags& common, int persons, int frames, double noise, int min_period, int max_period,
              std::ostream& out) {
  const Config cfg = common.resolve();
  synth::SyntheticSpec spec;
  spec.persons = persons;
  spec.frames = frames;
  spec.noise = noise;
  spec.seed = cfg.seed;
  spec.min_period = min_period;
  spec.max_period = max_period;
  spec.fragment_half_width = cfg.L;
  synth::generate_synthetic(spec, common.out);
  out << "wrote " << persons << " persons x 2 cameras x " << frames << " frames to " << common.out << '\n';
  return 0;
}

int cmd_fragment(const CommonFlags& common, const std::string& data, bool descriptors, std::ostream& out) {
  const Config cfg = common.resolve();
  const Dataset ds = load_dataset(data);
  std::vector<const ImageSequence*> seqs;
  for (const auto& p : ds.pairs) {
    seqs.push_back(&p.a);
    seqs.push_back(&p.b);
  }
  std::vector<SequenceAnalysis> analyses(seqs.size());
  parallel_for(seqs.size(), [&](std::size_t i) { analyses[i] = analyse_sequence(*seqs[i], cfg); });

  std::size_t fragments = 0, fallbacks = 0;
  for (std::size_t i = 0; i < seqs.size(); ++i) {
    const ImageSequence& seq = *seqs[i];
    const SequenceAnalysis& a = analyses[i];
    const fs::path base = fs::path(common.out) / seq.camera / seq.person;

    std::string fep;
    for (std::size_t t = 0; t < a.profile.raw.size(); ++t)
      fep += fmt("%.17g", a.profile.raw[t]) + " " + fmt("%.17g", a.profile.smoothed[t]) + "\n";
    write_text(base.string() + ".fep", fep);

    std::string lm;
    for (const auto& f : a.fragments)
      lm += std::to_string(f.landmark) + " " + std::string(motion::landmark_kind_name(f.kind)) + " " +
            std::to_string(f.first_frame()) + " " + std::to_string(f.last_frame()) + "\n";
    write_text(base.string() + ".landmarks", lm);

    if (descriptors) {
      std::ostringstream desc;
      features::write_descriptors(
          desc, features::describe_sequence(seq.person, seq.camera, a.fragments, cfg.feature_config()));
      write_text(base.string() + ".desc", desc.str());
    }
    fragments += a.fragments.size();
    fallbacks += a.fallback ? 1 : 0;
  }
  out << seqs.size() << " sequences, " << fragments << " fragments, " << fallbacks << " central fallbacks\n";
  return 0;
}

int cmd_train(const CommonFlags& common, const std::string& data, const std::string& split, std::ostream& out) {
  const Config cfg = common.resolve();
  const auto pairs = select_split(load_dataset(data), split, cfg.seed);
  const auto views = describe_pairs(pairs, cfg);
  const ranker::RankModel model = train_model(views, cfg);

  const fs::path dir(common.out);
  fs::create_directories(dir);
  ranker::save_model((dir / "model.dvr").string(), model);
  save_config(dir / "config.txt", cfg);

  std::string history = "iteration,objective,newton_steps,cost_before,cost_after,constraints\n";
  for (const auto& rec : model.history)
    history += std::to_string(rec.iteration) + "," + fmt("%.17g", rec.objective) + "," +
               std::to_string(rec.newton_steps) + "," + fmt("%.17g", rec.cost_before) + "," +
               fmt("%.17g", rec.cost_after) + "," + std::to_string(rec.constraints) + "\n";
  write_text(dir / "history.csv", history);

  out << "trained on " << pairs.size() << " persons, " << model.iterations << " iterations, "
      << (model.converged ? "converged" : "not converged") << '\n';
  return 0;
}

Config model_config(const CommonFlags& common, const ranker::RankModel& model) {
  Config cfg = common.resolve();
  cfg.feature_mode = model.feature_mode;
  return cfg;
}

int cmd_match(const CommonFlags& common, const std::string& data, const std::string& model_path,
              const std::string& split, const FusionFlags& fusion, std::ostream& out) {
  const ranker::RankModel model = ranker::load_model(model_path);
  const Config cfg = model_config(common, model);
  const auto pairs = select_split(load_dataset(data), split, cfg.seed);
  const auto views = describe_pairs(pairs, cfg);
  const ScoreTable table = score_views(model, views);
  const auto externals = fusion.load();
  const auto weights = fusion.weights(table, externals, cfg.seed, out);
  const auto ranked = rank_table(table, externals, weights, all_rows(table.probe_persons.size()));

  for (const auto& r : ranked) {
    std::string csv = "rank,person,score\n";
    for (std::size_t i = 0; i < r.entries.size(); ++i)
      csv += std::to_string(i + 1) + "," + r.entries[i].person + "," + fmt("%.17g", r.entries[i].score) + "\n";
    write_text(fs::path(common.out) / "ranks" / (r.probe_person + ".csv"), csv);
  }
  out << "ranked " << ranked.size() << " probes against " << table.gallery_persons.size() << " gallery persons\n";
  return 0;
}

int cmd_eval(const CommonFlags& common, const std::string& data, const std::string& model_path, int trials,
             const std::string& split, const FusionFlags& fusion, std::ostream& out) {
  if (!model_path.empty()) {
    const ranker::RankModel model = ranker::load_model(model_path);
    const Config cfg = model_config(common, model);
    const auto pairs = select_split(load_dataset(data), split, cfg.seed);
    const auto views = describe_pairs(pairs, cfg);
    const ScoreTable table = score_views(model, views);
    const auto externals = fusion.load();
    const auto weights = fusion.weights(table, externals, cfg.seed, out);
    const auto ranked = rank_table(table, externals, weights, all_rows(table.probe_persons.size()));
    write_cmc(common.out, matcher::cmc_curve(ranked, table.gallery_persons.size()), table.gallery_persons.size(), out);
    return 0;
  }

  // Repeated random halving: train on one half, rank the other.
  if (trials < 1) throw Error(ErrorKind::ConfigError, "--trials must be >= 1");
  if (!fusion.externals.empty()) throw Error(ErrorKind::ConfigError, "fusion requires --model");
  const Config cfg = common.resolve();
  Dataset ds = load_dataset(data);
  const auto views = describe_pairs(ds.pairs, cfg);
  auto trial_seeds = seed_stream(cfg.seed, "trials");

  std::vector<matcher::CmcCurve> curves;
  std::size_t gallery_size = 0;
  for (int t = 0; t < trials; ++t) {
    const std::uint64_t trial_seed = trial_seeds();
    const auto [train_idx, test_idx] = split_indices(views.size(), trial_seed);
    std::vector<ranker::PersonViews> train, test;
    for (std::size_t i : train_idx) train.push_back(views[i]);
    for (std::size_t i : test_idx) test.push_back(views[i]);
    Config trial_cfg = cfg;
    trial_cfg.seed = trial_seed;
    const ranker::RankModel model = train_model(train, trial_cfg);
    const auto ranked = evaluate(model, test);
    gallery_size = test.size();
    curves.push_back(matcher::cmc_curve(ranked, gallery_size));
    check_curve(curves.back());
  }
  write_cmc(common.out, matcher::average_curves(curves), gallery_size, out);
  return 0;
}

}  // namespace

int run_command(const std::vector<std::string>& argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Discriminative video ranking for person re-identification", "dvr"};
  app.require_subcommand(1);

  CommonFlags common;
  FusionFlags fusion;
  int persons = 8, frames = 60, min_period = 10, max_period = 18, trials = 10;
  double noise = 0.0;
  std::string data, model_path, split = "all";
  bool descriptors = false;

  auto* synth = app.add_subcommand("synth", "generate a synthetic two-camera dataset");
  auto* fragment = app.add_subcommand("fragment", "write flow-energy profiles and landmark lists");
  auto* train = app.add_subcommand("train", "learn a ranking model");
  auto* match = app.add_subcommand("match", "rank the gallery for every probe");
  auto* eval = app.add_subcommand("eval", "CMC evaluation");

  for (auto* sub : {synth, fragment, train, match, eval}) common.attach(*sub, true);
  synth->add_option("--persons", persons, "number of persons")->check(CLI::PositiveNumber);
  synth->add_option("--frames", frames, "frames per sequence")->check(CLI::PositiveNumber);
  synth->add_option("--noise", noise, "degradation level (0 = clean)")->check(CLI::NonNegativeNumber);
  synth->add_option("--min-period", min_period, "shortest gait period in frames");
  synth->add_option("--max-period", max_period, "longest gait period in frames");

  const auto split_check = CLI::IsMember({"all", "train", "test"});
  for (auto* sub : {fragment, train, match, eval})
    sub->add_option("--data", data, "dataset root")->required()->check(CLI::ExistingDirectory);
  fragment->add_flag("--descriptors", descriptors, "also write fragment descriptors");
  for (auto* sub : {train, match, eval})
    sub->add_option("--split", split, "persons to use: all, or the train/test half of the seeded split")
        ->check(split_check);
  match->add_option("--model", model_path, "model file")->required()->check(CLI::ExistingFile);
  eval->add_option("--model", model_path, "model file; without it, repeated train/test halving is run")
      ->check(CLI::ExistingFile);
  eval->add_option("--trials", trials, "train/test trials when no model is given");
  fusion.attach(*match);
  fusion.attach(*eval);

  std::vector<std::string> args(argv.size() > 1 ? argv.begin() + 1 : argv.end(), argv.end());
  std::reverse(args.begin(), args.end());
  try {
    app.parse(args);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err);
  }

  try {
    set_thread_count(common.threads);
    if (synth->parsed()) return cmd_synth(common, persons, frames, noise, min_period, max_period, out);
    if (fragment->parsed()) return cmd_fragment(common, data, descriptors, out);
    if (train->parsed()) return cmd_train(common, data, split, out);
    if (match->parsed()) return cmd_match(common, data, model_path, split, fusion, out);
    return cmd_eval(common, data, model_path, trials, split, fusion, out);
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
}

int run_command(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  return run_command(std::vector<std::string>(argv, argv + argc), out, err);
}

}  // namespace dvr::cli

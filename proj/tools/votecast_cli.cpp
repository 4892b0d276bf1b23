// votecast: vote-share forecasting from social-media interaction volumes.
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "votecast/arimax.hpp"
#include "votecast/evaluate.hpp"
#include "votecast/ingest.hpp"
#include "votecast/scenario.hpp"
#include "votecast/synth.hpp"

using nlohmann::json;
using namespace votecast;

namespace {

std::uint64_t env_seed() {
  if (const char* s = std::getenv("VOTECAST_SEED")) {
    return std::strtoull(s, nullptr, 10);
  }
  return 0;
}

json load_config(const std::string& path) {
  if (path.empty()) return json::object();
  std::ifstream in(path);
  if (!in) raise(Errc::ConfigError, "cannot read config file " + path);
  json cfg;
  try {
    in >> cfg;
  } catch (const json::exception& e) {
    raise(Errc::ConfigError, path + ": " + e.what());
  }
  if (!cfg.is_object()) raise(Errc::ConfigError, path + ": top level must be an object");
  return cfg;
}

// Flags beat the config file; the config beats built-in defaults.
template <typename T>
void from_config(const json& cfg, const CLI::Option* opt, const char* key, T& var) {
  if (opt->count() > 0 || !cfg.contains(key)) return;
  try {
    var = cfg.at(key).get<T>();
  } catch (const json::exception& e) {
    raise(Errc::ConfigError, std::string("config field '") + key + "': " + e.what());
  }
}

std::ofstream open_output(const std::string& path) {
  const std::filesystem::path p(path);
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
  std::ofstream out(p);
  if (!out) raise(Errc::ConfigError, "cannot open output file " + path);
  return out;
}

void stamp(std::ostream& out, bool deterministic) {
  if (deterministic) return;
  const std::time_t now = std::time(nullptr);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
  out << "# generated " << buf << '\n';
}

std::string pct(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.1f", round_half_up_1dp(v));
  return buf;
}

std::map<SubjectId, double> parse_share_args(const std::vector<std::string>& args) {
  std::map<SubjectId, double> shares;
  for (const std::string& arg : args) {
    const std::size_t eq = arg.find('=');
    if (eq == std::string::npos || eq == 0) {
      raise(Errc::ConfigError, "expected name=value, got '" + arg + "'");
    }
    char* end = nullptr;
    const double v = std::strtod(arg.c_str() + eq + 1, &end);
    if (end == arg.c_str() + eq + 1 || *end != '\0') {
      raise(Errc::ConfigError, "bad share value in '" + arg + "'");
    }
    shares[SubjectId{arg.substr(0, eq)}] = v;
  }
  return shares;
}

ArimaxOrder order_from(int p, int d, int q) {
  if (d > 2) {
    std::cerr << "warning: differencing order d=" << d
              << " is unusually high; forecasts may be unstable\n";
  }
  return {p, d, q};
}

ModelChoice model_by_name(const std::string& name, std::uint64_t seed, ArimaxOrder order) {
  for (const NamedModel& m : default_models(seed, order)) {
    if (m.name == name) return m.choice;
  }
  raise(Errc::ConfigError, "unknown model '" + name + "'");
}

std::vector<FeatureSet> parse_feature_sets(const std::vector<std::string>& names) {
  std::vector<FeatureSet> out;
  for (const std::string& name : names) {
    const auto fs = parse_feature_set(name);
    if (!fs) raise(Errc::ConfigError, "unknown feature set '" + name + "'");
    out.push_back(*fs);
  }
  return out;
}

int run_synth(const std::string& out_dir, int days, int cadence, const std::string& start,
              std::uint64_t seed) {
  const DayIndex d0 = DayIndex::parse(start);
  const InteractionTable table = gen_interactions(benchmark_targets(), days, d0, seed);

  LinkModel link_a;  // benchmark defaults
  LinkModel link_b;
  link_b.base_share = 37.0;

  PollBook book = gen_polls(link_a, table, SubjectId{"candidate_a"}, cadence, seed);
  PollBook book_b = gen_polls(link_b, table, SubjectId{"candidate_b"}, cadence, seed);
  book.subjects.merge(book_b.subjects);

  std::filesystem::create_directories(out_dir);
  {
    std::ofstream out = open_output(out_dir + "/interactions.csv");
    write_interactions_csv(out, table);
  }
  {
    std::ofstream out = open_output(out_dir + "/polls.csv");
    write_polls_csv(out, book);
  }
  std::cout << "wrote " << out_dir << "/interactions.csv and " << out_dir << "/polls.csv\n";
  return 0;
}

int run_validate(const std::string& interactions, const std::string& polls) {
  try {
    if (!interactions.empty()) parse_interactions(interactions);
    if (!polls.empty()) parse_polls(polls);
  } catch (const Error& e) {
    std::cerr << "invalid: " << e.what() << '\n';
    return 1;
  }
  std::cout << "ok\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"vote-share forecasting from social-media interaction volumes"};
  app.require_subcommand(1);
  app.fallthrough();

  bool deterministic = false;
  app.add_flag("--deterministic", deterministic,
               "suppress timestamp headers for byte-identical reruns");

  int rc = 0;

  // synth
  auto* synth = app.add_subcommand("synth", "write the synthetic benchmark CSVs");
  struct {
    std::string config, out_dir = "benchmark", start = "2020-03-01";
    int days = 1158, cadence = 30;
    std::uint64_t seed = env_seed();
  } sy;
  synth->add_option("--config", sy.config, "JSON config file");
  auto* sy_out = synth->add_option("--out-dir", sy.out_dir, "output directory");
  auto* sy_days = synth->add_option("--days", sy.days, "coverage days (>= 30)");
  auto* sy_cad = synth->add_option("--cadence", sy.cadence, "poll cadence in days");
  auto* sy_start = synth->add_option("--start", sy.start, "first coverage date (YYYY-MM-DD)");
  auto* sy_seed = synth->add_option("--seed", sy.seed, "master seed");
  synth->callback([&] {
    const json cfg = load_config(sy.config);
    from_config(cfg, sy_out, "out_dir", sy.out_dir);
    from_config(cfg, sy_days, "days", sy.days);
    from_config(cfg, sy_cad, "cadence", sy.cadence);
    from_config(cfg, sy_start, "start", sy.start);
    from_config(cfg, sy_seed, "seed", sy.seed);
    rc = run_synth(sy.out_dir, sy.days, sy.cadence, sy.start, sy.seed);
  });

  // validate
  auto* validate = app.add_subcommand("validate", "schema-check input CSVs");
  struct {
    std::string interactions, polls;
  } va;
  validate->add_option("--interactions", va.interactions, "interactions.csv path");
  validate->add_option("--polls", va.polls, "polls.csv path");
  validate->callback([&] {
    if (va.interactions.empty() && va.polls.empty()) {
      raise(Errc::ConfigError, "validate needs --interactions and/or --polls");
    }
    rc = run_validate(va.interactions, va.polls);
  });

  // grid
  auto* grid = app.add_subcommand("grid", "walk-forward evaluation over all cells");
  struct {
    std::string config, interactions, polls, subject, out = "grid.csv";
    std::vector<int> windows;
    std::vector<std::string> feature_sets;
    double fraction = 0.8;
    int max_train_rows = 0;
    int p = 0, d = 5, q = 1;
    std::uint64_t seed = env_seed();
  } gr;
  grid->add_option("--config", gr.config, "JSON config file");
  auto* gr_in = grid->add_option("--interactions", gr.interactions, "interactions.csv path");
  auto* gr_po = grid->add_option("--polls", gr.polls, "polls.csv path");
  auto* gr_su = grid->add_option("--subject", gr.subject, "subject to evaluate");
  auto* gr_out = grid->add_option("--out", gr.out, "output CSV path");
  auto* gr_wi = grid->add_option("--windows", gr.windows, "aggregation windows");
  auto* gr_fs = grid->add_option("--feature-sets", gr.feature_sets,
                                 "feature sets (twitter|facebook|instagram|all)");
  auto* gr_fr = grid->add_option("--fraction", gr.fraction, "initial train fraction");
  auto* gr_mx = grid->add_option("--max-train-rows", gr.max_train_rows,
                                 "sliding-window cap (0 = expanding)");
  auto* gr_p = grid->add_option("--arimax-p", gr.p, "AR order");
  auto* gr_d = grid->add_option("--arimax-d", gr.d, "differencing order");
  auto* gr_q = grid->add_option("--arimax-q", gr.q, "MA order");
  auto* gr_seed = grid->add_option("--seed", gr.seed, "master seed");
  grid->callback([&] {
    const json cfg = load_config(gr.config);
    from_config(cfg, gr_in, "interactions", gr.interactions);
    from_config(cfg, gr_po, "polls", gr.polls);
    from_config(cfg, gr_su, "subject", gr.subject);
    from_config(cfg, gr_out, "out", gr.out);
    from_config(cfg, gr_wi, "windows", gr.windows);
    from_config(cfg, gr_fs, "feature_sets", gr.feature_sets);
    from_config(cfg, gr_fr, "fraction", gr.fraction);
    from_config(cfg, gr_mx, "max_train_rows", gr.max_train_rows);
    from_config(cfg, gr_p, "arimax_p", gr.p);
    from_config(cfg, gr_d, "arimax_d", gr.d);
    from_config(cfg, gr_q, "arimax_q", gr.q);
    from_config(cfg, gr_seed, "seed", gr.seed);
    if (gr.interactions.empty() || gr.polls.empty() || gr.subject.empty()) {
      raise(Errc::ConfigError, "grid needs --interactions, --polls and --subject");
    }

    const InteractionTable table = parse_interactions(gr.interactions);
    const PollBook polls = parse_polls(gr.polls);
    GridOptions options;
    if (!gr.windows.empty()) options.windows = gr.windows;
    if (!gr.feature_sets.empty()) options.feature_sets = parse_feature_sets(gr.feature_sets);
    options.walk.initial_train_fraction = gr.fraction;
    if (gr.max_train_rows > 0) options.walk.max_train_rows = gr.max_train_rows;
    options.seed = gr.seed;
    options.models = default_models(gr.seed, order_from(gr.p, gr.d, gr.q));

    const EvalGrid result = run_grid(table, polls, SubjectId{gr.subject}, options);
    std::ofstream out = open_output(gr.out);
    stamp(out, deterministic);
    write_grid_csv(out, result);
    rc = 0;
  });

  // forecast
  auto* forecast_cmd = app.add_subcommand("forecast", "predicted share at the final anchor");
  struct {
    std::string config, interactions, polls, out = "forecast.csv";
    std::vector<std::string> subjects;
    std::string feature_set = "all", model = "arimax";
    int window = 1;
    int p = 0, d = 5, q = 1;
    std::uint64_t seed = env_seed();
  } fo;
  forecast_cmd->add_option("--config", fo.config, "JSON config file");
  auto* fo_in = forecast_cmd->add_option("--interactions", fo.interactions, "interactions.csv");
  auto* fo_po = forecast_cmd->add_option("--polls", fo.polls, "polls.csv");
  auto* fo_su = forecast_cmd->add_option("--subjects", fo.subjects,
                                         "subjects (default: all polled)");
  auto* fo_fs = forecast_cmd->add_option("--feature-set", fo.feature_set, "feature set");
  auto* fo_wi = forecast_cmd->add_option("--window", fo.window, "aggregation window");
  auto* fo_mo = forecast_cmd->add_option(
      "--model", fo.model, "arimax|linear|random_forest|gradient_boosting");
  auto* fo_out = forecast_cmd->add_option("--out", fo.out, "output CSV path");
  auto* fo_p = forecast_cmd->add_option("--arimax-p", fo.p, "AR order");
  auto* fo_d = forecast_cmd->add_option("--arimax-d", fo.d, "differencing order");
  auto* fo_q = forecast_cmd->add_option("--arimax-q", fo.q, "MA order");
  auto* fo_seed = forecast_cmd->add_option("--seed", fo.seed, "master seed");
  forecast_cmd->callback([&] {
    const json cfg = load_config(fo.config);
    from_config(cfg, fo_in, "interactions", fo.interactions);
    from_config(cfg, fo_po, "polls", fo.polls);
    from_config(cfg, fo_su, "subjects", fo.subjects);
    from_config(cfg, fo_fs, "feature_set", fo.feature_set);
    from_config(cfg, fo_wi, "window", fo.window);
    from_config(cfg, fo_mo, "model", fo.model);
    from_config(cfg, fo_out, "out", fo.out);
    from_config(cfg, fo_p, "arimax_p", fo.p);
    from_config(cfg, fo_d, "arimax_d", fo.d);
    from_config(cfg, fo_q, "arimax_q", fo.q);
    from_config(cfg, fo_seed, "seed", fo.seed);
    if (fo.interactions.empty() || fo.polls.empty()) {
      raise(Errc::ConfigError, "forecast needs --interactions and --polls");
    }
    const auto fs = parse_feature_set(fo.feature_set);
    if (!fs) raise(Errc::ConfigError, "unknown feature set '" + fo.feature_set + "'");

    const InteractionTable table = parse_interactions(fo.interactions);
    const PollBook polls = parse_polls(fo.polls);
    std::vector<SubjectId> subjects;
    for (const std::string& s : fo.subjects) subjects.push_back(SubjectId{s});
    if (subjects.empty()) {
      for (const auto& [subject, obs] : polls.subjects) subjects.push_back(subject);
    }
    const ModelChoice choice =
        model_by_name(fo.model, fo.seed, order_from(fo.p, fo.d, fo.q));

    std::ofstream out = open_output(fo.out);
    stamp(out, deterministic);
    out << "subject,anchor,share_pct\n";
    for (const SubjectId& subject : subjects) {
      const ModelDataset ds = assemble_dataset(table, polls, subject, *fs, fo.window);
      if (ds.rows.size() < 2) raise(Errc::DatasetTooSmall, subject.name);
      Matrix x_train;
      std::vector<double> y_train;
      for (std::size_t r = 0; r + 1 < ds.rows.size(); ++r) {
        x_train.push_back(ds.rows[r].features);
        y_train.push_back(ds.rows[r].target);
      }
      const DatasetRow& last = ds.rows.back();
      const int k = static_cast<int>(ds.feature_names.size());
      double predicted = 0.0;
      if (const auto* spec = std::get_if<RegressorSpec>(&choice)) {
        predicted = fit(x_train, y_train, *spec).predict(last.features);
      } else {
        const ArimaxFit fitted =
            fit_arimax(y_train, k > 0 ? &x_train : nullptr, std::get<ArimaxOrder>(choice));
        Matrix future = {last.features};
        predicted = forecast(fitted, 1, k > 0 ? &future : nullptr).front();
      }
      out << subject.name << ',' << last.anchor.to_iso() << ',' << pct(predicted) << '\n';
    }
    rc = 0;
  });

  // redistribute
  auto* redistribute_cmd =
      app.add_subcommand("redistribute", "fold the undecided share into decided shares");
  struct {
    std::string config, out;
    std::vector<std::string> shares;
    double undecided = 0.0;
  } re;
  redistribute_cmd->add_option("--config", re.config, "JSON config file");
  auto* re_sh = redistribute_cmd->add_option("--share", re.shares, "subject=percent");
  auto* re_un = redistribute_cmd->add_option("--undecided", re.undecided, "undecided percent");
  redistribute_cmd->add_option("--out", re.out, "output CSV path (default stdout)");
  redistribute_cmd->callback([&] {
    const json cfg = load_config(re.config);
    from_config(cfg, re_un, "undecided", re.undecided);
    ShareVector base;
    base.shares = parse_share_args(re.shares);
    if (re_sh->count() == 0 && cfg.contains("shares")) {
      for (const auto& [name, value] : cfg.at("shares").items()) {
        base.shares[SubjectId{name}] = value.get<double>();
      }
    }
    if (base.shares.empty()) raise(Errc::ConfigError, "no shares given");
    base.undecided = re.undecided;

    const ShareVector out_shares = redistribute_undecided(base);
    std::ofstream file;
    if (!re.out.empty()) file = open_output(re.out);
    std::ostream& out = re.out.empty() ? std::cout : file;
    stamp(out, deterministic);
    out << "subject,share_pct\n";
    for (const auto& [subject, share] : out_shares.shares) {
      out << subject.name << ',' << pct(share) << '\n';
    }
    rc = 0;
  });

  // scenario
  auto* scenario_cmd = app.add_subcommand("scenario", "round-2 vote transfer scenarios");
  struct {
    std::string config, out = "scenario.csv";
    std::vector<std::string> base_shares;
    double undecided = 0.0;
    std::string finalist_a, finalist_b, pool;
    bool builtin = false;
  } sc;
  scenario_cmd->add_option("--config", sc.config, "JSON config file");
  auto* sc_ba = scenario_cmd->add_option("--base-share", sc.base_shares, "subject=percent");
  auto* sc_un = scenario_cmd->add_option("--undecided", sc.undecided, "undecided percent");
  auto* sc_fa = scenario_cmd->add_option("--finalist-a", sc.finalist_a, "first finalist");
  auto* sc_fb = scenario_cmd->add_option("--finalist-b", sc.finalist_b, "second finalist");
  auto* sc_po = scenario_cmd->add_option("--pool", sc.pool, "eliminated pool subject");
  auto* sc_bi = scenario_cmd->add_flag("--builtin", sc.builtin, "use the ten builtin rules");
  auto* sc_out = scenario_cmd->add_option("--out", sc.out, "output CSV path");
  scenario_cmd->callback([&] {
    const json cfg = load_config(sc.config);
    from_config(cfg, sc_un, "undecided", sc.undecided);
    from_config(cfg, sc_fa, "finalist_a", sc.finalist_a);
    from_config(cfg, sc_fb, "finalist_b", sc.finalist_b);
    from_config(cfg, sc_po, "pool", sc.pool);
    from_config(cfg, sc_out, "out", sc.out);
    if (sc_bi->count() == 0 && cfg.contains("builtin")) {
      sc.builtin = cfg.at("builtin").get<bool>();
    }
    ShareVector base;
    base.shares = parse_share_args(sc.base_shares);
    if (sc_ba->count() == 0 && cfg.contains("base_shares")) {
      for (const auto& [name, value] : cfg.at("base_shares").items()) {
        base.shares[SubjectId{name}] = value.get<double>();
      }
    }
    base.undecided = sc.undecided;
    if (sc.finalist_a.empty() || sc.finalist_b.empty()) {
      raise(Errc::ConfigError, "scenario needs --finalist-a and --finalist-b");
    }
    const std::vector<SubjectId> finalists = {SubjectId{sc.finalist_a},
                                              SubjectId{sc.finalist_b}};

    std::vector<TransferRule> rules;
    if (sc.builtin) {
      if (sc.pool.empty()) raise(Errc::ConfigError, "builtin scenarios need --pool");
      rules = builtin_scenarios(finalists[0], finalists[1], SubjectId{sc.pool});
    } else if (cfg.contains("rules")) {
      for (const json& jr : cfg.at("rules")) {
        TransferRule rule;
        rule.label = jr.at("label").get<std::string>();
        for (const json& jp : jr.at("pools")) {
          PoolAssignment pa;
          const std::string src = jp.at("source").get<std::string>();
          pa.source = src == "undecided" ? PoolSource::undecided()
                                         : PoolSource::of(SubjectId{src});
          const std::string kind = jp.at("action").get<std::string>();
          if (kind == "exclude") {
            pa.action = TransferAction::exclude();
          } else if (kind == "all_to") {
            pa.action = TransferAction::all_to(SubjectId{jp.at("target").get<std::string>()});
          } else if (kind == "split_equal") {
            std::vector<SubjectId> targets;
            for (const json& t : jp.at("targets")) targets.push_back(SubjectId{t.get<std::string>()});
            pa.action = TransferAction::split_equal(std::move(targets));
          } else {
            raise(Errc::ConfigError, "unknown action '" + kind + "'");
          }
          rule.pools.push_back(std::move(pa));
        }
        rules.push_back(std::move(rule));
      }
    } else {
      raise(Errc::ConfigError, "need --builtin or a config with explicit rules");
    }

    std::ofstream out = open_output(sc.out);
    stamp(out, deterministic);
    out << "scenario,subject,share_pct\n";
    for (const TransferRule& rule : rules) {
      const RoundTwoResult result = apply_scenario(base, finalists, rule);
      for (const auto& [subject, share] : result.shares) {
        out << result.label << ',' << subject.name << ',' << pct(share) << '\n';
      }
    }
    rc = 0;
  });

  // decompose
  auto* decompose_cmd =
      app.add_subcommand("decompose", "trend/seasonal/residual split of one feature series");
  struct {
    std::string config, interactions, subject, platform = "twitter", feature = "like";
    std::string out = "decompose.csv";
    int period = 7;
  } de;
  decompose_cmd->add_option("--config", de.config, "JSON config file");
  auto* de_in = decompose_cmd->add_option("--interactions", de.interactions, "interactions.csv");
  auto* de_su = decompose_cmd->add_option("--subject", de.subject, "subject");
  auto* de_pl = decompose_cmd->add_option("--platform", de.platform, "platform");
  auto* de_fe = decompose_cmd->add_option("--feature", de.feature, "feature");
  auto* de_pe = decompose_cmd->add_option("--period", de.period, "seasonal period in days");
  auto* de_out = decompose_cmd->add_option("--out", de.out, "output CSV path");
  decompose_cmd->callback([&] {
    const json cfg = load_config(de.config);
    from_config(cfg, de_in, "interactions", de.interactions);
    from_config(cfg, de_su, "subject", de.subject);
    from_config(cfg, de_pl, "platform", de.platform);
    from_config(cfg, de_fe, "feature", de.feature);
    from_config(cfg, de_pe, "period", de.period);
    from_config(cfg, de_out, "out", de.out);
    if (de.interactions.empty() || de.subject.empty()) {
      raise(Errc::ConfigError, "decompose needs --interactions and --subject");
    }
    const auto platform = parse_platform(de.platform);
    if (!platform) raise(Errc::ConfigError, "unknown platform '" + de.platform + "'");
    const auto feature = parse_feature(de.feature);
    if (!feature) raise(Errc::ConfigError, "unknown feature '" + de.feature + "'");

    const InteractionTable table = parse_interactions(de.interactions);
    const DailySeries* series = table.find(SubjectId{de.subject}, *platform, *feature);
    if (series == nullptr) {
      raise(Errc::UnknownSubject,
            de.subject + "/" + de.platform + "/" + de.feature + " not in table");
    }
    const Decomposition dec = decompose(*series, de.period);

    std::ofstream out = open_output(de.out);
    stamp(out, deterministic);
    out << "date,value,trend,seasonal,residual\n";
    auto cell = [](double v) {
      if (is_absent(v)) return std::string();
      char buf[32];
      std::snprintf(buf, sizeof buf, "%.6f", v);
      return std::string(buf);
    };
    for (std::size_t i = 0; i < series->size(); ++i) {
      out << series->day(i).to_iso() << ',' << cell(series->values[i]) << ','
          << cell(dec.trend.values[i]) << ',' << cell(dec.seasonal.values[i]) << ','
          << cell(dec.residual.values[i]) << '\n';
    }
    rc = 0;
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return rc;
}

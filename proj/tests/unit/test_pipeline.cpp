#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "qb/error.hpp"
#include "qb/pipeline.hpp"
#include "qb/scenarios.hpp"
#include "qb/synth.hpp"

namespace {

namespace fs = std::filesystem;

fs::path temp_dir(const std::string& name) {
  const auto d = fs::temp_directory_path() / "qb_pipeline_tests" / name;
  fs::remove_all(d);
  fs::create_directories(d);
  return d;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

TEST(Config, InvertedWindowFailsBeforeCompute) {
  auto cfg = qb::scenarios::quasistatic_config();
  cfg.large = {1e7, 2e5};
  try {
    qb::validate(cfg);
    FAIL() << "expected ConfigError";
  } catch (const qb::ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("inverted"), std::string::npos);
  }
  const std::vector<qb::Observation> obs{{"a", 1, 1.0}, {"a", 2, 2.0}};
  EXPECT_THROW(qb::run_pipeline(cfg, obs), qb::ConfigError);
}

TEST(Config, JsonRoundTripAndStrictKeys) {
  auto cfg = qb::scenarios::quasistatic_config();
  cfg.period_pairs = {{2001, 2003}};
  cfg.inputs = {"a.csv"};
  cfg.columns.delimiter = ';';
  const auto j = qb::config_to_json(cfg);
  const auto back = qb::config_from_json(j);
  EXPECT_EQ(qb::config_to_json(back), j);
  EXPECT_EQ(back.growth_mode, qb::GrowthMode::modified);
  EXPECT_EQ(back.columns.delimiter, ';');

  EXPECT_THROW(qb::config_from_json(qb::json{{"r_widht", 0.1}}), qb::ConfigError);
  EXPECT_THROW(qb::config_from_json(qb::json{{"growth_mode", "sideways"}}), qb::ConfigError);
  EXPECT_THROW(qb::config_from_json(qb::json{{"period_pairs", {{3, 2}}}}), qb::ConfigError);
  EXPECT_THROW(qb::config_from_json(qb::json{{"r_width", "wide"}}), qb::ConfigError);
  EXPECT_THROW(qb::load_config("/nonexistent/qb.json"), qb::ConfigError);
}

qb::json quasistatic_pair_report(std::uint64_t seed) {
  const auto s = qb::gen_panel(qb::scenarios::quasistatic_spec(seed));
  return qb::analyze_pair(s.panel, qb::scenarios::quasistatic_config());
}

TEST(Pipeline, QuasistaticRelationsHold) {
  const auto r = quasistatic_pair_report(1);
  EXPECT_NEAR(r["balance"]["large"]["theta"].get<double>(), 0.9, 0.03);
  EXPECT_NEAR(r["balance"]["middle"]["theta"].get<double>(), 0.9, 0.03);
  EXPECT_TRUE(r["relations"]["mu_pass"].get<bool>()) << r["relations"].dump();
  EXPECT_TRUE(r["relations"]["sigma_pass"].get<bool>()) << r["relations"].dump();
  EXPECT_EQ(r["gamma"]["large"]["status"], "determined");
  EXPECT_LT(r["symmetry"]["detailed"]["p_value"].get<double>(), 1e-6);
}

TEST(Pipeline, StaticInputGivesUnitThetaAndNoGamma) {
  auto spec = qb::scenarios::quasistatic_spec(2);
  spec.mode = qb::GenMode::static_nongibrat;
  const auto s = qb::gen_panel(spec);
  const auto r = qb::analyze_pair(s.panel, qb::scenarios::quasistatic_config());
  EXPECT_NEAR(r["balance"]["large"]["theta"].get<double>(), 1.0, 0.03);
  EXPECT_NEAR(r["balance"]["middle"]["theta"].get<double>(), 1.0, 0.03);
  EXPECT_EQ(r["gamma"]["large"]["status"], "indeterminate");
  EXPECT_EQ(r["gamma"]["middle"]["status"], "indeterminate");
  EXPECT_TRUE(r["gamma"]["large"]["gamma"].is_null());
}

TEST(Pipeline, StageErrorsAreRecordedNotThrown) {
  std::vector<qb::Pair> pairs;
  for (int i = 0; i < 200; ++i) pairs.push_back({1000.0 + i, 1010.0 + i});
  const auto r = qb::analyze_pair(qb::make_panel(pairs), qb::scenarios::static_config());
  ASSERT_TRUE(r["errors"].is_array());
  EXPECT_FALSE(r["errors"].empty());
  bool large = false;
  for (const auto& e : r["errors"]) large |= e["stage"] == "balance_large";
  EXPECT_TRUE(large);
  EXPECT_EQ(r["n_pairs"], 200);
}

std::vector<qb::Observation> three_periods(std::size_t n) {
  auto a = qb::scenarios::quasistatic_spec(10, n);
  auto b = qb::scenarios::quasistatic_spec(11, n);
  auto oa = qb::to_observations(qb::gen_panel(a).panel);
  auto pb = qb::gen_panel(b).panel;
  pb.period_1 = 2;
  pb.period_2 = 3;
  for (auto& e : pb.entities) e = "b" + e;
  auto ob = qb::to_observations(pb);
  oa.insert(oa.end(), ob.begin(), ob.end());
  return oa;
}

TEST(Pipeline, ConsecutivePairsAndReportLayout) {
  const auto obs = three_periods(5000);
  auto cfg = qb::scenarios::quasistatic_config();
  const auto rep = qb::run_pipeline(cfg, obs);
  EXPECT_EQ(rep["schema"], "quasibalance.report");
  EXPECT_EQ(rep["version"], qb::kReportVersion);
  ASSERT_EQ(rep["pairs"].size(), 2u);
  EXPECT_EQ(rep["pairs"][0]["period_1"], 1);
  EXPECT_EQ(rep["pairs"][1]["period_2"], 3);
  EXPECT_EQ(rep["pairs"][0]["n_pairs"], 5000);
  EXPECT_EQ(rep["ingest"]["n_observations"], 20000);
}

TEST(Pipeline, MissingOverlapIsPairError) {
  std::vector<qb::Observation> obs{{"a", 1, 1.0}, {"b", 2, 2.0}};
  auto cfg = qb::scenarios::static_config();
  const auto rep = qb::run_pipeline(cfg, obs);
  ASSERT_EQ(rep["pairs"].size(), 1u);
  EXPECT_EQ(rep["pairs"][0]["errors"][0]["stage"], "pair");
}

TEST(Pipeline, DeterministicAcrossThreadsAndRuns) {
  const auto obs = three_periods(20000);
  auto cfg = qb::scenarios::quasistatic_config();
  cfg.threads = 1;
  const auto a = qb::dump_report(qb::run_pipeline(cfg, obs));
  cfg.threads = 4;
  const auto b = qb::dump_report(qb::run_pipeline(cfg, obs));
  const auto c = qb::dump_report(qb::run_pipeline(cfg, obs));
  EXPECT_EQ(a, b);
  EXPECT_EQ(b, c);
}

TEST(Pipeline, WritesTsvOutputs) {
  const auto dir = temp_dir("tsv");
  auto cfg = qb::scenarios::quasistatic_config();
  cfg.output_dir = dir.string();
  qb::run_pipeline(cfg, three_periods(5000));
  for (const char* f : {"timeseries.tsv", "pair_1-2_density_p1.tsv", "pair_1-2_density_p2.tsv",
                        "pair_1-2_growth_q.tsv", "pair_1-2_tents.tsv", "pair_2-3_scatter.tsv"}) {
    EXPECT_TRUE(fs::exists(dir / f)) << f;
  }
  const auto ts = slurp(dir / "timeseries.tsv");
  EXPECT_EQ(ts.substr(0, ts.find('\n')),
            "period_1\tperiod_2\ttheta_h\ttheta_m\tmu_ratio\tsigma_ratio\tgamma_large\tgamma_middle");
  EXPECT_EQ(std::count(ts.begin(), ts.end(), '\n'), 3);
}

TEST(Check, PassesAndDetectsTampering) {
  auto cfg = qb::scenarios::quasistatic_config();
  const auto s = qb::gen_panel(qb::scenarios::quasistatic_spec(1));
  auto rep = qb::run_pipeline(cfg, qb::to_observations(s.panel));
  const auto ok = qb::run_check(rep);
  EXPECT_TRUE(ok.pass) << (ok.failures.empty() ? "" : ok.failures[0]);
  rep["pairs"][0]["balance"]["large"]["theta"] = 0.5;
  const auto bad = qb::run_check(rep);
  EXPECT_FALSE(bad.pass);
  ASSERT_FALSE(bad.failures.empty());
  EXPECT_NE(bad.failures[0].find("theta_H"), std::string::npos);
  EXPECT_FALSE(qb::run_check(qb::json{{"schema", "other"}}).pass);
}

TEST(Check, ReportTextIsStable) {
  const auto s = qb::gen_panel(qb::scenarios::quasistatic_spec(4, 20000));
  auto cfg = qb::scenarios::quasistatic_config();
  const auto rep = qb::run_pipeline(cfg, qb::to_observations(s.panel));
  const auto text = qb::dump_report(rep);
  EXPECT_EQ(qb::dump_report(qb::json::parse(text)), text);
}

}  // namespace

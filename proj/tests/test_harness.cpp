#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "doctest.h"
#include "twinbeam/harness.hpp"

using namespace twinbeam;

namespace {

ExperimentConfig tiny_cfg() {
  ExperimentConfig cfg;
  cfg.train_n = 150;
  cfg.test_n = 40;
  cfg.pretrain.epochs = 2;
  cfg.finetune.epochs = 1;
  cfg.seeds = {1};
  cfg.s_list = {3, 63};
  cfg.sweeps_per_position = 2;
  cfg.direct_budget = 200;
  cfg.gbo.starts = 8;
  cfg.gbo_starts_list = {4, 8};
  cfg.ga.population = 10;
  cfg.ga.generations = 5;
  return cfg;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("real measurements are metered, probes are free") {
  Scene sc = make_default_scene();
  GroundTruth gt(sc, NoiseModel{1.0}, 5);
  std::vector<Angles> beams = beam_subset(default_codebook(), 5);
  CHECK(gt.measurements() == 0);
  gt.sweep(beams);
  CHECK(gt.measurements() == 5);
  gt.measure_sinr_db(beams[0]);
  CHECK(gt.measurements() == 6);
  gt.probe_sinr_db(beams[0]);
  gt.probe_sinr_db(beams[2]);
  CHECK(gt.measurements() == 6);

  // with zero noise the metered reading equals the exact probe
  GroundTruth quiet(sc, NoiseModel{0.0}, 9);
  double read = quiet.measure_sinr_db(beams[1]);
  CHECK(read == quiet.probe_sinr_db(beams[1]));
}

TEST_CASE("ground-truth worlds are pinned by seed and noise stream") {
  Harness h(tiny_cfg());
  GroundTruth a = h.make_ground_truth(3, 0);
  GroundTruth b = h.make_ground_truth(3, 0);
  GroundTruth c = h.make_ground_truth(3, 1);
  GroundTruth d = h.make_ground_truth(4, 0);

  CHECK(scene_hash(a.scene()) == scene_hash(b.scene()));
  CHECK(scene_hash(a.scene()) == scene_hash(c.scene()));  // same world, new noise
  CHECK(scene_hash(a.scene()) != scene_hash(d.scene()));
  CHECK(scene_hash(a.scene()) != scene_hash(h.twin()));   // materials were jittered

  std::vector<Angles> beams = beam_subset(h.codebook(), 3);
  Eigen::VectorXd va = a.sweep(beams).sinr_db;
  Eigen::VectorXd vb = b.sweep(beams).sinr_db;
  Eigen::VectorXd vc = c.sweep(beams).sinr_db;
  CHECK(va == vb);
  CHECK(va != vc);
}

TEST_CASE("column slicing reproduces directly generated datasets") {
  Scene sc = make_default_scene();
  Dataset full = gen_dataset(sc, 20, 63, 77);
  for (int s : {3, 11, 21}) {
    Dataset sliced = slice_dataset(full, s);
    Dataset direct = gen_dataset(sc, 20, s, 77);
    CHECK(sliced.x == direct.x);
    CHECK(sliced.y == direct.y);
    CHECK(sliced.s == s);
  }
  Dataset eleven = gen_dataset(sc, 5, 11, 78);
  CHECK_NOTHROW(slice_dataset(eleven, 3));  // 0,10,20 sit inside the even grid
  CHECK_THROWS_AS(slice_dataset(eleven, 7), std::invalid_argument);
}

TEST_CASE("interpolated beam pick follows the reconstructed grid") {
  Codebook cb = default_codebook();

  SUBCASE("full grid: the best measured entry wins") {
    std::vector<Angles> beams = cb.entries;
    Eigen::VectorXd v(63);
    for (int i = 0; i < 63; ++i) v[i] = static_cast<double>(i);
    Angles pick = interpolate_best_beam(cb, beams, v);
    CHECK(pick.az == cb.entries.back().az);
    CHECK(pick.el == cb.entries.back().el);
  }

  SUBCASE("peak at a mid-row knot; borrowed rows tie toward the first row") {
    std::vector<Angles> beams = beam_subset(cb, 3);
    Eigen::VectorXd v(3);
    v << 0.0, 10.0, 0.0;
    Angles pick = interpolate_best_beam(cb, beams, v);
    CHECK(pick.az == 0.0);
    CHECK(pick.el == cb.elevations[0]);
  }

  SUBCASE("interpolation is monotone along a ramp") {
    std::vector<Angles> beams = beam_subset(cb, 5);
    Eigen::VectorXd v(5);
    v << 0.0, 1.0, 2.0, 3.0, 4.0;
    Angles pick = interpolate_best_beam(cb, beams, v);
    CHECK(pick.az == cb.azimuths.back());
    CHECK(pick.el == cb.elevations[0]);
  }

  SUBCASE("measured rows keep their own values; gaps copy the nearest row") {
    std::vector<Angles> beams = {{cb.azimuths.front(), 0.0},
                                 {cb.azimuths.back(), 0.0},
                                 {cb.azimuths.front(), cb.elevations[0]},
                                 {cb.azimuths.back(), cb.elevations[0]}};
    Eigen::VectorXd v(4);
    v << 0.0, 0.0, 5.0, 5.0;
    Angles pick = interpolate_best_beam(cb, beams, v);
    CHECK(pick.az == cb.azimuths.front());
    CHECK(pick.el == cb.elevations[0]);
  }

  SUBCASE("bad inputs throw") {
    std::vector<Angles> beams = beam_subset(cb, 3);
    Eigen::VectorXd wrong(2);
    wrong << 1.0, 2.0;
    CHECK_THROWS_AS(interpolate_best_beam(cb, beams, wrong), std::invalid_argument);
    std::vector<Angles> off = {{0.0, 0.1}};
    Eigen::VectorXd one(1);
    one << 3.0;
    CHECK_THROWS_AS(interpolate_best_beam(cb, off, one), std::invalid_argument);
  }
}

TEST_CASE("transmitter placement re-aims at the relay") {
  Scene sc = make_default_scene();
  Vec3 p0(4.0, 1.5, 0.9);
  std::vector<Vec3> pk = {Vec3(5.5, 2.5, 0.9)};
  Scene out = with_transmitters(sc, p0, pk);
  CHECK(out.sta.position == p0);
  CHECK(out.interferers[0].position == pk[0]);
  Vec3 want = (sc.relay_rx.position - p0).normalized();
  CHECK((out.sta.boresight - want).norm() < 1e-15);
  CHECK(std::abs(out.interferers[0].boresight.norm() - 1.0) < 1e-15);
  CHECK_THROWS_AS(with_transmitters(sc, p0, {}), std::invalid_argument);
}

TEST_CASE("random scene draws stay in the region and are reproducible") {
  Scene sc = make_default_scene();
  std::vector<Scene> a = random_scenes(sc, 4, 9);
  std::vector<Scene> b = random_scenes(sc, 4, 9);
  std::vector<Scene> c = random_scenes(sc, 4, 10);
  REQUIRE(a.size() == 4);
  for (int i = 0; i < 4; ++i) {
    CHECK(scene_hash(a[i]) == scene_hash(b[i]));
    const Vec3& p = a[i].sta.position;
    CHECK(p.x() >= sc.tx_region_lo.x());
    CHECK(p.x() <= sc.tx_region_hi.x());
    CHECK(p.z() == sc.tx_region_lo.z());
    CHECK_NOTHROW(a[i].validate());
  }
  CHECK(scene_hash(a[0]) != scene_hash(c[0]));
}

TEST_CASE("pretrained models and datasets are cached per sweep size") {
  Harness h(tiny_cfg());
  const Dataset& tr = h.train63();
  CHECK(tr.n() == 150);
  CHECK(tr.s == 63);
  CHECK(h.test63().n() == 40);
  CHECK(&h.train63() == &tr);

  const MlpModel& m3 = h.pretrained(3);
  CHECK(m3.input_dim() == 3);
  CHECK(&h.pretrained(3) == &m3);
  CHECK(h.pretrained(63).input_dim() == 63);
}

TEST_CASE("sweep-size study produces one error figure per size and seed") {
  ExperimentConfig cfg = tiny_cfg();
  cfg.seeds = {1, 2};
  Harness h(cfg);
  std::vector<RmseRow> rows = h.rmse_vs_s();
  REQUIRE(rows.size() == 4);
  for (const RmseRow& r : rows) {
    CHECK(r.rmse_m > 0.0);
    CHECK(std::isfinite(r.rmse_m));
  }
  // deterministic: same harness state gives the same numbers again
  std::vector<RmseRow> again = h.rmse_vs_s();
  for (std::size_t i = 0; i < rows.size(); ++i)
    CHECK(rows[i].rmse_m == again[i].rmse_m);
}

TEST_CASE("assisted-vs-interpolation study fills every cell") {
  Harness h(tiny_cfg());
  std::vector<InterpRow> rows = h.interpolation_benchmark();
  REQUIRE(rows.size() == 2);
  for (const InterpRow& r : rows) {
    CHECK(std::isfinite(r.pao_db));
    CHECK(std::isfinite(r.baseline_db));
  }
}

TEST_CASE("budget study meters the assisted loop and the direct baseline") {
  ExperimentConfig cfg = tiny_cfg();
  Harness h(cfg);
  BudgetStudy study = h.budget_study();

  REQUIRE(study.pao.size() == 3);  // ga, gbo, gbo depth 4
  for (const PaoPoint& p : study.pao) {
    CHECK(p.cost == cfg.budget_s);
    CHECK(std::isfinite(p.final_db));
  }
  CHECK(study.pao[0].method == "pao-ga");
  CHECK(study.pao[1].method == "pao-gbo");
  CHECK(study.pao[2].method == "pao-gbo-4");

  REQUIRE(study.direct.size() == 2);
  for (const DirectRun& run : study.direct) {
    CHECK(run.pao_cost == cfg.budget_s);
    CHECK(!run.achieved_db.empty());
    CHECK(static_cast<long>(run.achieved_db.size()) <= cfg.direct_budget);
    if (run.crossing > 0) {
      REQUIRE(run.crossing <= static_cast<long>(run.achieved_db.size()));
      CHECK(run.achieved_db[run.crossing - 1] >= run.pao_final_db - 0.5);
      for (long i = 0; i + 1 < run.crossing; ++i)
        CHECK(run.achieved_db[i] < run.pao_final_db - 0.5);
    }
  }
}

TEST_CASE("held-out location study covers all thirty spots") {
  Harness h(tiny_cfg());
  std::vector<LooRow> rows = h.loo_study(2);
  REQUIRE(rows.size() == 30);
  for (int i = 0; i < 30; ++i) {
    CHECK(rows[i].location == i);
    CHECK(rows[i].tuned_rmse_m > 0.0);
    CHECK(rows[i].base_rmse_m > 0.0);
  }
}

TEST_CASE("per-beam power grids cover the codebook") {
  Harness h(tiny_cfg());
  Vec3 p0(4.5, 2.0, 0.9);
  std::vector<Vec3> pk = {Vec3(5.5, 1.2, 0.9)};
  Eigen::MatrixXd grid = h.power_grid(p0, pk);
  CHECK(grid.rows() == 3);
  CHECK(grid.cols() == 21);
  CHECK(grid.allFinite());
  Eigen::MatrixXd again = h.power_grid(p0, pk);
  CHECK(grid == again);
}

TEST_CASE("position-error consequences are tabulated per test sample") {
  ExperimentConfig cfg = tiny_cfg();
  cfg.test_n = 12;
  Harness h(cfg);
  std::vector<Harness::MismatchRow> rows = h.sinr_mismatch({3, 63});
  REQUIRE(rows.size() == 24);
  for (const auto& r : rows) {
    CHECK(r.pos_err_m >= 0.0);
    CHECK(r.sinr_err_db >= 0.0);
    CHECK(std::isfinite(r.sinr_err_db));
  }
}

TEST_CASE("trend checks accept compliant tables and reject broken ones") {
  std::vector<RmseRow> good = {{3, 1, 1.00}, {3, 2, 1.10},
                               {11, 1, 0.80}, {11, 2, 0.90},
                               {63, 1, 0.82}, {63, 2, 0.92}};
  CHECK_NOTHROW(check_rmse_trend(good, {3, 11, 63}, 0.05));

  std::vector<RmseRow> bad = {{3, 1, 1.00}, {11, 1, 1.20}, {63, 1, 0.5}};
  CHECK_THROWS_AS(check_rmse_trend(bad, {3, 11, 63}, 0.05), std::runtime_error);

  // slack boundary: a 4% bump passes, a 6% bump does not
  std::vector<RmseRow> close = {{3, 1, 1.00}, {11, 1, 1.04}};
  CHECK_NOTHROW(check_rmse_trend(close, {3, 11}, 0.05));
  std::vector<RmseRow> over = {{3, 1, 1.00}, {11, 1, 1.06}};
  CHECK_THROWS_AS(check_rmse_trend(over, {3, 11}, 0.05), std::runtime_error);

  std::vector<Harness::MismatchRow> rising;
  for (int i = 0; i < 16; ++i)
    rising.push_back({3, 0.1 * i, 0.2 * i});
  CHECK_NOTHROW(check_mismatch_trend(rising));

  std::vector<Harness::MismatchRow> falling;
  for (int i = 0; i < 16; ++i)
    falling.push_back({3, 0.1 * i, 2.0 - 0.1 * i});
  CHECK_THROWS_AS(check_mismatch_trend(falling), std::runtime_error);

  std::vector<Harness::MismatchRow> short_table(4, Harness::MismatchRow{3, 0.1, 0.1});
  CHECK_THROWS_AS(check_mismatch_trend(short_table), std::runtime_error);
}

TEST_CASE("report files are byte-stable and carry the documented headers") {
  std::vector<RmseRow> rows = {{3, 1, 0.5}, {63, 2, 0.25}};
  write_rmse_csv(rows, "t_rmse0.csv");
  write_rmse_csv(rows, "t_rmse1.csv");
  CHECK(slurp("t_rmse0.csv") == "s,seed,rmse_m\n3,1,0.5\n63,2,0.25\n");
  CHECK(slurp("t_rmse0.csv") == slurp("t_rmse1.csv"));
  std::remove("t_rmse0.csv");
  std::remove("t_rmse1.csv");

  std::vector<InterpRow> irows = {{3, 1, 12.5, 2.25}};
  write_interp_csv(irows, "t_interp.csv");
  CHECK(slurp("t_interp.csv") ==
        "s,seed,assisted_sinr_db,baseline_sinr_db\n3,1,12.5,2.25\n");
  std::remove("t_interp.csv");

  BudgetStudy study;
  study.pao.push_back({"pao-ga", 1, 11, 20.0});
  DirectRun run;
  run.method = "ga";
  run.seed = 1;
  run.pao_final_db = 20.0;
  run.pao_cost = 11;
  run.achieved_db = {15.0, 19.75};
  run.crossing = 2;
  study.direct.push_back(run);
  write_budget_csv(study, "t_budget.csv");
  CHECK(slurp("t_budget.csv") ==
        "method,seed,measurements,sinr_db\n"
        "pao-ga,1,11,20\n"
        "direct-ga,1,1,15\n"
        "direct-ga,1,2,19.75\n");
  write_budget_summary_csv(study, "t_budget_summary.csv");
  CHECK(slurp("t_budget_summary.csv") ==
        "method,seed,assisted_cost,assisted_sinr_db,direct_crossing,cost_ratio\n"
        "ga,1,11,20,2,0.181818181818\n");
  std::remove("t_budget.csv");
  std::remove("t_budget_summary.csv");

  std::vector<LooRow> lrows = {{0, 0.25, 0.5}};
  write_loo_csv(lrows, "t_loo.csv");
  CHECK(slurp("t_loo.csv") ==
        "location,tuned_rmse_m,pretrained_rmse_m\n0,0.25,0.5\n");
  std::remove("t_loo.csv");

  std::vector<Harness::MismatchRow> mrows = {{3, 0.5, 1.5}};
  write_mismatch_csv(mrows, "t_mis.csv");
  CHECK(slurp("t_mis.csv") == "s,pos_err_m,sinr_err_db\n3,0.5,1.5\n");
  std::remove("t_mis.csv");

  OptimizeResult res;
  res.trace = {{40, 10.0}, {78, 12.5}};
  write_trace_csv(res, "t_trace.csv");
  CHECK(slurp("t_trace.csv") ==
        "evaluations,best_sinr_db\n40,10\n78,12.5\n");
  std::remove("t_trace.csv");

  write_text_file("hello\n", "t_text.txt");
  CHECK(slurp("t_text.txt") == "hello\n");
  std::remove("t_text.txt");

  Codebook cb = default_codebook();
  Eigen::MatrixXd grid(3, 21);
  grid.setZero();
  write_grid_csv(cb, grid, "t_grid.csv");
  std::string g = slurp("t_grid.csv");
  CHECK(g.rfind("el_deg,-54,", 0) == 0);
  CHECK(std::count(g.begin(), g.end(), '\n') == 4);
  std::remove("t_grid.csv");

  CHECK_THROWS_AS(write_rmse_csv(rows, "no_such_dir/x.csv"), std::runtime_error);
}

TEST_CASE("config files override defaults and reject malformed input") {
  {
    std::ofstream out("t_cfg.json");
    out << "{\n"
           "  \"scenario\": \"bench\",\n"
           "  \"out\": \"results\",\n"
           "  \"twin_rho_jitter\": 0.1,\n"
           "  \"s_list\": [3, 11],\n"
           "  \"seeds\": [7, 8],\n"
           "  \"train_n\": 500,\n"
           "  \"epochs\": 20,\n"
           "  \"ga\": {\"population\": 24, \"mutation_std_deg\": 2.0},\n"
           "  \"gbo\": {\"starts\": 50, \"fd_step_deg\": 1.0},\n"
           "  \"budget_s\": 21\n"
           "}\n";
  }
  ExperimentConfig cfg = load_config("t_cfg.json");
  CHECK(cfg.scenario == "bench");
  CHECK(cfg.out_dir == "results");
  CHECK(cfg.twin_rho_jitter == 0.1);
  CHECK(cfg.s_list == std::vector<int>{3, 11});
  CHECK(cfg.seeds == std::vector<std::uint64_t>{7, 8});
  CHECK(cfg.train_n == 500);
  CHECK(cfg.pretrain.epochs == 20);
  CHECK(cfg.ga.population == 24);
  CHECK(cfg.ga.mutation_std == doctest::Approx(deg2rad(2.0)));
  CHECK(cfg.ga.kind == OptimizerConfig::Kind::ga);
  CHECK(cfg.gbo.starts == 50);
  CHECK(cfg.gbo.fd_step == doctest::Approx(deg2rad(1.0)));
  CHECK(cfg.gbo.kind == OptimizerConfig::Kind::gbo);
  CHECK(cfg.budget_s == 21);
  // untouched fields keep their defaults
  CHECK(cfg.test_n == 2000);
  CHECK(cfg.direct_budget == 2500);
  std::remove("t_cfg.json");

  {
    std::ofstream out("t_bad.json");
    out << "{ not json";
  }
  CHECK_THROWS_AS(load_config("t_bad.json"), std::runtime_error);
  std::remove("t_bad.json");

  {
    std::ofstream out("t_range.json");
    out << "{\"s_list\": [0]}";
  }
  CHECK_THROWS_AS(load_config("t_range.json"), std::runtime_error);
  std::remove("t_range.json");

  CHECK_THROWS_AS(load_config("t_missing.json"), std::runtime_error);
}

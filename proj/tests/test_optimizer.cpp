#include <cmath>
#include <stdexcept>

#include "doctest.h"
#include "twinbeam/codebook.hpp"
#include "twinbeam/optimizer.hpp"
#include "twinbeam/twin.hpp"

using namespace twinbeam;

namespace {

// Smooth concave bowl with a single peak; maximum value 10 dB at the peak.
Objective bowl(double az0_deg, double el0_deg) {
  double az0 = deg2rad(az0_deg), el0 = deg2rad(el0_deg);
  return [az0, el0](const Angles& t) {
    double da = t.az - az0, de = t.el - el0;
    return 10.0 - 40.0 * (da * da + de * de);
  };
}

OptimizerConfig base_cfg(OptimizerConfig::Kind kind, std::uint64_t seed) {
  OptimizerConfig cfg;
  cfg.kind = kind;
  cfg.seed = seed;
  return cfg;
}

}  // namespace

TEST_CASE("both optimizers find a smooth single peak") {
  for (double az0 : {-37.0, 12.5}) {
    double el0 = az0 / 2.0;
    Objective f = bowl(az0, el0);

    OptimizeResult ga = ga_optimize(f, base_cfg(OptimizerConfig::Kind::ga, 5));
    CHECK(std::abs(rad2deg(ga.theta.az) - az0) < 1.0);
    CHECK(std::abs(rad2deg(ga.theta.el) - el0) < 1.0);
    CHECK(ga.best_db == doctest::Approx(10.0).epsilon(1e-3));

    OptimizeResult gbo = gbo_optimize(f, base_cfg(OptimizerConfig::Kind::gbo, 6));
    CHECK(std::abs(rad2deg(gbo.theta.az) - az0) < 0.5);
    CHECK(std::abs(rad2deg(gbo.theta.el) - el0) < 0.5);
    CHECK(gbo.best_db == doctest::Approx(10.0).epsilon(1e-4));
  }
}

TEST_CASE("traces are cumulative and monotone") {
  Objective f = bowl(20.0, -10.0);
  for (auto kind : {OptimizerConfig::Kind::ga, OptimizerConfig::Kind::gbo}) {
    OptimizeResult res = kind == OptimizerConfig::Kind::ga
                             ? ga_optimize(f, base_cfg(kind, 7))
                             : gbo_optimize(f, base_cfg(kind, 7));
    REQUIRE(!res.trace.empty());
    for (std::size_t i = 1; i < res.trace.size(); ++i) {
      CHECK(res.trace[i].first > res.trace[i - 1].first);
      CHECK(res.trace[i].second >= res.trace[i - 1].second);
    }
    CHECK(res.trace.back().first == res.evaluations);
    CHECK(res.trace.back().second == res.best_db);
    CHECK(res.best_db == f(res.theta));
  }
}

TEST_CASE("optimizer runs are reproducible by seed") {
  Objective f = bowl(-5.0, 8.0);
  for (auto kind : {OptimizerConfig::Kind::ga, OptimizerConfig::Kind::gbo}) {
    auto run = [&](std::uint64_t seed) {
      OptimizerConfig cfg = base_cfg(kind, seed);
      return kind == OptimizerConfig::Kind::ga ? ga_optimize(f, cfg)
                                               : gbo_optimize(f, cfg);
    };
    OptimizeResult a = run(11), b = run(11), c = run(12);
    CHECK(a.theta.az == b.theta.az);
    CHECK(a.theta.el == b.theta.el);
    CHECK(a.best_db == b.best_db);
    CHECK(a.evaluations == b.evaluations);
    CHECK(a.trace == b.trace);
    bool differs = a.theta.az != c.theta.az || a.theta.el != c.theta.el ||
                   a.evaluations != c.evaluations;
    CHECK(differs);
  }
}

TEST_CASE("search respects the angle box") {
  // peak outside the box: best candidate must sit on the boundary region
  Objective f = bowl(80.0, 0.0);
  OptimizerConfig cfg = base_cfg(OptimizerConfig::Kind::gbo, 13);
  cfg.az_lo = deg2rad(-30.0);
  cfg.az_hi = deg2rad(30.0);
  cfg.el_lo = deg2rad(-20.0);
  cfg.el_hi = deg2rad(20.0);

  bool out_of_box = false;
  Objective guarded = [&](const Angles& t) {
    if (t.az < cfg.az_lo - 1e-12 || t.az > cfg.az_hi + 1e-12 ||
        t.el < cfg.el_lo - 1e-12 || t.el > cfg.el_hi + 1e-12)
      out_of_box = true;
    return f(t);
  };
  OptimizeResult gbo = gbo_optimize(guarded, cfg);
  CHECK_FALSE(out_of_box);
  CHECK(rad2deg(gbo.theta.az) == doctest::Approx(30.0).epsilon(1e-6));

  cfg.kind = OptimizerConfig::Kind::ga;
  OptimizeResult ga = ga_optimize(guarded, cfg);
  CHECK_FALSE(out_of_box);
  CHECK(rad2deg(ga.theta.az) > 29.0);
}

TEST_CASE("ascent bookkeeping matches the configured starts") {
  Objective f = bowl(0.0, 0.0);
  OptimizerConfig cfg = base_cfg(OptimizerConfig::Kind::gbo, 17);
  cfg.starts = 9;
  OptimizeResult res = gbo_optimize(f, cfg);
  CHECK(res.trace.size() == 9);

  cfg.starts = 1;
  res = gbo_optimize(f, cfg);
  CHECK(res.trace.size() == 1);
  CHECK(res.best_db == doctest::Approx(10.0).epsilon(1e-4));
}

TEST_CASE("generation count and population floor work at the minimum") {
  Objective f = bowl(3.0, -3.0);
  OptimizerConfig cfg = base_cfg(OptimizerConfig::Kind::ga, 19);
  cfg.generations = 1;
  cfg.population = 6;
  OptimizeResult res = ga_optimize(f, cfg);
  // one mark for the initial population, one for the single generation
  CHECK(res.trace.size() == 2);
  CHECK(res.evaluations >= 6);
  CHECK(std::isfinite(res.best_db));
}

TEST_CASE("evaluation budget cuts the search off") {
  Objective f = bowl(0.0, 0.0);
  for (auto kind : {OptimizerConfig::Kind::ga, OptimizerConfig::Kind::gbo}) {
    OptimizerConfig cfg = base_cfg(kind, 23);
    cfg.max_evals = 50;
    OptimizeResult res = kind == OptimizerConfig::Kind::ga ? ga_optimize(f, cfg)
                                                           : gbo_optimize(f, cfg);
    CHECK(res.evaluations <= 50);
    CHECK(std::isfinite(res.best_db));
  }
}

TEST_CASE("stagnation window stops a flat search early") {
  long calls = 0;
  Objective flat = [&](const Angles&) {
    ++calls;
    return 1.0;
  };
  OptimizerConfig cfg = base_cfg(OptimizerConfig::Kind::ga, 29);
  cfg.conv_window = 5;
  cfg.conv_improve_db = 0.01;
  OptimizeResult res = ga_optimize(flat, cfg);
  // 60 generations would run the full budget; the window cuts far earlier
  CHECK(res.trace.size() <= 7);
  CHECK(res.best_db == 1.0);

  calls = 0;
  cfg.kind = OptimizerConfig::Kind::gbo;
  OptimizeResult gres = gbo_optimize(flat, cfg);
  CHECK(gres.trace.size() <= 7);
}

TEST_CASE("dense reference scan hits the grid maximum exactly") {
  Objective f = bowl(18.0, -12.0);
  OptimizerConfig cfg;
  OptimizeResult res = exhaustive_search(f, cfg, 1.0);
  CHECK(res.evaluations == 181L * 181L);
  CHECK(rad2deg(res.theta.az) == doctest::Approx(18.0).epsilon(1e-9));
  CHECK(rad2deg(res.theta.el) == doctest::Approx(-12.0).epsilon(1e-9));
  CHECK(res.best_db == doctest::Approx(10.0).epsilon(1e-9));

  // coarser grid cannot beat the bowl peak but must stay within one cell
  res = exhaustive_search(f, cfg, 7.0);
  CHECK(std::abs(rad2deg(res.theta.az) - 18.0) <= 7.0);
}

TEST_CASE("closed loop plugs predictions into the twin") {
  Scene sc = make_default_scene();
  TwinEvaluator ev(sc);
  std::vector<Angles> beams = beam_subset(default_codebook(), 11);
  MeasurementVector mv = sweep(ev, beams);

  MlpModel model = make_localizer(sc, 11, 31);
  OptimizerConfig cfg;
  cfg.kind = OptimizerConfig::Kind::gbo;
  cfg.starts = 12;
  cfg.seed = 32;
  OptimizeResult res = twin_assisted_optimize(mv, model, sc, cfg);
  CHECK(res.positions_used.size() == 6);
  CHECK(std::isfinite(res.best_db));
  CHECK(res.evaluations > 0);

  // the reported positions are exactly the network output for this sweep
  Eigen::VectorXd pred = forward(model, mv.sinr_db);
  CHECK(res.positions_used == pred);

  // wrong sweep length for the model
  MeasurementVector bad = sweep(ev, beam_subset(default_codebook(), 5));
  CHECK_THROWS_AS(twin_assisted_optimize(bad, model, sc, cfg), std::invalid_argument);
}

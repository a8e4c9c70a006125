#pragma once

#include <functional>
#include <limits>
#include <utility>
#include <vector>

#include "twinbeam/measurement.hpp"
#include "twinbeam/mlp.hpp"

namespace twinbeam {

// Objective value in dB at scan angles; maximized.
using Objective = std::function<double(const Angles&)>;

struct OptimizerConfig {
  enum class Kind { ga, gbo };
  Kind kind = Kind::gbo;

  double az_lo = -kPi / 2, az_hi = kPi / 2;
  double el_lo = -kPi / 2, el_hi = kPi / 2;

  // Genetic search. Mutation width anneals linearly from mutation_std to
  // mutation_std_final across the generations; each generation replaces its
  // worst slots with `immigrants` fresh uniform draws to keep exploring.
  int population = 40;
  int generations = 60;
  int tournament = 3;
  int elitism = 2;
  double crossover_rate = 0.9;
  double blend_alpha = 0.5;
  double mutation_rate = 0.4;
  double mutation_std = deg2rad(10.0);
  double mutation_std_final = deg2rad(0.5);
  int immigrants = 4;

  // Multi-start gradient ascent.
  int starts = 100;
  int max_iters = 100;
  int ls_max_trials = 20;
  double fd_step = deg2rad(0.5);
  double ls_step = deg2rad(10.0);
  double ls_shrink = 0.5;
  double ascent_tol_db = 1e-4;
  double dedup_tol = deg2rad(1.0);

  // Shared. conv_window > 0 stops the search after that many consecutive
  // generations or ascent completions improving less than conv_improve_db.
  long max_evals = std::numeric_limits<long>::max();
  int conv_window = 0;
  double conv_improve_db = 0.01;
  std::uint64_t seed = 0;
};

struct OptimizeResult {
  Angles theta;
  double best_db = -std::numeric_limits<double>::infinity();
  // (cumulative objective evaluations, best value so far), appended once per
  // generation or ascent completion.
  std::vector<std::pair<long, double>> trace;
  long evaluations = 0;
  Eigen::VectorXd positions_used;  // filled by the closed loop
};

OptimizeResult ga_optimize(const Objective& objective, const OptimizerConfig& cfg);
OptimizeResult gbo_optimize(const Objective& objective, const OptimizerConfig& cfg);

// Dense reference scan of the whole box at fixed angular resolution.
OptimizeResult exhaustive_search(const Objective& objective, const OptimizerConfig& cfg,
                                 double step_deg);

// Full closed loop: predict positions from the measured sweep, place them in
// the twin, run the configured optimizer against twin SINR. The stagnation
// stop defaults on here (window 5) unless the config sets its own.
OptimizeResult twin_assisted_optimize(const MeasurementVector& mv, const MlpModel& model,
                                      const Scene& twin_template,
                                      const OptimizerConfig& cfg);

}  // namespace twinbeam

#pragma once

#include <map>
#include <string>
#include <vector>

#include "twinbeam/codebook.hpp"
#include "twinbeam/optimizer.hpp"

namespace twinbeam {

// The stand-in for the physical deployment: a perturbed copy of the twin
// plus measurement noise. Everything observable goes through the metered
// calls; probe_* is for reporting only and is never charged.
class GroundTruth {
public:
  GroundTruth(const Scene& scene, const NoiseModel& noise, std::uint64_t seed);

  // Charged: one measurement per swept beam.
  MeasurementVector sweep(const std::vector<Angles>& beams);
  // Charged: a single noisy SINR reading at one beam.
  double measure_sinr_db(const Angles& scan);
  // Not charged: exact SINR for result reporting.
  double probe_sinr_db(const Angles& scan) const;

  long measurements() const { return count_; }
  const Scene& scene() const { return ev_.scene(); }

private:
  TwinEvaluator ev_;
  NoiseModel noise_;
  Rng rng_;
  long count_ = 0;
};

struct ExperimentConfig {
  std::string scenario = "default";
  std::string scene_path;  // empty: built-in default scene
  std::string out_dir = "out";

  double twin_rho_jitter = 0.2;
  double meas_noise_db = 1.0;

  std::vector<int> s_list = {3, 5, 7, 11, 21, 63};
  std::vector<std::uint64_t> seeds = {1, 2, 3, 4, 5};
  int train_n = 10000;
  int test_n = 2000;
  std::uint64_t data_seed = 424242;

  TrainHyper pretrain;
  TrainHyper finetune = finetune_defaults();
  int frozen_layers = 2;

  OptimizerConfig ga;
  OptimizerConfig gbo;
  std::vector<int> gbo_starts_list = {25, 50, 75, 100};

  int budget_s = 11;          // sweep size charged to the assisted loop
  long direct_budget = 2500;  // real-measurement cap for the direct baseline
  int sweeps_per_position = 20;

  ExperimentConfig();
};

ExperimentConfig load_config(const std::string& path);

// Column subset of a full-codebook dataset matching beam_subset(s).
Dataset slice_dataset(const Dataset& full, int s);

// Linear-interpolation baseline: rebuild the whole grid from the measured
// subset (azimuth interpolation per elevation row; empty rows copy the
// nearest measured row) and return the grid entry with the largest
// interpolated SINR.
Angles interpolate_best_beam(const Codebook& cb, const std::vector<Angles>& beams,
                             const Eigen::VectorXd& sinr_db);

// Random transmitter placements drawn from the scene's region, re-aimed at
// the relay.
Scene with_transmitters(const Scene& scene, const Vec3& p0,
                        const std::vector<Vec3>& pk);
std::vector<Scene> random_scenes(const Scene& tmpl, int count, std::uint64_t seed);

struct RmseRow {
  int s;
  std::uint64_t seed;
  double rmse_m;
};

struct InterpRow {
  int s;
  std::uint64_t seed;
  double pao_db;
  double baseline_db;
};

struct DirectRun {
  std::string method;  // "ga" or "gbo"
  std::uint64_t seed;
  double pao_final_db = 0.0;  // matched assisted result on the same seed
  long pao_cost = 0;
  // Per real measurement: the true SINR of the beam the baseline would pick
  // after that many measurements.
  std::vector<double> achieved_db;
  long crossing = -1;  // first count within 0.5 dB of pao_final_db, -1 never
};

struct PaoPoint {
  std::string method;  // "pao-ga" or "pao-gbo-<starts>"
  std::uint64_t seed;
  long cost;  // real measurements consumed (the sweep)
  double final_db;
};

struct BudgetStudy {
  std::vector<PaoPoint> pao;
  std::vector<DirectRun> direct;
};

struct LooRow {
  int location;
  double tuned_rmse_m;
  double base_rmse_m;
};

class Harness {
public:
  explicit Harness(const ExperimentConfig& cfg);

  const ExperimentConfig& config() const { return cfg_; }
  const Scene& twin() const { return twin_; }
  const Codebook& codebook() const { return cb_; }

  // Same perturbed scene per seed; noise_stream varies the measurement noise
  // draws independently of the scene.
  GroundTruth make_ground_truth(std::uint64_t seed, std::uint64_t noise_stream = 0) const;
  const MlpModel& pretrained(int s);
  const Dataset& train63();
  const Dataset& test63();

  // Fresh models per (s, seed) over shared per-seed datasets.
  std::vector<RmseRow> rmse_vs_s();

  // Assisted loop vs interpolation baseline across S and seeds.
  std::vector<InterpRow> interpolation_benchmark();

  // Direct on-air optimization vs the assisted loop, per seed and method.
  BudgetStudy budget_study();

  // Leave-one-location-out fine-tuning on perturbed-twin measurement data.
  std::vector<LooRow> loo_study(std::uint64_t seed);

  // 3 x 21 per-beam received signal power (dBm) at given placements.
  Eigen::MatrixXd power_grid(const Vec3& p0, const std::vector<Vec3>& pk);

  struct MismatchRow {
    int s;
    double pos_err_m;
    double sinr_err_db;
  };
  // Per-sample position error vs SINR consequence on the test set.
  std::vector<MismatchRow> sinr_mismatch(const std::vector<int>& s_list);

private:
  ExperimentConfig cfg_;
  Scene twin_;
  Codebook cb_;
  std::map<int, MlpModel> models_;
  Dataset train63_, test63_;
  bool data_ready_ = false;
};

// Trend assertions on study results. Both throw std::runtime_error with a
// description of the violated step.
// Mean RMSE over seeds must not grow by more than slack (relative) from one
// S to the next in s_list order.
void check_rmse_trend(const std::vector<RmseRow>& rows, const std::vector<int>& s_list,
                      double slack);
// Mean SINR error per position-error quartile must be non-decreasing.
void check_mismatch_trend(const std::vector<Harness::MismatchRow>& rows);

// CSV writers for the row types above; all columns formatted with %.12g.
void write_rmse_csv(const std::vector<RmseRow>& rows, const std::string& path);
void write_interp_csv(const std::vector<InterpRow>& rows, const std::string& path);
void write_budget_csv(const BudgetStudy& study, const std::string& path);
void write_budget_summary_csv(const BudgetStudy& study, const std::string& path);
void write_loo_csv(const std::vector<LooRow>& rows, const std::string& path);
void write_mismatch_csv(const std::vector<Harness::MismatchRow>& rows,
                        const std::string& path);
void write_grid_csv(const Codebook& cb, const Eigen::MatrixXd& grid,
                    const std::string& path);
void write_trace_csv(const OptimizeResult& result, const std::string& path);
void write_text_file(const std::string& text, const std::string& path);

}  // namespace twinbeam

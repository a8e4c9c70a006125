#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "twinbeam/dataset.hpp"

namespace twinbeam {

struct MlpLayer {
  Eigen::MatrixXd w;
  Eigen::VectorXd b;
  bool relu = true;  // false on the linear output layer
};

// Fully connected net mapping a raw SINR-dB vector to positions in meters.
// Inputs are clipped to [in_lo, in_hi] dB and scaled to [-1, 1]; outputs are
// trained against coordinates scaled to [0, 1] by per-coordinate bounds.
struct MlpModel {
  std::vector<MlpLayer> layers;
  double in_lo = -40.0;
  double in_hi = 50.0;
  Eigen::VectorXd out_lo, out_hi;
  std::vector<bool> frozen;  // layers excluded from updates while training

  int input_dim() const { return static_cast<int>(layers.front().w.cols()); }
  int output_dim() const { return static_cast<int>(layers.back().w.rows()); }
};

struct TrainHyper {
  int epochs = 200;
  int batch = 64;
  double lr = 1e-3;
  std::uint64_t seed = 0;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double adam_eps = 1e-8;
  // Gaussian jitter (dB) added to each input sample fresh per use; mirrors
  // sweep measurement noise and regularizes against overfitting clean data.
  double aug_noise_db = 0.0;
};

inline TrainHyper finetune_defaults() {
  TrainHyper h;
  h.epochs = 30;
  h.lr = 1e-4;
  return h;
}

MlpModel make_mlp(int in_dim, int out_dim, const std::vector<int>& hidden,
                  const Eigen::VectorXd& out_lo, const Eigen::VectorXd& out_hi,
                  std::uint64_t seed);

// Standard localizer shape for a scene: in_dim -> 128 -> 128 -> 64 -> 3(K+1),
// output bounds set to the room box.
MlpModel make_localizer(const Scene& scene, int s, std::uint64_t seed);

// Normalization helpers. Column-per-sample layout throughout.
Eigen::MatrixXd normalize_input(const MlpModel& m, const Eigen::MatrixXd& x_cols);
Eigen::MatrixXd normalize_output(const MlpModel& m, const Eigen::MatrixXd& y_cols);
Eigen::MatrixXd denormalize_output(const MlpModel& m, const Eigen::MatrixXd& yn_cols);

Eigen::VectorXd forward(const MlpModel& m, const Eigen::VectorXd& sinr_db);
Eigen::MatrixXd forward_batch(const MlpModel& m, const Eigen::MatrixXd& x_cols);

// Loss gradient on normalized inputs/targets for one batch:
// L = mean over columns of |prediction - target|^2.
struct MlpGrads {
  std::vector<Eigen::MatrixXd> dw;
  std::vector<Eigen::VectorXd> db;
  Eigen::MatrixXd residual;  // prediction minus target, normalized scale
  double loss = 0.0;
};
MlpGrads backprop(const MlpModel& m, const Eigen::MatrixXd& xn,
                  const Eigen::MatrixXd& yn);

// Mini-batch Adam. Returns the running training loss per epoch in m^2.
// Throws std::runtime_error if the loss stops being finite. Layers flagged
// in model->frozen keep their weights.
std::vector<double> train(MlpModel* model, const Dataset& data, const TrainHyper& hyper);

// Freezes the first frozen_layers layers, then trains. frozen_layers == 0 is
// plain training; freezing every layer is an error.
std::vector<double> fine_tune(MlpModel* model, const Dataset& data, int frozen_layers,
                              const TrainHyper& hyper);

// Mean squared full-vector position error in m^2 / its square root in m.
double loss_mse(const MlpModel& m, const Dataset& data);
double evaluate_rmse(const MlpModel& m, const Dataset& data);

// Hold out one location group at a time: fine-tune on the rest, evaluate on
// the held-out group. Also reports the untouched base model's RMSE per fold.
struct LooResult {
  std::vector<double> rmse;
  std::vector<double> base_rmse;
  double mean = 0.0;
};
LooResult leave_one_location_out(const MlpModel& base, const Dataset& data,
                                 int frozen_layers, const TrainHyper& hyper);

void save_model(const MlpModel& m, const std::string& path);
MlpModel load_model(const std::string& path);

}  // namespace twinbeam

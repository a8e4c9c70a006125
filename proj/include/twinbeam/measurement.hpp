#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "twinbeam/rng.hpp"
#include "twinbeam/twin.hpp"

namespace twinbeam {

// One sweep: per-beam signal and interference-plus-noise powers in watts
// and the SINR derived from the stored powers.
struct MeasurementVector {
  std::vector<Angles> beams;
  Eigen::VectorXd sinr_db;
  Eigen::VectorXd p_signal_w;
  Eigen::VectorXd p_noise_interf_w;
};

// Gaussian perturbation applied independently to each logged power, in dB.
struct NoiseModel {
  double sigma_db = 0.0;
};

// Measure every beam at the scene's true transmitter positions. The rng is
// consumed only when the noise model is active (two draws per beam, signal
// then interference).
MeasurementVector sweep(const TwinEvaluator& ev, const std::vector<Angles>& beams,
                        const NoiseModel& noise = {}, Rng* rng = nullptr);
MeasurementVector sweep(const Scene& scene, const std::vector<Angles>& beams,
                        const NoiseModel& noise = {}, Rng* rng = nullptr);

std::string measurement_csv(const MeasurementVector& mv, const std::string& scene_id);

// Relay operating mode. Sweeps are only allowed in measurement mode; the
// applied beam survives mode changes.
class RelayController {
public:
  enum class Mode { measurement, communication };

  explicit RelayController(const Scene& scene) : ev_(scene) {}

  Mode mode() const { return mode_; }
  Mode mode_switch();  // toggles and returns the new mode
  void set_mode(Mode m) { mode_ = m; }

  void apply_beam(const Angles& scan) { applied_ = scan; }
  const Angles& applied_beam() const { return applied_; }

  // Throws std::logic_error when called in communication mode.
  MeasurementVector sweep(const std::vector<Angles>& beams,
                          const NoiseModel& noise = {}, Rng* rng = nullptr);

private:
  TwinEvaluator ev_;
  Mode mode_ = Mode::measurement;
  Angles applied_{};
};

}  // namespace twinbeam

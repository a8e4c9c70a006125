#include "twinbeam/measurement.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace twinbeam {

namespace {

constexpr double kPowerFloorW = 1e-30;

double apply_db_noise(double watts, double sigma_db, Rng* rng) {
  double w = watts < kPowerFloorW ? kPowerFloorW : watts;
  if (sigma_db <= 0.0 || rng == nullptr) return w;
  double db = 10.0 * std::log10(w) + rng->normal(0.0, sigma_db);
  return std::pow(10.0, db / 10.0);
}

}  // namespace

MeasurementVector sweep(const TwinEvaluator& ev, const std::vector<Angles>& beams,
                        const NoiseModel& noise, Rng* rng) {
  if (beams.empty()) throw std::invalid_argument("sweep: no beams");
  MeasurementVector mv;
  mv.beams = beams;
  int s = static_cast<int>(beams.size());
  mv.sinr_db.resize(s);
  mv.p_signal_w.resize(s);
  mv.p_noise_interf_w.resize(s);
  for (int i = 0; i < s; ++i) {
    double ps = apply_db_noise(ev.signal_power(beams[i]), noise.sigma_db, rng);
    double pn = apply_db_noise(ev.interference_power(beams[i]), noise.sigma_db, rng);
    mv.p_signal_w[i] = ps;
    mv.p_noise_interf_w[i] = pn;
    mv.sinr_db[i] = 10.0 * std::log10(ps / pn);
  }
  return mv;
}

MeasurementVector sweep(const Scene& scene, const std::vector<Angles>& beams,
                        const NoiseModel& noise, Rng* rng) {
  TwinEvaluator ev(scene);
  return sweep(ev, beams, noise, rng);
}

std::string measurement_csv(const MeasurementVector& mv, const std::string& scene_id) {
  std::string out = "scene,beam,az_deg,el_deg,p_signal_dbm,p_noise_interf_dbm,sinr_db\n";
  char line[256];
  for (int i = 0; i < mv.sinr_db.size(); ++i) {
    double ps_dbm = 10.0 * std::log10(mv.p_signal_w[i]) + 30.0;
    double pn_dbm = 10.0 * std::log10(mv.p_noise_interf_w[i]) + 30.0;
    std::snprintf(line, sizeof line, "%s,%d,%.12g,%.12g,%.12g,%.12g,%.12g\n",
                  scene_id.c_str(), i, rad2deg(mv.beams[i].az),
                  rad2deg(mv.beams[i].el), ps_dbm, pn_dbm, mv.sinr_db[i]);
    out += line;
  }
  return out;
}

RelayController::Mode RelayController::mode_switch() {
  mode_ = mode_ == Mode::measurement ? Mode::communication : Mode::measurement;
  return mode_;
}

MeasurementVector RelayController::sweep(const std::vector<Angles>& beams,
                                         const NoiseModel& noise, Rng* rng) {
  if (mode_ != Mode::measurement)
    throw std::logic_error("sweep requested while relaying in communication mode");
  return twinbeam::sweep(ev_, beams, noise, rng);
}

}  // namespace twinbeam

#include "twinbeam/harness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

#include "json.hpp"

namespace twinbeam {

GroundTruth::GroundTruth(const Scene& scene, const NoiseModel& noise, std::uint64_t seed)
    : ev_(scene), noise_(noise), rng_(seed) {}

MeasurementVector GroundTruth::sweep(const std::vector<Angles>& beams) {
  count_ += static_cast<long>(beams.size());
  return twinbeam::sweep(ev_, beams, noise_, &rng_);
}

double GroundTruth::measure_sinr_db(const Angles& scan) {
  ++count_;
  MeasurementVector mv =
      twinbeam::sweep(ev_, std::vector<Angles>{scan}, noise_, &rng_);
  return mv.sinr_db[0];
}

double GroundTruth::probe_sinr_db(const Angles& scan) const {
  return ev_.sinr_db(scan);
}

ExperimentConfig::ExperimentConfig() {
  ga.kind = OptimizerConfig::Kind::ga;
  gbo.kind = OptimizerConfig::Kind::gbo;
  pretrain.aug_noise_db = meas_noise_db;
}

namespace {

using nlohmann::json;

template <typename T>
void read_if(const json& j, const char* key, T* out) {
  if (j.contains(key)) *out = j.at(key).get<T>();
}

void read_optimizer(const json& j, const char* key, OptimizerConfig* oc) {
  if (!j.contains(key)) return;
  const json& o = j.at(key);
  read_if(o, "population", &oc->population);
  read_if(o, "generations", &oc->generations);
  read_if(o, "tournament", &oc->tournament);
  read_if(o, "elitism", &oc->elitism);
  read_if(o, "crossover_rate", &oc->crossover_rate);
  read_if(o, "blend_alpha", &oc->blend_alpha);
  read_if(o, "mutation_rate", &oc->mutation_rate);
  read_if(o, "immigrants", &oc->immigrants);
  read_if(o, "starts", &oc->starts);
  read_if(o, "max_iters", &oc->max_iters);
  read_if(o, "conv_window", &oc->conv_window);
  read_if(o, "conv_improve_db", &oc->conv_improve_db);
  if (o.contains("mutation_std_deg")) oc->mutation_std = deg2rad(o.at("mutation_std_deg").get<double>());
  if (o.contains("mutation_std_final_deg"))
    oc->mutation_std_final = deg2rad(o.at("mutation_std_final_deg").get<double>());
  if (o.contains("fd_step_deg")) oc->fd_step = deg2rad(o.at("fd_step_deg").get<double>());
  if (o.contains("ls_step_deg")) oc->ls_step = deg2rad(o.at("ls_step_deg").get<double>());
}

FILE* open_out(const std::string& path) {
  FILE* f = std::fopen(path.c_str(), "wb");
  if (!f) throw std::runtime_error("cannot write " + path);
  return f;
}

}  // namespace

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read config " + path);
  json j;
  try {
    in >> j;
  } catch (const std::exception& e) {
    throw std::runtime_error("config parse error in " + path + ": " + e.what());
  }
  ExperimentConfig cfg;
  read_if(j, "scenario", &cfg.scenario);
  read_if(j, "scene", &cfg.scene_path);
  read_if(j, "out", &cfg.out_dir);
  read_if(j, "twin_rho_jitter", &cfg.twin_rho_jitter);
  read_if(j, "meas_noise_db", &cfg.meas_noise_db);
  read_if(j, "s_list", &cfg.s_list);
  read_if(j, "seeds", &cfg.seeds);
  read_if(j, "train_n", &cfg.train_n);
  read_if(j, "test_n", &cfg.test_n);
  read_if(j, "data_seed", &cfg.data_seed);
  read_if(j, "epochs", &cfg.pretrain.epochs);
  read_if(j, "batch", &cfg.pretrain.batch);
  read_if(j, "lr", &cfg.pretrain.lr);
  read_if(j, "aug_noise_db", &cfg.pretrain.aug_noise_db);
  read_if(j, "ft_epochs", &cfg.finetune.epochs);
  read_if(j, "ft_lr", &cfg.finetune.lr);
  read_if(j, "frozen_layers", &cfg.frozen_layers);
  read_optimizer(j, "ga", &cfg.ga);
  read_optimizer(j, "gbo", &cfg.gbo);
  read_if(j, "gbo_starts_list", &cfg.gbo_starts_list);
  read_if(j, "budget_s", &cfg.budget_s);
  read_if(j, "direct_budget", &cfg.direct_budget);
  read_if(j, "sweeps_per_position", &cfg.sweeps_per_position);
  cfg.ga.kind = OptimizerConfig::Kind::ga;
  cfg.gbo.kind = OptimizerConfig::Kind::gbo;
  for (int s : cfg.s_list)
    if (s < 1 || s > 63) throw std::runtime_error("config s_list entry out of 1..63");
  return cfg;
}

Dataset slice_dataset(const Dataset& full, int s) {
  Codebook cb = default_codebook();
  std::vector<Angles> want = beam_subset(cb, s);
  std::vector<Angles> have = beam_subset(cb, full.s);
  std::vector<int> cols;
  for (const Angles& w : want) {
    int at = -1;
    for (int j = 0; j < static_cast<int>(have.size()); ++j)
      if (have[j].az == w.az && have[j].el == w.el) {
        at = j;
        break;
      }
    if (at < 0) throw std::invalid_argument("slice_dataset: target beams not nested in source");
    cols.push_back(at);
  }
  Dataset out = full;
  out.s = s;
  out.x.resize(full.n(), s);
  for (int c = 0; c < s; ++c) out.x.col(c) = full.x.col(cols[c]);
  return out;
}

Angles interpolate_best_beam(const Codebook& cb, const std::vector<Angles>& beams,
                             const Eigen::VectorXd& sinr_db) {
  if (beams.empty() || static_cast<int>(beams.size()) != sinr_db.size())
    throw std::invalid_argument("interpolate_best_beam: beams/values mismatch");
  int m = cb.m(), n = cb.n_az();
  std::vector<std::vector<std::pair<double, double>>> knots(m);
  for (std::size_t i = 0; i < beams.size(); ++i) {
    int row = -1;
    for (int r = 0; r < m; ++r)
      if (beams[i].el == cb.elevations[r]) {
        row = r;
        break;
      }
    if (row < 0)
      throw std::invalid_argument("interpolate_best_beam: beam elevation off the grid");
    knots[row].push_back({beams[i].az, sinr_db[i]});
  }
  for (auto& k : knots) std::sort(k.begin(), k.end());

  // Rows without any measurement borrow the nearest measured row.
  std::vector<int> src(m, -1);
  for (int r = 0; r < m; ++r) {
    if (!knots[r].empty()) {
      src[r] = r;
      continue;
    }
    double best = 0;
    for (int q = 0; q < m; ++q) {
      if (knots[q].empty()) continue;
      double d = std::abs(cb.elevations[q] - cb.elevations[r]);
      if (src[r] < 0 || d < best) {
        src[r] = q;
        best = d;
      }
    }
  }

  int best_idx = -1;
  double best_v = 0;
  for (int r = 0; r < m; ++r) {
    const auto& kn = knots[src[r]];
    for (int c = 0; c < n; ++c) {
      double az = cb.azimuths[c];
      double v;
      if (az <= kn.front().first) {
        v = kn.front().second;
      } else if (az >= kn.back().first) {
        v = kn.back().second;
      } else {
        std::size_t j = 1;
        while (kn[j].first < az) ++j;
        double t = (az - kn[j - 1].first) / (kn[j].first - kn[j - 1].first);
        v = kn[j - 1].second + t * (kn[j].second - kn[j - 1].second);
      }
      if (best_idx < 0 || v > best_v) {
        best_idx = r * n + c;
        best_v = v;
      }
    }
  }
  return cb.entries[best_idx];
}

Scene with_transmitters(const Scene& scene, const Vec3& p0,
                        const std::vector<Vec3>& pk) {
  if (pk.size() != scene.interferers.size())
    throw std::invalid_argument("with_transmitters: interferer count mismatch");
  Scene out = scene;
  Vec3 rx = out.relay_rx.position;
  out.sta.position = p0;
  out.sta.boresight = (rx - p0).normalized();
  for (std::size_t k = 0; k < pk.size(); ++k) {
    out.interferers[k].position = pk[k];
    out.interferers[k].boresight = (rx - pk[k]).normalized();
  }
  return out;
}

std::vector<Scene> random_scenes(const Scene& tmpl, int count, std::uint64_t seed) {
  Rng rng(Rng::mix(seed, 0x5ce));
  std::vector<Scene> out;
  for (int i = 0; i < count; ++i) {
    auto draw = [&](void) -> Vec3 {
      Vec3 p;
      for (int a = 0; a < 3; ++a) {
        double lo = tmpl.tx_region_lo[a], hi = tmpl.tx_region_hi[a];
        p[a] = hi > lo ? rng.uniform(lo, hi) : lo;
      }
      return p;
    };
    Vec3 p0 = draw();
    std::vector<Vec3> pk;
    for (std::size_t k = 0; k < tmpl.interferers.size(); ++k) pk.push_back(draw());
    out.push_back(with_transmitters(tmpl, p0, pk));
  }
  return out;
}

Harness::Harness(const ExperimentConfig& cfg)
    : cfg_(cfg),
      twin_(cfg.scene_path.empty() ? make_default_scene() : load_scene(cfg.scene_path)),
      cb_(default_codebook()) {}

GroundTruth Harness::make_ground_truth(std::uint64_t seed,
                                       std::uint64_t noise_stream) const {
  Scene gt = perturb_materials(twin_, cfg_.twin_rho_jitter, Rng::mix(seed, 71));
  NoiseModel nm;
  nm.sigma_db = cfg_.meas_noise_db;
  return GroundTruth(gt, nm, Rng::mix(seed, 72 + noise_stream));
}

const Dataset& Harness::train63() {
  if (!data_ready_) {
    train63_ = gen_dataset(twin_, cfg_.train_n, 63, Rng::mix(cfg_.data_seed, 11));
    test63_ = gen_dataset(twin_, cfg_.test_n, 63, Rng::mix(cfg_.data_seed, 22));
    data_ready_ = true;
  }
  return train63_;
}

const Dataset& Harness::test63() {
  train63();
  return test63_;
}

const MlpModel& Harness::pretrained(int s) {
  auto it = models_.find(s);
  if (it != models_.end()) return it->second;
  Dataset tr = slice_dataset(train63(), s);
  MlpModel model = make_localizer(twin_, s, Rng::mix(cfg_.data_seed, 9000 + s));
  TrainHyper hyper = cfg_.pretrain;
  hyper.seed = Rng::mix(cfg_.data_seed, 9100 + s);
  train(&model, tr, hyper);
  return models_.emplace(s, std::move(model)).first->second;
}

std::vector<RmseRow> Harness::rmse_vs_s() {
  std::vector<RmseRow> rows;
  for (std::uint64_t seed : cfg_.seeds) {
    Dataset tr63 = gen_dataset(twin_, cfg_.train_n, 63, Rng::mix(seed, 101));
    Dataset te63 = gen_dataset(twin_, cfg_.test_n, 63, Rng::mix(seed, 202));
    for (int s : cfg_.s_list) {
      Dataset tr = slice_dataset(tr63, s);
      Dataset te = slice_dataset(te63, s);
      MlpModel model = make_localizer(twin_, s, Rng::mix(seed, 300 + s));
      TrainHyper hyper = cfg_.pretrain;
      hyper.seed = Rng::mix(seed, 400 + s);
      train(&model, tr, hyper);
      rows.push_back({s, seed, evaluate_rmse(model, te)});
    }
  }
  return rows;
}

// Sparse-sweep study in the measured-campaign regime: the user stands on one
// held-out survey spot, the interferer stays parked, and each per-S localizer
// is fine-tuned on sweeps from the remaining spots before closing the loop.
std::vector<InterpRow> Harness::interpolation_benchmark() {
  std::vector<InterpRow> rows;
  for (int s : cfg_.s_list) pretrained(s);  // deterministic cache order
  std::vector<Vec3> spots = default_measurement_positions();
  for (std::uint64_t seed : cfg_.seeds) {
    int hold = static_cast<int>((seed * 7) % spots.size());
    std::vector<Vec3> rest;
    for (int i = 0; i < static_cast<int>(spots.size()); ++i)
      if (i != hold) rest.push_back(spots[i]);
    Scene world =
        with_transmitters(twin_, spots[hold], {twin_.interferers[0].position});
    for (int s : cfg_.s_list) {
      GroundTruth gt(world, NoiseModel{cfg_.meas_noise_db}, Rng::mix(seed, 100 + s));
      std::vector<Angles> beams = beam_subset(cb_, s);
      MeasurementVector mv = gt.sweep(beams);
      Dataset camp = gen_location_dataset(twin_, rest, cfg_.sweeps_per_position, s,
                                          cfg_.meas_noise_db, Rng::mix(seed, 73));
      MlpModel tuned = pretrained(s);
      TrainHyper ft = cfg_.finetune;
      ft.seed = Rng::mix(seed, 74);
      fine_tune(&tuned, camp, cfg_.frozen_layers, ft);
      OptimizerConfig oc = cfg_.gbo;
      oc.seed = Rng::mix(seed, 500 + s);
      OptimizeResult r = twin_assisted_optimize(mv, tuned, twin_, oc);
      double pao = gt.probe_sinr_db(r.theta);
      Angles pick = interpolate_best_beam(cb_, beams, mv.sinr_db);
      double base = gt.probe_sinr_db(pick);
      rows.push_back({s, seed, pao, base});
    }
  }
  return rows;
}

BudgetStudy Harness::budget_study() {
  BudgetStudy study;
  int s = cfg_.budget_s;
  std::vector<Angles> beams = beam_subset(cb_, s);
  const MlpModel& model = pretrained(s);

  for (std::uint64_t seed : cfg_.seeds) {
    for (int mi = 0; mi < 2; ++mi) {
      const bool is_ga = mi == 0;
      const std::string name = is_ga ? "ga" : "gbo";

      GroundTruth gta = make_ground_truth(seed, 1000 + mi);
      MeasurementVector mv = gta.sweep(beams);
      OptimizerConfig oc = is_ga ? cfg_.ga : cfg_.gbo;
      oc.seed = Rng::mix(seed, 700 + mi);
      OptimizeResult r = twin_assisted_optimize(mv, model, twin_, oc);
      double pao_db = gta.probe_sinr_db(r.theta);
      long pao_cost = gta.measurements();
      study.pao.push_back({"pao-" + name, seed, pao_cost, pao_db});

      if (!is_ga) {
        // Multi-start depth series; same seed so start points are nested.
        for (int d : cfg_.gbo_starts_list) {
          if (d == oc.starts) continue;
          OptimizerConfig od = oc;
          od.starts = d;
          OptimizeResult rd = twin_assisted_optimize(mv, model, twin_, od);
          study.pao.push_back({"pao-gbo-" + std::to_string(d), seed, pao_cost,
                               gta.probe_sinr_db(rd.theta)});
        }
      }

      GroundTruth gtd = make_ground_truth(seed, 2000 + mi);
      std::vector<double> noisy, truth;
      Objective obj = [&](const Angles& a) {
        double v = gtd.measure_sinr_db(a);
        noisy.push_back(v);
        truth.push_back(gtd.probe_sinr_db(a));
        return v;
      };
      OptimizerConfig od = is_ga ? cfg_.ga : cfg_.gbo;
      od.seed = Rng::mix(seed, 800 + mi);
      od.max_evals = cfg_.direct_budget;
      if (is_ga)
        ga_optimize(obj, od);
      else
        gbo_optimize(obj, od);

      DirectRun run;
      run.method = name;
      run.seed = seed;
      run.pao_final_db = pao_db;
      run.pao_cost = pao_cost;
      double best_noisy = -1e300, current_true = -1e300;
      for (std::size_t i = 0; i < noisy.size(); ++i) {
        if (noisy[i] > best_noisy) {
          best_noisy = noisy[i];
          current_true = truth[i];
        }
        run.achieved_db.push_back(current_true);
        if (run.crossing < 0 && current_true >= pao_db - 0.5)
          run.crossing = static_cast<long>(i) + 1;
      }
      study.direct.push_back(std::move(run));
    }
  }
  return study;
}

std::vector<LooRow> Harness::loo_study(std::uint64_t seed) {
  int s = cfg_.budget_s;
  const MlpModel& base = pretrained(s);
  Scene gt_scene = perturb_materials(twin_, cfg_.twin_rho_jitter, Rng::mix(seed, 71));
  Dataset data =
      gen_location_dataset(gt_scene, default_measurement_positions(),
                           cfg_.sweeps_per_position, s, cfg_.meas_noise_db,
                           Rng::mix(seed, 73));
  TrainHyper hyper = cfg_.finetune;
  hyper.seed = Rng::mix(seed, 74);
  LooResult res = leave_one_location_out(base, data, cfg_.frozen_layers, hyper);
  std::vector<LooRow> rows;
  for (std::size_t i = 0; i < res.rmse.size(); ++i)
    rows.push_back({static_cast<int>(i), res.rmse[i], res.base_rmse[i]});
  return rows;
}

Eigen::MatrixXd Harness::power_grid(const Vec3& p0, const std::vector<Vec3>& pk) {
  TwinEvaluator ev(twin_);
  ev.place_transmitters(p0, pk);
  Eigen::MatrixXd g(cb_.m(), cb_.n_az());
  for (int r = 0; r < cb_.m(); ++r)
    for (int c = 0; c < cb_.n_az(); ++c) {
      double w = ev.signal_power(cb_.entries[r * cb_.n_az() + c]);
      g(r, c) = 10.0 * std::log10(std::max(w, 1e-30)) + 30.0;
    }
  return g;
}

std::vector<Harness::MismatchRow> Harness::sinr_mismatch(const std::vector<int>& s_list) {
  std::vector<MismatchRow> rows;
  for (int s : s_list) {
    const MlpModel& model = pretrained(s);
    Dataset te = slice_dataset(test63(), s);
    TwinEvaluator ev(twin_);
    int kk = te.k;
    for (int i = 0; i < te.n(); ++i) {
      Eigen::VectorXd p = forward(model, te.x.row(i).transpose());
      Eigen::VectorXd pt = te.y.row(i).transpose();
      double pos_err = (p - pt).norm();

      Vec3 p0(p[0], p[1], p[2]);
      std::vector<Vec3> pk;
      for (int k = 0; k < kk; ++k)
        pk.push_back(Vec3(p[3 * (k + 1)], p[3 * (k + 1) + 1], p[3 * (k + 1) + 2]));
      ev.place_transmitters(p0, pk);
      OptimizerConfig oc = cfg_.gbo;
      oc.starts = 8;
      oc.conv_window = 5;
      oc.seed = Rng::mix(cfg_.data_seed, 7000 + i);
      OptimizeResult r =
          gbo_optimize([&](const Angles& a) { return ev.sinr_db(a); }, oc);
      double db_pred = ev.sinr_db(r.theta);

      Vec3 t0(pt[0], pt[1], pt[2]);
      std::vector<Vec3> tk;
      for (int k = 0; k < kk; ++k)
        tk.push_back(Vec3(pt[3 * (k + 1)], pt[3 * (k + 1) + 1], pt[3 * (k + 1) + 2]));
      ev.place_transmitters(t0, tk);
      double db_true = ev.sinr_db(r.theta);

      rows.push_back({s, pos_err, std::abs(db_pred - db_true)});
    }
  }
  return rows;
}

void check_rmse_trend(const std::vector<RmseRow>& rows, const std::vector<int>& s_list,
                      double slack) {
  std::vector<double> mean(s_list.size(), 0.0);
  std::vector<int> count(s_list.size(), 0);
  for (const auto& r : rows)
    for (std::size_t i = 0; i < s_list.size(); ++i)
      if (s_list[i] == r.s) {
        mean[i] += r.rmse_m;
        ++count[i];
      }
  for (std::size_t i = 0; i < s_list.size(); ++i) {
    if (!count[i]) throw std::runtime_error("check_rmse_trend: missing S value");
    mean[i] /= count[i];
  }
  for (std::size_t i = 1; i < mean.size(); ++i) {
    if (mean[i] > mean[i - 1] * (1.0 + slack)) {
      char msg[160];
      std::snprintf(msg, sizeof msg,
                    "rmse trend violated: S=%d mean %.4g m vs S=%d mean %.4g m",
                    s_list[i], mean[i], s_list[i - 1], mean[i - 1]);
      throw std::runtime_error(msg);
    }
  }
}

void check_mismatch_trend(const std::vector<Harness::MismatchRow>& rows) {
  if (rows.size() < 8) throw std::runtime_error("check_mismatch_trend: too few rows");
  std::vector<double> errs;
  for (const auto& r : rows) errs.push_back(r.pos_err_m);
  std::sort(errs.begin(), errs.end());
  std::size_t n = errs.size();
  double q1 = errs[n / 4], q2 = errs[n / 2], q3 = errs[3 * n / 4];
  double sum[4] = {0, 0, 0, 0};
  long cnt[4] = {0, 0, 0, 0};
  for (const auto& r : rows) {
    int b = r.pos_err_m <= q1 ? 0 : r.pos_err_m <= q2 ? 1 : r.pos_err_m <= q3 ? 2 : 3;
    sum[b] += r.sinr_err_db;
    ++cnt[b];
  }
  double prev = -1e300;
  for (int b = 0; b < 4; ++b) {
    if (!cnt[b]) continue;
    double m = sum[b] / cnt[b];
    if (m + 1e-12 < prev)
      throw std::runtime_error("sinr mismatch means not monotone across position-error bins");
    prev = m;
  }
}

void write_rmse_csv(const std::vector<RmseRow>& rows, const std::string& path) {
  FILE* f = open_out(path);
  std::fprintf(f, "s,seed,rmse_m\n");
  for (const auto& r : rows)
    std::fprintf(f, "%d,%llu,%.12g\n", r.s, static_cast<unsigned long long>(r.seed),
                 r.rmse_m);
  std::fclose(f);
}

void write_interp_csv(const std::vector<InterpRow>& rows, const std::string& path) {
  FILE* f = open_out(path);
  std::fprintf(f, "s,seed,assisted_sinr_db,baseline_sinr_db\n");
  for (const auto& r : rows)
    std::fprintf(f, "%d,%llu,%.12g,%.12g\n", r.s,
                 static_cast<unsigned long long>(r.seed), r.pao_db, r.baseline_db);
  std::fclose(f);
}

void write_budget_csv(const BudgetStudy& study, const std::string& path) {
  FILE* f = open_out(path);
  std::fprintf(f, "method,seed,measurements,sinr_db\n");
  for (const auto& p : study.pao)
    std::fprintf(f, "%s,%llu,%ld,%.12g\n", p.method.c_str(),
                 static_cast<unsigned long long>(p.seed), p.cost, p.final_db);
  for (const auto& run : study.direct)
    for (std::size_t i = 0; i < run.achieved_db.size(); ++i)
      std::fprintf(f, "direct-%s,%llu,%zu,%.12g\n", run.method.c_str(),
                   static_cast<unsigned long long>(run.seed), i + 1,
                   run.achieved_db[i]);
  std::fclose(f);
}

void write_budget_summary_csv(const BudgetStudy& study, const std::string& path) {
  FILE* f = open_out(path);
  std::fprintf(f, "method,seed,assisted_cost,assisted_sinr_db,direct_crossing,cost_ratio\n");
  for (const auto& run : study.direct) {
    double ratio = run.crossing > 0
                       ? static_cast<double>(run.crossing) / run.pao_cost
                       : -1.0;
    std::fprintf(f, "%s,%llu,%ld,%.12g,%ld,%.12g\n", run.method.c_str(),
                 static_cast<unsigned long long>(run.seed), run.pao_cost,
                 run.pao_final_db, run.crossing, ratio);
  }
  std::fclose(f);
}

void write_loo_csv(const std::vector<LooRow>& rows, const std::string& path) {
  FILE* f = open_out(path);
  std::fprintf(f, "location,tuned_rmse_m,pretrained_rmse_m\n");
  for (const auto& r : rows)
    std::fprintf(f, "%d,%.12g,%.12g\n", r.location, r.tuned_rmse_m, r.base_rmse_m);
  std::fclose(f);
}

void write_mismatch_csv(const std::vector<Harness::MismatchRow>& rows,
                        const std::string& path) {
  FILE* f = open_out(path);
  std::fprintf(f, "s,pos_err_m,sinr_err_db\n");
  for (const auto& r : rows)
    std::fprintf(f, "%d,%.12g,%.12g\n", r.s, r.pos_err_m, r.sinr_err_db);
  std::fclose(f);
}

void write_grid_csv(const Codebook& cb, const Eigen::MatrixXd& grid,
                    const std::string& path) {
  if (grid.rows() != cb.m() || grid.cols() != cb.n_az())
    throw std::invalid_argument("write_grid_csv: grid shape mismatch");
  FILE* f = open_out(path);
  std::fprintf(f, "el_deg");
  for (int c = 0; c < cb.n_az(); ++c)
    std::fprintf(f, ",%.12g", rad2deg(cb.azimuths[c]));
  std::fprintf(f, "\n");
  for (int r = 0; r < cb.m(); ++r) {
    std::fprintf(f, "%.12g", rad2deg(cb.elevations[r]));
    for (int c = 0; c < cb.n_az(); ++c) std::fprintf(f, ",%.12g", grid(r, c));
    std::fprintf(f, "\n");
  }
  std::fclose(f);
}

void write_trace_csv(const OptimizeResult& result, const std::string& path) {
  FILE* f = open_out(path);
  std::fprintf(f, "evaluations,best_sinr_db\n");
  for (const auto& [evals, best] : result.trace)
    std::fprintf(f, "%ld,%.12g\n", evals, best);
  std::fclose(f);
}

void write_text_file(const std::string& text, const std::string& path) {
  FILE* f = open_out(path);
  std::fwrite(text.data(), 1, text.size(), f);
  std::fclose(f);
}

}  // namespace twinbeam

#include <algorithm>
#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "twinbeam/harness.hpp"
#include "twinbeam/svg.hpp"

namespace fs = std::filesystem;
using namespace twinbeam;

namespace {

std::string join(const std::string& dir, const std::string& name) {
  return (fs::path(dir) / name).string();
}

// Mean of y per distinct x, in first-seen x order.
ChartSeries mean_series(const std::string& name, const std::vector<double>& x,
                        const std::vector<double>& y) {
  ChartSeries s;
  s.name = name;
  for (std::size_t i = 0; i < x.size(); ++i) {
    std::size_t at = 0;
    for (; at < s.x.size(); ++at)
      if (s.x[at] == x[i]) break;
    if (at == s.x.size()) {
      s.x.push_back(x[i]);
      s.y.push_back(0.0);
    }
  }
  std::vector<long> n(s.x.size(), 0);
  for (std::size_t i = 0; i < x.size(); ++i)
    for (std::size_t at = 0; at < s.x.size(); ++at)
      if (s.x[at] == x[i]) {
        s.y[at] += y[i];
        ++n[at];
      }
  for (std::size_t at = 0; at < s.x.size(); ++at) s.y[at] /= n[at];
  return s;
}

double pearson(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  Eigen::VectorXd u = Eigen::Map<const Eigen::VectorXd>(a.data(), a.size());
  Eigen::VectorXd v = Eigen::Map<const Eigen::VectorXd>(b.data(), b.size());
  Eigen::VectorXd du = u.array() - u.mean();
  Eigen::VectorXd dv = v.array() - v.mean();
  double den = du.norm() * dv.norm();
  return den > 0 ? du.dot(dv) / den : 0.0;
}

std::vector<std::string> az_labels(const Codebook& cb) {
  std::vector<std::string> out;
  char buf[32];
  for (double az : cb.azimuths) {
    std::snprintf(buf, sizeof buf, "%.0f", rad2deg(az));
    out.push_back(buf);
  }
  return out;
}

std::vector<std::string> el_labels(const Codebook& cb) {
  std::vector<std::string> out;
  char buf[32];
  for (double el : cb.elevations) {
    std::snprintf(buf, sizeof buf, "%.0f deg", rad2deg(el));
    out.push_back(buf);
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"prediction-assisted relay beam optimization testbed"};
  app.require_subcommand(1);

  std::string config_path, scene_path, out_dir;
  std::uint64_t seed = 0;
  bool seed_given = false;
  std::vector<int> s_opt;
  int n_opt = -1;
  std::string method = "gbo";

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "experiment config JSON");
    sub->add_option("--scene", scene_path, "scene JSON (overrides config)");
    sub->add_option("--out", out_dir, "output directory (overrides config)");
    sub->add_option("--seed", seed, "seed (overrides config seeds)")
        ->each([&](const std::string&) { seed_given = true; });
    sub->add_option("--s", s_opt, "sweep sizes")->delimiter(',');
  };

  CLI::App* c_gen = app.add_subcommand("gen-dataset", "generate a training dataset");
  c_gen->add_option("--n", n_opt, "sample count");
  CLI::App* c_train = app.add_subcommand("train", "train a localizer");
  CLI::App* c_ft = app.add_subcommand("finetune", "fine-tune on measured data");
  CLI::App* c_loo = app.add_subcommand("loo-eval", "leave-one-location-out study");
  CLI::App* c_opt = app.add_subcommand("optimize", "run the assisted loop once");
  c_opt->add_option("--method", method, "ga or gbo");
  CLI::App* c_interp = app.add_subcommand("bench-interp", "assisted vs interpolation");
  CLI::App* c_budget = app.add_subcommand("bench-budget", "measurement budget study");
  CLI::App* c_heat = app.add_subcommand("heatmap", "per-beam power grids");
  CLI::App* c_mis = app.add_subcommand("sinr-mismatch", "position vs SINR error");
  CLI::App* c_rmse = app.add_subcommand("rmse-vs-s", "localization error vs sweep size");
  for (CLI::App* sub : {c_gen, c_train, c_ft, c_loo, c_opt, c_interp, c_budget,
                        c_heat, c_mis, c_rmse})
    add_common(sub);

  CLI11_PARSE(app, argc, argv);
  CLI::App* cmd = app.get_subcommands().front();
  const std::string name = cmd->get_name();

  try {
    ExperimentConfig cfg =
        config_path.empty() ? ExperimentConfig{} : load_config(config_path);
    if (!scene_path.empty()) cfg.scene_path = scene_path;
    if (!out_dir.empty()) cfg.out_dir = out_dir;
    if (seed_given) {
      cfg.data_seed = seed;
      cfg.seeds = {seed};
    }
    if (!s_opt.empty() && (name == "bench-interp" || name == "sinr-mismatch" ||
                           name == "rmse-vs-s"))
      cfg.s_list = s_opt;
    if (!s_opt.empty() && name == "bench-budget") cfg.budget_s = s_opt[0];
    for (int s : cfg.s_list)
      if (s < 1 || s > 63) throw std::runtime_error("--s entries must be in 1..63");

    fs::create_directories(cfg.out_dir);
    Harness hx(cfg);
    std::string prov =
        "scenario=" + cfg.scenario + " scene=" + scene_hash(hx.twin()) +
        " data_seed=" + std::to_string(cfg.data_seed);

    if (name == "gen-dataset") {
      int s = s_opt.empty() ? 63 : s_opt[0];
      int n = n_opt > 0 ? n_opt : cfg.train_n;
      Dataset ds = gen_dataset(hx.twin(), n, s, cfg.data_seed);
      std::string path = join(cfg.out_dir, "dataset_s" + std::to_string(s) + ".csv");
      save_dataset(ds, path);
      std::printf("wrote %s (%d samples)\n", path.c_str(), ds.n());
    } else if (name == "train") {
      int s = s_opt.empty() ? cfg.budget_s : s_opt[0];
      Dataset tr = slice_dataset(hx.train63(), s);
      MlpModel model = make_localizer(hx.twin(), s, Rng::mix(cfg.data_seed, 9000 + s));
      TrainHyper hyper = cfg.pretrain;
      hyper.seed = Rng::mix(cfg.data_seed, 9100 + s);
      std::vector<double> trace = train(&model, tr, hyper);
      std::string mpath = join(cfg.out_dir, "model_s" + std::to_string(s) + ".json");
      save_model(model, mpath);
      FILE* f = std::fopen(join(cfg.out_dir, "train_loss.csv").c_str(), "wb");
      if (!f) throw std::runtime_error("cannot write train_loss.csv");
      std::fprintf(f, "epoch,mse_m2\n");
      for (std::size_t e = 0; e < trace.size(); ++e)
        std::fprintf(f, "%zu,%.12g\n", e + 1, trace[e]);
      std::fclose(f);
      double rmse = evaluate_rmse(model, slice_dataset(hx.test63(), s));
      std::printf("wrote %s (test rmse %.4f m)\n", mpath.c_str(), rmse);
    } else if (name == "finetune") {
      int s = s_opt.empty() ? cfg.budget_s : s_opt[0];
      std::uint64_t sd = cfg.seeds.front();
      MlpModel model = hx.pretrained(s);
      Scene world = perturb_materials(hx.twin(), cfg.twin_rho_jitter, Rng::mix(sd, 71));
      Dataset data = gen_location_dataset(
          world, default_measurement_positions(), cfg.sweeps_per_position, s,
          cfg.meas_noise_db, Rng::mix(sd, 73));
      TrainHyper hyper = cfg.finetune;
      hyper.seed = Rng::mix(sd, 74);
      double before = evaluate_rmse(model, data);
      std::vector<double> trace = fine_tune(&model, data, cfg.frozen_layers, hyper);
      double after = evaluate_rmse(model, data);
      std::string mpath =
          join(cfg.out_dir, "model_s" + std::to_string(s) + "_finetuned.json");
      save_model(model, mpath);
      FILE* f = std::fopen(join(cfg.out_dir, "finetune_loss.csv").c_str(), "wb");
      if (!f) throw std::runtime_error("cannot write finetune_loss.csv");
      std::fprintf(f, "epoch,mse_m2\n");
      for (std::size_t e = 0; e < trace.size(); ++e)
        std::fprintf(f, "%zu,%.12g\n", e + 1, trace[e]);
      std::fclose(f);
      std::printf("wrote %s (rmse %.4f -> %.4f m on measured data)\n", mpath.c_str(),
                  before, after);
    } else if (name == "loo-eval") {
      std::vector<LooRow> rows = hx.loo_study(cfg.seeds.front());
      std::string path = join(cfg.out_dir, "loo.csv");
      write_loo_csv(rows, path);
      int better = 0;
      for (const auto& r : rows) better += r.tuned_rmse_m < r.base_rmse_m;
      std::printf("wrote %s (tuned beats pretrained on %d/%zu folds)\n", path.c_str(),
                  better, rows.size());
    } else if (name == "optimize") {
      int s = s_opt.empty() ? cfg.budget_s : s_opt[0];
      if (method != "ga" && method != "gbo")
        throw std::runtime_error("--method must be ga or gbo");
      GroundTruth gt = hx.make_ground_truth(cfg.seeds.front());
      MeasurementVector mv = gt.sweep(beam_subset(hx.codebook(), s));
      OptimizerConfig oc = method == "ga" ? cfg.ga : cfg.gbo;
      oc.seed = Rng::mix(cfg.seeds.front(), 500 + s);
      OptimizeResult r = twin_assisted_optimize(mv, hx.pretrained(s), hx.twin(), oc);
      std::string tpath = join(cfg.out_dir, "optimize_trace.csv");
      write_trace_csv(r, tpath);
      nlohmann::json out = {{"az_deg", rad2deg(r.theta.az)},
                            {"el_deg", rad2deg(r.theta.el)},
                            {"twin_sinr_db", r.best_db},
                            {"achieved_sinr_db", gt.probe_sinr_db(r.theta)},
                            {"real_measurements", gt.measurements()},
                            {"twin_evaluations", r.evaluations}};
      std::printf("%s\nwrote %s\n", out.dump().c_str(), tpath.c_str());
    } else if (name == "bench-interp") {
      std::vector<InterpRow> rows = hx.interpolation_benchmark();
      std::string path = join(cfg.out_dir, "interp_benchmark.csv");
      write_interp_csv(rows, path);
      std::vector<double> xs, pao, base;
      for (const auto& r : rows) {
        xs.push_back(r.s);
        pao.push_back(r.pao_db);
        base.push_back(r.baseline_db);
      }
      std::vector<ChartSeries> series = {mean_series("assisted", xs, pao),
                                         mean_series("interpolation", xs, base)};
      write_text_file(line_chart_svg(series, "Achieved SINR vs sweep size",
                                     "swept beams S", "SINR (dB)", prov),
                      join(cfg.out_dir, "interp_benchmark.svg"));
      std::printf("wrote %s\n", path.c_str());
    } else if (name == "bench-budget") {
      BudgetStudy study = hx.budget_study();
      write_budget_csv(study, join(cfg.out_dir, "budget_curves.csv"));
      write_budget_summary_csv(study, join(cfg.out_dir, "budget_summary.csv"));
      std::vector<ChartSeries> series;
      for (const std::string& m : {std::string("ga"), std::string("gbo")}) {
        std::vector<double> xs, ys;
        for (const auto& run : study.direct)
          if (run.method == m)
            for (std::size_t i = 0; i < run.achieved_db.size(); ++i) {
              xs.push_back(static_cast<double>(i + 1));
              ys.push_back(run.achieved_db[i]);
            }
        if (!xs.empty()) series.push_back(mean_series("direct-" + m, xs, ys));
        std::vector<double> px, py;
        for (const auto& p : study.pao)
          if (p.method == "pao-" + m) {
            px.push_back(static_cast<double>(p.cost));
            py.push_back(p.final_db);
          }
        if (!px.empty()) series.push_back(mean_series("assisted-" + m, px, py));
      }
      write_text_file(line_chart_svg(series, "SINR vs real measurements",
                                     "real measurements", "SINR (dB)", prov),
                      join(cfg.out_dir, "budget_curves.svg"));
      std::printf("wrote %s\n", join(cfg.out_dir, "budget_curves.csv").c_str());
    } else if (name == "heatmap") {
      const Codebook& cb = hx.codebook();
      GroundTruth gt = hx.make_ground_truth(cfg.seeds.front());
      MeasurementVector mv = gt.sweep(cb.entries);
      Eigen::VectorXd p = forward(hx.pretrained(63), mv.sinr_db);
      Vec3 p0(p[0], p[1], p[2]);
      std::vector<Vec3> pk;
      for (int k = 1; 3 * k + 2 < p.size(); ++k)
        pk.push_back(Vec3(p[3 * k], p[3 * k + 1], p[3 * k + 2]));
      std::vector<Vec3> true_pk;
      for (const auto& g : hx.twin().interferers) true_pk.push_back(g.position);
      Eigen::MatrixXd grid_true = hx.power_grid(hx.twin().sta.position, true_pk);
      Eigen::MatrixXd grid_pred = hx.power_grid(p0, pk);
      write_grid_csv(cb, grid_true, join(cfg.out_dir, "heatmap_true.csv"));
      write_grid_csv(cb, grid_pred, join(cfg.out_dir, "heatmap_pred.csv"));
      double r = pearson(grid_true, grid_pred);
      char extra[96];
      std::snprintf(extra, sizeof extra, " pearson_r=%.4f", r);
      write_text_file(heatmap_svg(grid_true, el_labels(cb), az_labels(cb),
                                  "Received power, true position", "dBm",
                                  prov + extra),
                      join(cfg.out_dir, "heatmap_true.svg"));
      write_text_file(heatmap_svg(grid_pred, el_labels(cb), az_labels(cb),
                                  "Received power, predicted position", "dBm",
                                  prov + extra),
                      join(cfg.out_dir, "heatmap_pred.svg"));
      std::printf("wrote heatmaps (pearson r %.4f)\n", r);
    } else if (name == "sinr-mismatch") {
      std::vector<Harness::MismatchRow> rows = hx.sinr_mismatch(cfg.s_list);
      std::string path = join(cfg.out_dir, "sinr_mismatch.csv");
      write_mismatch_csv(rows, path);
      std::vector<ChartSeries> series;
      for (int s : cfg.s_list) {
        std::vector<double> xs, ys;
        for (const auto& r : rows)
          if (r.s == s) {
            xs.push_back(std::floor(r.pos_err_m * 10.0) / 10.0);  // 0.1 m bins
            ys.push_back(r.sinr_err_db);
          }
        ChartSeries sr = mean_series("S=" + std::to_string(s), xs, ys);
        std::vector<std::size_t> idx(sr.x.size());
        for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
        std::sort(idx.begin(), idx.end(),
                  [&](std::size_t a, std::size_t b) { return sr.x[a] < sr.x[b]; });
        ChartSeries sorted;
        sorted.name = sr.name;
        for (std::size_t i : idx) {
          sorted.x.push_back(sr.x[i]);
          sorted.y.push_back(sr.y[i]);
        }
        series.push_back(sorted);
      }
      write_text_file(line_chart_svg(series, "SINR error vs position error",
                                     "position error (m)", "SINR error (dB)", prov),
                      join(cfg.out_dir, "sinr_mismatch.svg"));
      check_mismatch_trend(rows);
      std::printf("wrote %s\n", path.c_str());
    } else if (name == "rmse-vs-s") {
      std::vector<RmseRow> rows = hx.rmse_vs_s();
      std::string path = join(cfg.out_dir, "rmse_vs_s.csv");
      write_rmse_csv(rows, path);
      std::vector<double> xs, ys;
      for (const auto& r : rows) {
        xs.push_back(r.s);
        ys.push_back(r.rmse_m);
      }
      write_text_file(
          line_chart_svg({mean_series("rmse", xs, ys)}, "Localization error vs sweep size",
                         "swept beams S", "RMSE (m)", prov),
          join(cfg.out_dir, "rmse_vs_s.svg"));
      check_rmse_trend(rows, cfg.s_list, 0.05);
      std::printf("wrote %s\n", path.c_str());
    }
  } catch (const std::exception& e) {
    nlohmann::json err = {{"error", e.what()}, {"command", name}};
    std::fprintf(stderr, "%s\n", err.dump().c_str());
    return 1;
  }
  return 0;
}

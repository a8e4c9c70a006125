#include "twinbeam/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "twinbeam/rng.hpp"
#include "twinbeam/twin.hpp"

namespace twinbeam {

namespace {

struct Tracker {
  const Objective& f;
  const OptimizerConfig& cfg;
  long evals = 0;
  double best = -std::numeric_limits<double>::infinity();
  Angles best_angles{};
  std::vector<std::pair<long, double>> trace{};

  bool exhausted() const { return evals >= cfg.max_evals; }

  double eval(const Angles& a) {
    if (a.az < cfg.az_lo - 1e-12 || a.az > cfg.az_hi + 1e-12 ||
        a.el < cfg.el_lo - 1e-12 || a.el > cfg.el_hi + 1e-12)
      throw std::logic_error("optimizer: objective evaluated outside bounds");
    ++evals;
    double v = f(a);
    if (v > best) {
      best = v;
      best_angles = a;
    }
    return v;
  }

  void mark() { trace.emplace_back(evals, best); }

  // True when the last `window` marks gained less than the threshold.
  bool stagnant() const {
    int w = cfg.conv_window;
    if (w <= 0 || static_cast<int>(trace.size()) <= w) return false;
    double now = trace.back().second;
    double then = trace[trace.size() - 1 - w].second;
    return now - then < cfg.conv_improve_db;
  }
};

Angles clamp_angles(const Angles& a, const OptimizerConfig& cfg) {
  return {std::clamp(a.az, cfg.az_lo, cfg.az_hi),
          std::clamp(a.el, cfg.el_lo, cfg.el_hi)};
}

OptimizeResult finish(const Tracker& t, const Angles& theta, double value) {
  OptimizeResult r;
  r.theta = theta;
  r.best_db = value;
  r.trace = t.trace;
  r.evaluations = t.evals;
  return r;
}

}  // namespace

OptimizeResult ga_optimize(const Objective& objective, const OptimizerConfig& cfg) {
  if (cfg.population < 2) throw std::invalid_argument("ga_optimize: population < 2");
  if (cfg.max_evals < 1) throw std::invalid_argument("ga_optimize: max_evals < 1");
  Tracker t{objective, cfg};
  Rng rng(Rng::mix(cfg.seed, 0x6a0a));

  struct Ind {
    Angles a;
    double fit = -std::numeric_limits<double>::infinity();
  };
  std::vector<Ind> pop;
  for (int i = 0; i < cfg.population && !t.exhausted(); ++i) {
    Ind ind;
    ind.a = {rng.uniform(cfg.az_lo, cfg.az_hi), rng.uniform(cfg.el_lo, cfg.el_hi)};
    ind.fit = t.eval(ind.a);
    pop.push_back(ind);
  }
  t.mark();

  auto by_fitness = [](const Ind& x, const Ind& y) { return x.fit > y.fit; };

  for (int gen = 1; gen <= cfg.generations; ++gen) {
    if (t.exhausted() || t.stagnant() || pop.size() < 2) break;
    std::stable_sort(pop.begin(), pop.end(), by_fitness);

    auto tournament = [&]() -> const Ind& {
      int best = rng.uniform_int(0, static_cast<int>(pop.size()) - 1);
      for (int c = 1; c < cfg.tournament; ++c) {
        int i = rng.uniform_int(0, static_cast<int>(pop.size()) - 1);
        if (pop[i].fit > pop[best].fit) best = i;
      }
      return pop[best];
    };

    double frac = cfg.generations > 1 ? double(gen - 1) / (cfg.generations - 1) : 0.0;
    double sigma = cfg.mutation_std + frac * (cfg.mutation_std_final - cfg.mutation_std);

    std::vector<Ind> next;
    for (int e = 0; e < cfg.elitism && e < static_cast<int>(pop.size()); ++e)
      next.push_back(pop[e]);  // fitness kept, no re-evaluation

    int bred = std::max(static_cast<int>(next.size()),
                        cfg.population - std::max(0, cfg.immigrants));
    while (static_cast<int>(next.size()) < bred) {
      const Ind& pa = tournament();
      const Ind& pb = tournament();
      Ind child;
      if (rng.uniform() < cfg.crossover_rate) {
        auto blend = [&](double x, double y) {
          double lo = std::min(x, y), hi = std::max(x, y);
          double d = (hi - lo) * cfg.blend_alpha;
          return rng.uniform(lo - d, hi + d);
        };
        child.a = {blend(pa.a.az, pb.a.az), blend(pa.a.el, pb.a.el)};
      } else {
        child.a = pa.fit >= pb.fit ? pa.a : pb.a;
      }
      if (rng.uniform() < cfg.mutation_rate)
        child.a.az += rng.normal(0.0, sigma);
      if (rng.uniform() < cfg.mutation_rate)
        child.a.el += rng.normal(0.0, sigma);
      child.a = clamp_angles(child.a, cfg);
      next.push_back(child);
    }
    while (static_cast<int>(next.size()) < cfg.population) {
      Ind im;
      im.a = {rng.uniform(cfg.az_lo, cfg.az_hi), rng.uniform(cfg.el_lo, cfg.el_hi)};
      next.push_back(im);
    }

    for (Ind& ind : next) {
      if (ind.fit > -std::numeric_limits<double>::infinity()) continue;  // elite
      if (t.exhausted()) {
        ind.fit = -std::numeric_limits<double>::infinity();
        continue;
      }
      ind.fit = t.eval(ind.a);
    }
    // Drop anything the budget left unevaluated.
    next.erase(std::remove_if(next.begin(), next.end(),
                              [](const Ind& i) {
                                return i.fit ==
                                       -std::numeric_limits<double>::infinity();
                              }),
               next.end());
    if (next.empty()) break;
    pop = std::move(next);
    t.mark();
  }
  return finish(t, t.best_angles, t.best);
}

OptimizeResult gbo_optimize(const Objective& objective, const OptimizerConfig& cfg) {
  if (cfg.starts < 1) throw std::invalid_argument("gbo_optimize: starts < 1");
  if (cfg.max_evals < 1) throw std::invalid_argument("gbo_optimize: max_evals < 1");
  Tracker t{objective, cfg};
  Rng rng(Rng::mix(cfg.seed, 0x6b0b));

  struct Optimum {
    Angles a;
    double val;
  };
  std::vector<Optimum> unique_set;

  for (int start = 0; start < cfg.starts; ++start) {
    if (t.exhausted() || t.stagnant()) break;
    Angles x{rng.uniform(cfg.az_lo, cfg.az_hi), rng.uniform(cfg.el_lo, cfg.el_hi)};
    double fx = t.eval(x);

    for (int iter = 0; iter < cfg.max_iters && !t.exhausted(); ++iter) {
      double f_before = fx;

      // Central differences, clamped to the box.
      auto probe = [&](double daz, double del) {
        return clamp_angles({x.az + daz, x.el + del}, cfg);
      };
      if (t.evals + 4 > cfg.max_evals) break;
      Angles ap = probe(cfg.fd_step, 0), am = probe(-cfg.fd_step, 0);
      Angles ep = probe(0, cfg.fd_step), em = probe(0, -cfg.fd_step);
      double daz = ap.az - am.az, del = ep.el - em.el;
      double gaz = daz > 1e-15 ? (t.eval(ap) - t.eval(am)) / daz : 0.0;
      double gel = del > 1e-15 ? (t.eval(ep) - t.eval(em)) / del : 0.0;
      double gnorm = std::hypot(gaz, gel);
      if (gnorm < 1e-15) break;

      double step = cfg.ls_step;
      bool improved = false;
      for (int trial = 0; trial < cfg.ls_max_trials && !t.exhausted(); ++trial) {
        Angles cand = clamp_angles(
            {x.az + step * gaz / gnorm, x.el + step * gel / gnorm}, cfg);
        double fc = t.eval(cand);
        if (fc > fx) {
          x = cand;
          fx = fc;
          improved = true;
          break;
        }
        step *= cfg.ls_shrink;
      }
      if (!improved || fx - f_before < cfg.ascent_tol_db) break;
    }

    // Fold the completed ascent into the unique set.
    bool merged = false;
    for (Optimum& o : unique_set) {
      if (std::abs(o.a.az - x.az) <= cfg.dedup_tol &&
          std::abs(o.a.el - x.el) <= cfg.dedup_tol) {
        if (fx > o.val) {
          o.a = x;
          o.val = fx;
        }
        merged = true;
        break;
      }
    }
    if (!merged) unique_set.push_back({x, fx});
    t.mark();
  }

  const Optimum* best = nullptr;
  for (const Optimum& o : unique_set)
    if (best == nullptr || o.val > best->val) best = &o;
  if (best == nullptr) return finish(t, t.best_angles, t.best);
  return finish(t, best->a, best->val);
}

OptimizeResult exhaustive_search(const Objective& objective, const OptimizerConfig& cfg,
                                 double step_deg) {
  if (step_deg <= 0.0) throw std::invalid_argument("exhaustive_search: bad step");
  Tracker t{objective, cfg};
  double az_lo = rad2deg(cfg.az_lo), az_hi = rad2deg(cfg.az_hi);
  double el_lo = rad2deg(cfg.el_lo), el_hi = rad2deg(cfg.el_hi);
  int n_az = static_cast<int>(std::floor((az_hi - az_lo) / step_deg + 1e-9)) + 1;
  int n_el = static_cast<int>(std::floor((el_hi - el_lo) / step_deg + 1e-9)) + 1;
  for (int i = 0; i < n_az && !t.exhausted(); ++i) {
    for (int j = 0; j < n_el && !t.exhausted(); ++j) {
      Angles a{deg2rad(az_lo + i * step_deg), deg2rad(el_lo + j * step_deg)};
      t.eval(clamp_angles(a, cfg));
    }
  }
  t.mark();
  return finish(t, t.best_angles, t.best);
}

OptimizeResult twin_assisted_optimize(const MeasurementVector& mv, const MlpModel& model,
                                      const Scene& twin_template,
                                      const OptimizerConfig& cfg_in) {
  if (static_cast<int>(mv.sinr_db.size()) != model.input_dim())
    throw std::invalid_argument("twin_assisted_optimize: sweep length != model input");
  Eigen::VectorXd p = forward(model, mv.sinr_db);
  int kk = static_cast<int>(twin_template.interferers.size());
  if (p.size() != 3 * (kk + 1))
    throw std::invalid_argument("twin_assisted_optimize: prediction/interferer mismatch");

  Vec3 p0(p[0], p[1], p[2]);
  std::vector<Vec3> pk;
  for (int k = 0; k < kk; ++k)
    pk.push_back(Vec3(p[3 * (k + 1)], p[3 * (k + 1) + 1], p[3 * (k + 1) + 2]));

  TwinEvaluator ev(twin_template);
  ev.place_transmitters(p0, pk);

  OptimizerConfig cfg = cfg_in;
  if (cfg.conv_window == 0) cfg.conv_window = 5;  // stop when SINR stops improving
  Objective obj = [&](const Angles& a) { return ev.sinr_db(a); };
  OptimizeResult r = cfg.kind == OptimizerConfig::Kind::ga ? ga_optimize(obj, cfg)
                                                           : gbo_optimize(obj, cfg);
  r.positions_used = p;
  return r;
}

}  // namespace twinbeam

#include "twinbeam/mlp.hpp"

#include <cmath>
#include <fstream>
#include <map>
#include <numeric>
#include <stdexcept>

#include "json.hpp"
#include "twinbeam/rng.hpp"

namespace twinbeam {

MlpModel make_mlp(int in_dim, int out_dim, const std::vector<int>& hidden,
                  const Eigen::VectorXd& out_lo, const Eigen::VectorXd& out_hi,
                  std::uint64_t seed) {
  if (in_dim < 1 || out_dim < 1)
    throw std::invalid_argument("make_mlp: bad dimensions");
  if (out_lo.size() != out_dim || out_hi.size() != out_dim)
    throw std::invalid_argument("make_mlp: output bounds size mismatch");
  MlpModel m;
  m.out_lo = out_lo;
  m.out_hi = out_hi;
  Rng rng(Rng::mix(seed, 0x3317));
  std::vector<int> widths;
  widths.push_back(in_dim);
  for (int h : hidden) widths.push_back(h);
  widths.push_back(out_dim);
  for (std::size_t l = 0; l + 1 < widths.size(); ++l) {
    MlpLayer layer;
    int fan_in = widths[l];
    int fan_out = widths[l + 1];
    double std = std::sqrt(2.0 / fan_in);
    layer.w.resize(fan_out, fan_in);
    for (int i = 0; i < fan_out; ++i)
      for (int j = 0; j < fan_in; ++j) layer.w(i, j) = rng.normal(0.0, std);
    layer.b = Eigen::VectorXd::Zero(fan_out);
    layer.relu = l + 2 < widths.size();
    m.layers.push_back(std::move(layer));
  }
  m.frozen.assign(m.layers.size(), false);
  return m;
}

MlpModel make_localizer(const Scene& scene, int s, std::uint64_t seed) {
  int kk = static_cast<int>(scene.interferers.size());
  int out_dim = 3 * (kk + 1);
  Eigen::VectorXd lo(out_dim), hi(out_dim);
  for (int t = 0; t <= kk; ++t) {
    lo.segment(3 * t, 3) = scene.room_lo;
    hi.segment(3 * t, 3) = scene.room_hi;
  }
  return make_mlp(s, out_dim, {128, 128, 64}, lo, hi, seed);
}

Eigen::MatrixXd normalize_input(const MlpModel& m, const Eigen::MatrixXd& x_cols) {
  double span = m.in_hi - m.in_lo;
  return (2.0 * (x_cols.array().max(m.in_lo).min(m.in_hi) - m.in_lo) / span - 1.0)
      .matrix();
}

Eigen::MatrixXd normalize_output(const MlpModel& m, const Eigen::MatrixXd& y_cols) {
  Eigen::ArrayXd span = (m.out_hi - m.out_lo).array();
  return ((y_cols.array().colwise() - m.out_lo.array()).colwise() / span).matrix();
}

Eigen::MatrixXd denormalize_output(const MlpModel& m, const Eigen::MatrixXd& yn_cols) {
  Eigen::ArrayXd span = (m.out_hi - m.out_lo).array();
  return ((yn_cols.array().colwise() * span).colwise() + m.out_lo.array()).matrix();
}

namespace {

Eigen::MatrixXd run_layers(const MlpModel& m, const Eigen::MatrixXd& xn) {
  Eigen::MatrixXd a = xn;
  for (const MlpLayer& layer : m.layers) {
    Eigen::MatrixXd z = (layer.w * a).colwise() + layer.b;
    a = layer.relu ? z.cwiseMax(0.0) : z;
  }
  return a;
}

}  // namespace

Eigen::MatrixXd forward_batch(const MlpModel& m, const Eigen::MatrixXd& x_cols) {
  if (x_cols.rows() != m.input_dim())
    throw std::invalid_argument("forward: input dimension mismatch");
  return denormalize_output(m, run_layers(m, normalize_input(m, x_cols)));
}

Eigen::VectorXd forward(const MlpModel& m, const Eigen::VectorXd& sinr_db) {
  return forward_batch(m, sinr_db);
}

MlpGrads backprop(const MlpModel& m, const Eigen::MatrixXd& xn,
                  const Eigen::MatrixXd& yn) {
  int L = static_cast<int>(m.layers.size());
  double B = static_cast<double>(xn.cols());
  std::vector<Eigen::MatrixXd> a(L + 1), z(L);
  a[0] = xn;
  for (int l = 0; l < L; ++l) {
    z[l] = (m.layers[l].w * a[l]).colwise() + m.layers[l].b;
    a[l + 1] = m.layers[l].relu ? z[l].cwiseMax(0.0) : z[l];
  }

  MlpGrads g;
  g.dw.resize(L);
  g.db.resize(L);
  g.residual = a[L] - yn;
  g.loss = g.residual.squaredNorm() / B;

  Eigen::MatrixXd dz = (2.0 / B) * g.residual;
  for (int l = L - 1; l >= 0; --l) {
    g.dw[l].noalias() = dz * a[l].transpose();
    g.db[l] = dz.rowwise().sum();
    if (l > 0) {
      Eigen::MatrixXd back = m.layers[l].w.transpose() * dz;
      dz = m.layers[l - 1].relu
               ? (back.array() * (z[l - 1].array() > 0.0).cast<double>()).matrix()
               : back;
    }
  }
  return g;
}

std::vector<double> train(MlpModel* model, const Dataset& data, const TrainHyper& hyper) {
  if (data.n() < 1) throw std::invalid_argument("train: empty dataset");
  if (data.x.cols() != model->input_dim() || data.y.cols() != model->output_dim())
    throw std::invalid_argument("train: dataset shape does not match model");

  int n = data.n();
  int L = static_cast<int>(model->layers.size());
  Eigen::MatrixXd xn = normalize_input(*model, data.x.transpose());
  Eigen::MatrixXd yn = normalize_output(*model, data.y.transpose());
  Eigen::ArrayXd span = (model->out_hi - model->out_lo).array();

  // Adam moments.
  std::vector<Eigen::MatrixXd> mw(L), vw(L);
  std::vector<Eigen::VectorXd> mb(L), vb(L);
  for (int l = 0; l < L; ++l) {
    mw[l] = Eigen::MatrixXd::Zero(model->layers[l].w.rows(), model->layers[l].w.cols());
    vw[l] = mw[l];
    mb[l] = Eigen::VectorXd::Zero(model->layers[l].b.size());
    vb[l] = mb[l];
  }

  std::vector<int> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  Rng rng(Rng::mix(hyper.seed, 0x7e81));
  Rng aug_rng(Rng::mix(hyper.seed, 0x41a9));
  // Input scaling maps [in_lo, in_hi] onto [-1, 1], so dB jitter shrinks by
  // the same factor.
  double aug_n = hyper.aug_noise_db * 2.0 / (model->in_hi - model->in_lo);
  int bs_max = std::min(hyper.batch, n);
  Eigen::MatrixXd xb(xn.rows(), bs_max), yb(yn.rows(), bs_max);

  std::vector<double> trace;
  long t = 0;
  for (int epoch = 0; epoch < hyper.epochs; ++epoch) {
    rng.shuffle(idx);
    double acc_m2 = 0.0;
    for (int start = 0; start < n; start += bs_max) {
      int bs = std::min(bs_max, n - start);
      for (int c = 0; c < bs; ++c) {
        xb.col(c) = xn.col(idx[start + c]);
        yb.col(c) = yn.col(idx[start + c]);
      }
      if (aug_n > 0.0)
        for (int c = 0; c < bs; ++c)
          for (int r = 0; r < xb.rows(); ++r) xb(r, c) += aug_rng.normal(0.0, aug_n);
      MlpGrads g = backprop(*model, xb.leftCols(bs), yb.leftCols(bs));
      if (!std::isfinite(g.loss))
        throw std::runtime_error("train: loss diverged");
      acc_m2 += (g.residual.array().colwise() * span).matrix().squaredNorm();

      ++t;
      double c1 = 1.0 - std::pow(hyper.beta1, static_cast<double>(t));
      double c2 = 1.0 - std::pow(hyper.beta2, static_cast<double>(t));
      for (int l = 0; l < L; ++l) {
        if (model->frozen[l]) continue;
        mw[l] = hyper.beta1 * mw[l] + (1.0 - hyper.beta1) * g.dw[l];
        vw[l] = (hyper.beta2 * vw[l].array() +
                 (1.0 - hyper.beta2) * g.dw[l].array().square())
                    .matrix();
        model->layers[l].w.array() -=
            hyper.lr * (mw[l].array() / c1) /
            ((vw[l].array() / c2).sqrt() + hyper.adam_eps);
        mb[l] = hyper.beta1 * mb[l] + (1.0 - hyper.beta1) * g.db[l];
        vb[l] = (hyper.beta2 * vb[l].array() +
                 (1.0 - hyper.beta2) * g.db[l].array().square())
                    .matrix();
        model->layers[l].b.array() -=
            hyper.lr * (mb[l].array() / c1) /
            ((vb[l].array() / c2).sqrt() + hyper.adam_eps);
      }
    }
    trace.push_back(acc_m2 / n);
  }
  return trace;
}

std::vector<double> fine_tune(MlpModel* model, const Dataset& data, int frozen_layers,
                              const TrainHyper& hyper) {
  int L = static_cast<int>(model->layers.size());
  if (frozen_layers < 0 || frozen_layers >= L)
    throw std::invalid_argument("fine_tune: must leave at least one layer trainable");
  model->frozen.assign(L, false);
  for (int l = 0; l < frozen_layers; ++l) model->frozen[l] = true;
  auto trace = train(model, data, hyper);
  model->frozen.assign(L, false);
  return trace;
}

double loss_mse(const MlpModel& m, const Dataset& data) {
  if (data.n() < 1) throw std::invalid_argument("loss_mse: empty dataset");
  Eigen::MatrixXd pred = forward_batch(m, data.x.transpose());
  return (pred - data.y.transpose()).colwise().squaredNorm().mean();
}

double evaluate_rmse(const MlpModel& m, const Dataset& data) {
  return std::sqrt(loss_mse(m, data));
}

namespace {

Dataset subset_rows(const Dataset& data, const std::vector<int>& rows) {
  Dataset out;
  out.s = data.s;
  out.k = data.k;
  out.seed = data.seed;
  out.scene_id = data.scene_id;
  out.x.resize(static_cast<int>(rows.size()), data.x.cols());
  out.y.resize(static_cast<int>(rows.size()), data.y.cols());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    out.x.row(i) = data.x.row(rows[i]);
    out.y.row(i) = data.y.row(rows[i]);
  }
  return out;
}

}  // namespace

LooResult leave_one_location_out(const MlpModel& base, const Dataset& data,
                                 int frozen_layers, const TrainHyper& hyper) {
  if (data.group.size() != static_cast<std::size_t>(data.n()))
    throw std::invalid_argument("leave_one_location_out: dataset has no groups");
  std::map<int, std::vector<int>> groups;
  for (int i = 0; i < data.n(); ++i) groups[data.group[i]].push_back(i);
  if (groups.size() < 2)
    throw std::invalid_argument("leave_one_location_out: needs at least two groups");

  LooResult res;
  for (const auto& [gid, test_rows] : groups) {
    std::vector<int> train_rows;
    for (int i = 0; i < data.n(); ++i)
      if (data.group[i] != gid) train_rows.push_back(i);
    Dataset train_ds = subset_rows(data, train_rows);
    Dataset test_ds = subset_rows(data, test_rows);
    MlpModel tuned = base;
    fine_tune(&tuned, train_ds, frozen_layers, hyper);
    res.rmse.push_back(evaluate_rmse(tuned, test_ds));
    res.base_rmse.push_back(evaluate_rmse(base, test_ds));
  }
  res.mean = std::accumulate(res.rmse.begin(), res.rmse.end(), 0.0) /
             static_cast<double>(res.rmse.size());
  return res;
}

void save_model(const MlpModel& m, const std::string& path) {
  nlohmann::json j;
  j["in_lo"] = m.in_lo;
  j["in_hi"] = m.in_hi;
  j["out_lo"] = std::vector<double>(m.out_lo.data(), m.out_lo.data() + m.out_lo.size());
  j["out_hi"] = std::vector<double>(m.out_hi.data(), m.out_hi.data() + m.out_hi.size());
  j["layers"] = nlohmann::json::array();
  for (const MlpLayer& layer : m.layers) {
    nlohmann::json jl;
    jl["relu"] = layer.relu;
    jl["rows"] = layer.w.rows();
    jl["cols"] = layer.w.cols();
    std::vector<double> w(layer.w.data(), layer.w.data() + layer.w.size());
    std::vector<double> b(layer.b.data(), layer.b.data() + layer.b.size());
    jl["w"] = w;  // column-major
    jl["b"] = b;
    j["layers"].push_back(jl);
  }
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write model: " + path);
  out << j.dump() << "\n";
}

MlpModel load_model(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open model: " + path);
  nlohmann::json j = nlohmann::json::parse(in);
  MlpModel m;
  m.in_lo = j.at("in_lo").get<double>();
  m.in_hi = j.at("in_hi").get<double>();
  auto lo = j.at("out_lo").get<std::vector<double>>();
  auto hi = j.at("out_hi").get<std::vector<double>>();
  m.out_lo = Eigen::Map<Eigen::VectorXd>(lo.data(), static_cast<int>(lo.size()));
  m.out_hi = Eigen::Map<Eigen::VectorXd>(hi.data(), static_cast<int>(hi.size()));
  for (const auto& jl : j.at("layers")) {
    MlpLayer layer;
    layer.relu = jl.at("relu").get<bool>();
    int rows = jl.at("rows").get<int>();
    int cols = jl.at("cols").get<int>();
    auto w = jl.at("w").get<std::vector<double>>();
    auto b = jl.at("b").get<std::vector<double>>();
    layer.w = Eigen::Map<Eigen::MatrixXd>(w.data(), rows, cols);
    layer.b = Eigen::Map<Eigen::VectorXd>(b.data(), rows);
    m.layers.push_back(std::move(layer));
  }
  m.frozen.assign(m.layers.size(), false);
  return m;
}

}  // namespace twinbeam

#include "twinbeam/dataset.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "json.hpp"
#include "twinbeam/codebook.hpp"

namespace twinbeam {

namespace {

std::vector<Angles> subset_beams(int s) {
  Codebook cb = default_codebook();
  return beam_subset(cb, s);
}

}  // namespace

Dataset gen_dataset(const Scene& tmpl, int n, int s, std::uint64_t seed) {
  if (n < 1) throw std::invalid_argument("gen_dataset: n must be positive");
  const Vec3& lo = tmpl.tx_region_lo;
  const Vec3& hi = tmpl.tx_region_hi;
  if (lo.x() >= hi.x() || lo.y() >= hi.y() || lo.z() > hi.z())
    throw std::invalid_argument("gen_dataset: invalid transmitter region");

  std::vector<Angles> beams = subset_beams(s);
  int kk = static_cast<int>(tmpl.interferers.size());
  Dataset ds;
  ds.s = s;
  ds.k = kk;
  ds.seed = seed;
  ds.scene_id = scene_hash(tmpl);
  ds.x.resize(n, s);
  ds.y.resize(n, 3 * (kk + 1));

  TwinEvaluator ev(tmpl);
  Rng rng(Rng::mix(seed, 0x5a3d));
  auto draw = [&](Vec3* p) {
    p->x() = rng.uniform(lo.x(), hi.x());
    p->y() = rng.uniform(lo.y(), hi.y());
    p->z() = lo.z() < hi.z() ? rng.uniform(lo.z(), hi.z()) : lo.z();
  };

  std::vector<Vec3> pk(kk);
  for (int i = 0; i < n; ++i) {
    Vec3 p0;
    draw(&p0);
    for (int k = 0; k < kk; ++k) draw(&pk[k]);
    ev.place_transmitters(p0, pk);
    MeasurementVector mv = sweep(ev, beams);
    ds.x.row(i) = mv.sinr_db.transpose();
    ds.y.row(i).segment(0, 3) = p0.transpose();
    for (int k = 0; k < kk; ++k)
      ds.y.row(i).segment(3 * (k + 1), 3) = pk[k].transpose();
  }
  return ds;
}

Dataset gen_location_dataset(const Scene& scene, const std::vector<Vec3>& positions,
                             int sweeps_per_position, int s, double noise_sigma_db,
                             std::uint64_t seed) {
  if (positions.empty() || sweeps_per_position < 1)
    throw std::invalid_argument("gen_location_dataset: empty protocol");
  std::vector<Angles> beams = subset_beams(s);
  int kk = static_cast<int>(scene.interferers.size());
  int n = static_cast<int>(positions.size()) * sweeps_per_position;

  Dataset ds;
  ds.s = s;
  ds.k = kk;
  ds.seed = seed;
  ds.scene_id = scene_hash(scene);
  ds.x.resize(n, s);
  ds.y.resize(n, 3 * (kk + 1));
  ds.group.resize(n);

  TwinEvaluator ev(scene);
  NoiseModel noise{noise_sigma_db};
  Rng rng(Rng::mix(seed, 0x10c5));
  std::vector<Vec3> pk;
  for (const auto& g : scene.interferers) pk.push_back(g.position);

  int row = 0;
  for (std::size_t loc = 0; loc < positions.size(); ++loc) {
    ev.place_transmitters(positions[loc], pk);
    for (int rep = 0; rep < sweeps_per_position; ++rep, ++row) {
      MeasurementVector mv = sweep(ev, beams, noise, &rng);
      ds.x.row(row) = mv.sinr_db.transpose();
      ds.y.row(row).segment(0, 3) = positions[loc].transpose();
      for (int k = 0; k < kk; ++k)
        ds.y.row(row).segment(3 * (k + 1), 3) = pk[k].transpose();
      ds.group[row] = static_cast<int>(loc);
    }
  }
  return ds;
}

std::vector<Vec3> default_measurement_positions() {
  std::vector<Vec3> out;
  for (double y : {1.5, 2.5})
    for (int i = 0; i < 15; ++i)
      out.push_back(Vec3(4.0 + 0.1 * i, y, 0.9));
  return out;
}

void save_dataset(const Dataset& ds, const std::string& csv_path) {
  std::ofstream out(csv_path);
  if (!out) throw std::runtime_error("cannot write dataset: " + csv_path);
  char buf[64];
  for (int j = 0; j < ds.s; ++j) out << "sinr_" << j << ",";
  for (int t = 0; t <= ds.k; ++t) {
    out << "p" << t << "_x,p" << t << "_y,p" << t << "_z";
    out << (t == ds.k ? "\n" : ",");
  }
  for (int i = 0; i < ds.n(); ++i) {
    for (int j = 0; j < ds.s; ++j) {
      std::snprintf(buf, sizeof buf, "%.17g,", ds.x(i, j));
      out << buf;
    }
    for (int j = 0; j < ds.y.cols(); ++j) {
      std::snprintf(buf, sizeof buf, "%.17g", ds.y(i, j));
      out << buf << (j + 1 == ds.y.cols() ? "\n" : ",");
    }
  }
  out.close();

  nlohmann::json meta;
  meta["s"] = ds.s;
  meta["k"] = ds.k;
  meta["n"] = ds.n();
  meta["seed"] = ds.seed;
  meta["scene"] = ds.scene_id;
  if (!ds.group.empty()) meta["location_group"] = ds.group;
  std::ofstream side(csv_path + ".json");
  side << meta.dump(2) << "\n";
}

Dataset load_dataset(const std::string& csv_path) {
  std::ifstream side(csv_path + ".json");
  if (!side) throw std::runtime_error("missing dataset sidecar: " + csv_path + ".json");
  nlohmann::json meta = nlohmann::json::parse(side);

  Dataset ds;
  ds.s = meta.at("s").get<int>();
  ds.k = meta.at("k").get<int>();
  int n = meta.at("n").get<int>();
  ds.seed = meta.at("seed").get<std::uint64_t>();
  ds.scene_id = meta.at("scene").get<std::string>();
  if (meta.contains("location_group"))
    ds.group = meta.at("location_group").get<std::vector<int>>();

  ds.x.resize(n, ds.s);
  ds.y.resize(n, 3 * (ds.k + 1));
  std::ifstream in(csv_path);
  if (!in) throw std::runtime_error("cannot open dataset: " + csv_path);
  std::string line;
  std::getline(in, line);  // header
  for (int i = 0; i < n; ++i) {
    if (!std::getline(in, line))
      throw std::runtime_error("dataset shorter than sidecar metadata");
    std::stringstream ss(line);
    std::string cell;
    for (int j = 0; j < ds.s; ++j) {
      std::getline(ss, cell, ',');
      ds.x(i, j) = std::stod(cell);
    }
    for (int j = 0; j < ds.y.cols(); ++j) {
      std::getline(ss, cell, ',');
      ds.y(i, j) = std::stod(cell);
    }
  }
  return ds;
}

}  // namespace twinbeam

#include <algorithm>
#include <cmath>
#include <set>

#include "doctest.h"
#include "twinbeam/codebook.hpp"

using namespace twinbeam;

namespace {

bool contains(const std::vector<Angles>& set, const Angles& a) {
  for (const auto& b : set)
    if (b.az == a.az && b.el == a.el) return true;
  return false;
}

// azimuth grid indices of the elevation-0 picks
std::vector<int> el0_indices(const Codebook& cb, const std::vector<Angles>& beams) {
  std::vector<int> idx;
  for (const auto& b : beams) {
    if (b.el != 0.0) continue;
    for (int i = 0; i < cb.n_az(); ++i)
      if (cb.azimuths[i] == b.az) idx.push_back(i);
  }
  std::sort(idx.begin(), idx.end());
  return idx;
}

}  // namespace

TEST_CASE("default codebook spans 21 azimuths by 3 elevations") {
  Codebook cb = default_codebook();
  CHECK(cb.size() == 63);
  CHECK(cb.n_az() == 21);
  CHECK(cb.m() == 3);
  CHECK(cb.azimuths.front() == doctest::Approx(deg2rad(-54.0)));
  CHECK(cb.azimuths.back() == doctest::Approx(deg2rad(54.0)));
  CHECK(cb.azimuths[10] == 0.0);  // exact midpoint
  for (int i = 1; i < cb.n_az(); ++i) {
    CHECK(cb.azimuths[i] > cb.azimuths[i - 1]);
    CHECK(rad2deg(cb.azimuths[i] - cb.azimuths[i - 1]) ==
          doctest::Approx(5.4).epsilon(1e-12));
  }
  CHECK(cb.elevations[0] == doctest::Approx(deg2rad(18.0)));
  CHECK(cb.elevations[1] == 0.0);
  CHECK(cb.elevations[2] == doctest::Approx(deg2rad(-18.0)));
  // listing order is elevation-major, azimuth ascending
  CHECK(cb.entries[0].el == cb.elevations[0]);
  CHECK(cb.entries[0].az == cb.azimuths[0]);
  CHECK(cb.entries[21].el == 0.0);
  CHECK(cb.entries[62].az == cb.azimuths[20]);
  // no duplicates
  std::set<std::pair<double, double>> uniq;
  for (const auto& e : cb.entries) uniq.insert({e.az, e.el});
  CHECK(uniq.size() == 63);
}

TEST_CASE("custom codebook step arithmetic") {
  Codebook cb = build_codebook(-10.0, 10.0, 5.0, {0.0});
  CHECK(cb.n_az() == 5);
  CHECK(cb.azimuths[2] == 0.0);
  CHECK_THROWS_AS(build_codebook(10.0, -10.0, 5.0, {0.0}), std::invalid_argument);
  CHECK_THROWS_AS(build_codebook(-10.0, 10.0, 0.0, {0.0}), std::invalid_argument);
  CHECK_THROWS_AS(build_codebook(-10.0, 10.0, 5.0, {}), std::invalid_argument);
}

TEST_CASE("beam subsets sweep the middle row first") {
  Codebook cb = default_codebook();
  for (int s = 1; s <= 63; ++s)
    CHECK(static_cast<int>(beam_subset(cb, s).size()) == s);

  std::vector<Angles> one = beam_subset(cb, 1);
  CHECK(one[0].az == 0.0);
  CHECK(one[0].el == 0.0);

  std::vector<Angles> three = beam_subset(cb, 3);
  CHECK(el0_indices(cb, three) == std::vector<int>{0, 10, 20});
  for (const auto& b : three) CHECK(b.el == 0.0);

  std::vector<Angles> five = beam_subset(cb, 5);
  CHECK(el0_indices(cb, five) == std::vector<int>{0, 5, 10, 15, 20});

  std::vector<Angles> eleven = beam_subset(cb, 11);
  CHECK(el0_indices(cb, eleven) == std::vector<int>{0, 2, 4, 6, 8, 10, 12, 14, 16, 18, 20});

  // 22 beams: the full middle row plus one pick on the +18 row
  std::vector<Angles> s22 = beam_subset(cb, 22);
  int up = 0, down = 0, mid = 0;
  for (const auto& b : s22) {
    if (b.el == 0.0) ++mid;
    if (b.el == cb.elevations[0]) ++up;
    if (b.el == cb.elevations[2]) ++down;
  }
  CHECK(mid == 21);
  CHECK(up == 1);
  CHECK(down == 0);

  // 63 beams covers the whole codebook
  std::vector<Angles> all = beam_subset(cb, 63);
  for (const auto& e : cb.entries) CHECK(contains(all, e));

  CHECK_THROWS_AS(beam_subset(cb, 0), std::out_of_range);
  CHECK_THROWS_AS(beam_subset(cb, 64), std::out_of_range);
}

TEST_CASE("smaller subsets nest inside compatible larger ones") {
  Codebook cb = default_codebook();
  auto nested = [&](int a, int b) {
    std::vector<Angles> small = beam_subset(cb, a);
    std::vector<Angles> big = beam_subset(cb, b);
    for (const auto& beam : small)
      if (!contains(big, beam)) return false;
    return true;
  };
  // (a-1) divides (b-1) for rows of 21
  CHECK(nested(3, 5));
  CHECK(nested(3, 7));
  CHECK(nested(3, 11));
  CHECK(nested(3, 21));
  CHECK(nested(5, 21));
  CHECK(nested(11, 21));
  CHECK(nested(21, 63));
  CHECK(nested(11, 63));
  CHECK(nested(3, 63));
}

TEST_CASE("evenly spread picks minimize the largest azimuth gap") {
  Codebook cb = default_codebook();
  for (int s : {3, 5, 7, 11, 21}) {
    std::vector<int> idx = el0_indices(cb, beam_subset(cb, s));
    REQUIRE(static_cast<int>(idx.size()) == s);
    CHECK(idx.front() == 0);
    CHECK(idx.back() == 20);
    int max_gap = 0;
    for (std::size_t i = 1; i < idx.size(); ++i)
      max_gap = std::max(max_gap, idx[i] - idx[i - 1]);
    // best achievable for endpoint-including picks
    int best = (20 + s - 2) / (s - 1);
    CHECK(max_gap == best);
  }
}

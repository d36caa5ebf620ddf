/* Copyright 2026 The persuade-ot Authors

   Licensed under the Apache License, Version 2.0 (the "License");
   you may not use this file except in compliance with the License.
   You may obtain a copy of the License at

       http://www.apache.org/licenses/LICENSE-2.0

   Unless required by applicable law or agreed to in writing, software
   distributed under the License is distributed on an "AS IS" BASIS,
   WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
   See the License for the specific language governing permissions and
   limitations under the License. */
#include <doctest.h>

#include "persuade/objective.hpp"
#include "persuade/random.hpp"

using namespace persuade;

namespace {

DiagramParams random_params(Rng &rng, int n, double weight_scale) {
  DiagramParams p;
  for (int i = 0; i < n; ++i) {
    p.sites.push_back({rng.uniform(0.05, 0.95), rng.uniform(0.05, 0.95)});
    p.weights.push_back(rng.uniform(-weight_scale, weight_scale));
  }
  return p;
}

ObjectiveConfig make_cfg(PayoffModel phi, double eps, double eta) {
  ObjectiveConfig c;
  c.payoff = std::move(phi);
  c.entropic.epsilon = eps;
  c.eta = eta;
  return c;
}

// Flattened parameter vector (x0, y0, x1, y1, ..., g0, g1, ...).
std::vector<double> flatten(const DiagramParams &p) {
  std::vector<double> v;
  for (const auto &s : p.sites) {
    v.push_back(s.x);
    v.push_back(s.y);
  }
  v.insert(v.end(), p.weights.begin(), p.weights.end());
  return v;
}

DiagramParams unflatten(const std::vector<double> &v, std::size_t n) {
  DiagramParams p;
  for (std::size_t i = 0; i < n; ++i) p.sites.push_back({v[2 * i], v[2 * i + 1]});
  p.weights.assign(v.begin() + static_cast<std::ptrdiff_t>(2 * n), v.end());
  return p;
}

std::vector<double> flatten(const ObjectiveGradient &g) {
  std::vector<double> v;
  for (const auto &s : g.d_sites) {
    v.push_back(s.x);
    v.push_back(s.y);
  }
  v.insert(v.end(), g.d_weights.begin(), g.d_weights.end());
  return v;
}

}  // namespace

TEST_CASE("hard objective: one cell is payoff at the prior mean") {
  const auto grid = build_grid(Rect::square(0, 2), 64);
  const MarketConfig m{1.0, 1.0, 0.0, 0.0, 2.0, Demand::unit};
  const PayoffModel phi{Monopolist{m}};
  const auto p = DiagramParams::with_zero_weights({{0.3, 1.7}});
  CHECK(hard_objective(p, grid, phi) == doctest::Approx(0.0).epsilon(1e-12));
  const PayoffModel bowl{ConcaveBowl{{1.0, 1.0}}};
  CHECK(hard_objective(p, grid, bowl) == doctest::Approx(1.0));
}

TEST_CASE("hard objective: linear payoff split at the midline") {
  const auto grid = build_grid(Rect::square(0, 1), 64);
  const PayoffModel phi{Affine{0.0, 1.0, 0.0}};
  const auto p = DiagramParams::with_zero_weights({{0.25, 0.5}, {0.75, 0.5}});
  const auto s = hard_cell_stats(hard_assign(p, grid), grid);
  CHECK(s.masses[0] * phi(*s.barycenters[0]) == doctest::Approx(0.5 * 0.25));
  CHECK(hard_objective(p, grid, phi) == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("hard objective skips empty cells") {
  const auto grid = build_grid(Rect::square(0, 1), 16);
  const PayoffModel phi{ConcaveBowl{}};
  const DiagramParams p{{{0.5, 0.5}, {40.0, 40.0}}, {0.0, -1e4}};
  CHECK(hard_objective(p, grid, phi) == doctest::Approx(1.0));
}

TEST_CASE("Jensen bound for a concave payoff") {
  Rng rng(7);
  const auto grid = build_grid(Rect::square(0, 1), 32);
  const PayoffModel phi{ConcaveBowl{}};
  const double top = phi(grid.barycenter());
  for (int t = 0; t < 50; ++t) {
    const auto p = random_params(rng, 1 + t % 9, 0.1);
    CHECK(hard_objective(p, grid, phi) <= top + 1e-12);
  }
}

TEST_CASE("penalty: one centered site is the prior variance") {
  const int res = 128;
  const auto grid = build_grid(Rect::square(0, 1), res);
  const auto p = DiagramParams::with_zero_weights({grid.barycenter()});
  const double h = 1.0 / res;
  const double pen = penalty_value(p, grid, {0.01});
  CHECK(pen == doctest::Approx(1.0 / 6.0 - h * h / 6.0).epsilon(1e-12));
  CHECK(std::abs(pen - 1.0 / 6.0) < 1e-4);
}

TEST_CASE("penalty: repulsion falls with separation") {
  const auto grid = build_grid(Rect::square(0, 1), 32);
  const EntropicConfig cfg{0.01};
  double prev = std::numeric_limits<double>::infinity();
  for (double d : {0.1, 0.2, 0.4, 0.8}) {
    const auto p = DiagramParams::with_zero_weights({{0.5 - d / 2, 0.5}, {0.5 + d / 2, 0.5}});
    ObjectiveConfig c = make_cfg(PayoffModel{ConcaveBowl{}}, 0.01, 1.0);
    const auto r = soft_objective(p, grid, c);
    // Symmetric: both masses one half, two ordered pairs.
    CHECK(r.repulsion_term == doctest::Approx(2 * 0.25 / (d * d)).epsilon(1e-9));
    CHECK(r.repulsion_term < prev);
    prev = r.repulsion_term;
    CHECK(penalty_value(p, grid, cfg) == doctest::Approx(r.quantization_term + r.repulsion_term));
  }
}

TEST_CASE("penalty: quantization term diverges as a site escapes") {
  const auto grid = build_grid(Rect::square(0, 1), 16);
  const EntropicConfig cfg{0.01};
  double prev = 0.0;
  for (double far : {2.0, 10.0, 100.0}) {
    // Large weight keeps the escaping site's cell occupied.
    const DiagramParams p{{{far, 0.5}, {0.5, 0.5}}, {far * far, 0.0}};
    const double pen = penalty_value(p, grid, cfg);
    CHECK(pen > prev);
    prev = pen;
  }
  CHECK(prev > 1e3);
}

TEST_CASE("coincident sites make the penalty singular") {
  const auto grid = build_grid(Rect::square(0, 1), 8);
  const DiagramParams p{{{0.5, 0.5}, {0.5, 0.5}}, {0.0, 0.0}};
  CHECK_THROWS_AS(penalty_value(p, grid, {0.1}), std::exception);
  const DiagramParams q{{{0.5, 0.5}, {0.5, 0.5 + 1e-200}}, {0.0, 0.0}};
  CHECK_THROWS(penalty_value(q, grid, {0.1}));
}

TEST_CASE("soft objective: one cell at any epsilon") {
  const auto grid = build_grid(Rect::square(0, 1), 32);
  const PayoffModel phi{TriModal{}};
  const auto p = DiagramParams::with_zero_weights({{0.1, 0.9}});
  for (double eps : {1e-3, 0.1, 10.0}) {
    const auto r = soft_objective(p, grid, make_cfg(phi, eps, 0.0));
    CHECK(r.value == doctest::Approx(phi(grid.barycenter())).epsilon(1e-12));
  }
}

TEST_CASE("soft objective converges to the hard objective") {
  const auto grid = build_grid(Rect::square(0, 1), 64);
  const PayoffModel phi{TriModal{}};
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    Rng rng(seed);
    const auto p = random_params(rng, 4, 0.02);
    const auto hs = hard_cell_stats(hard_assign(p, grid), grid);
    if (hs.occupied_count() != 4) continue;
    const double hard = hard_objective(hs, phi);
    double prev = std::numeric_limits<double>::infinity();
    for (double eps : {0.1, 0.01, 0.001}) {
      const double gap = std::abs(soft_objective(p, grid, make_cfg(phi, eps, 0.0)).value - hard);
      CHECK(gap < prev);
      prev = gap;
    }
    CHECK(prev < 5e-3);
  }
}

TEST_CASE("symmetric pair under a reflection-symmetric payoff") {
  const auto grid = build_grid(Rect::square(0, 1), 32);
  const PayoffModel phi{ConcaveBowl{}};
  const auto p = DiagramParams::with_zero_weights({{0.3, 0.5}, {0.7, 0.5}});
  const auto r = soft_objective(p, grid, make_cfg(phi, 0.02, 0.0));
  CHECK(r.per_cell[0].phi == doctest::Approx(r.per_cell[1].phi).epsilon(1e-12));
  CHECK(r.per_cell[0].mass == doctest::Approx(r.per_cell[1].mass).epsilon(1e-12));
}

TEST_CASE("report identity holds exactly") {
  Rng rng(9);
  const auto grid = build_grid(Rect::square(0, 1), 24);
  for (double eta : {0.0, 1e-3, 0.7}) {
    const auto p = random_params(rng, 5, 0.05);
    const auto r = soft_objective(p, grid, make_cfg(PayoffModel{TriModal{}}, 0.02, eta));
    CHECK(r.value == r.payoff_term - eta * r.penalty_term);
    CHECK(r.penalty_term == r.quantization_term + r.repulsion_term);
    double s = 0.0;
    for (const auto &c : r.per_cell) s += c.mass * c.phi;
    CHECK(s == doctest::Approx(r.payoff_term).epsilon(1e-12));
  }
}

TEST_CASE("objective value is shift invariant in the weights") {
  Rng rng(10);
  const auto grid = build_grid(Rect::square(0, 1), 24);
  for (int t = 0; t < 5; ++t) {
    auto p = random_params(rng, 4, 0.1);
    const auto cfg = make_cfg(PayoffModel{TriModal{}}, 0.05, 1e-3);
    const double a = soft_objective(p, grid, cfg).value;
    for (double &g : p.weights) g += 1.7;
    CHECK(std::abs(soft_objective(p, grid, cfg).value - a) < 1e-10);
  }
}

TEST_CASE("gradient: one cell") {
  const auto grid = build_grid(Rect::square(0, 1), 16);
  const double eta = 0.3;
  const auto p = DiagramParams::with_zero_weights({{0.2, 0.7}});
  const auto g = objective_gradient(p, grid, make_cfg(PayoffModel{TriModal{}}, 0.05, eta));
  CHECK(g.d_weights[0] == 0.0);
  Vec2 expect;
  const auto v = grid.view();
  for (std::size_t a = 0; a < v.size(); ++a) expect += (p.sites[0] - v.points[a]) * (2.0 * v.masses[a]);
  CHECK(g.d_sites[0].x == doctest::Approx(-eta * expect.x).epsilon(1e-12));
  CHECK(g.d_sites[0].y == doctest::Approx(-eta * expect.y).epsilon(1e-12));
}

TEST_CASE("gradient: constant payoff without penalty vanishes") {
  Rng rng(13);
  const auto grid = build_grid(Rect::square(0, 1), 24);
  const auto p = random_params(rng, 4, 0.1);
  const auto g = objective_gradient(p, grid, make_cfg(PayoffModel{Affine{2.5, 0, 0}}, 0.05, 0.0));
  CHECK(g.norm() < 1e-12);
}

TEST_CASE("gradient: weight derivatives sum to zero") {
  Rng rng(14);
  const auto grid = build_grid(Rect::square(0, 1), 24);
  for (int t = 0; t < 5; ++t) {
    const auto p = random_params(rng, 3 + t, 0.1);
    const auto g = objective_gradient(p, grid, make_cfg(PayoffModel{TriModal{}}, 0.03, 1e-3));
    double s = 0.0;
    for (double d : g.d_weights) s += d;
    CHECK(std::abs(s) < 1e-8);
  }
}

TEST_CASE("gradient matches central differences coordinate-wise") {
  const auto grid = build_grid(Rect::square(0, 1), 32);
  const auto cfg = make_cfg(PayoffModel{TriModal{}}, 0.1, 1e-3);
  const double h = 1e-5;
  for (std::uint64_t seed : {51u, 52u, 53u}) {
    Rng rng(seed);
    const auto p = random_params(rng, 3, 0.05);
    const auto an = flatten(objective_gradient(p, grid, cfg));
    const auto x = flatten(p);
    double scale = 0.0;
    for (double d : an) scale = std::max(scale, std::abs(d));
    for (std::size_t k = 0; k < x.size(); ++k) {
      auto up = x, dn = x;
      up[k] += h;
      dn[k] -= h;
      const double fd = (soft_objective(unflatten(up, 3), grid, cfg).value -
                         soft_objective(unflatten(dn, 3), grid, cfg).value) /
                        (2 * h);
      CHECK(std::abs(fd - an[k]) <= 1e-5 * std::max(std::abs(an[k]), scale));
    }
  }
}

TEST_CASE("gradient matches directional differences on random instances") {
  const auto grid = build_grid(Rect::square(0, 1), 24);
  const double t = 1e-5;
  int worst_index = -1;
  double worst = 0.0;
  for (int inst = 0; inst < 20; ++inst) {
    Rng rng(1000 + inst);
    const int n = 2 + inst % 5;
    const auto p = random_params(rng, n, 0.05);
    const PayoffModel phi = inst % 2 ? PayoffModel{TriModal{}} : PayoffModel{ConcaveBowl{}};
    const auto cfg = make_cfg(phi, rng.uniform(0.01, 0.1), inst % 3 == 0 ? 0.0 : 1e-3);
    const auto an = flatten(objective_gradient(p, grid, cfg));
    const auto x = flatten(p);
    std::vector<double> dir(x.size());
    for (double &d : dir) d = rng.uniform(-1.0, 1.0);
    double analytic = 0.0;
    auto up = x, dn = x;
    for (std::size_t k = 0; k < x.size(); ++k) {
      analytic += an[k] * dir[k];
      up[k] += t * dir[k];
      dn[k] -= t * dir[k];
    }
    const double fd = (soft_objective(unflatten(up, n), grid, cfg).value -
                       soft_objective(unflatten(dn, n), grid, cfg).value) /
                      (2 * t);
    const double rel = std::abs(fd - analytic) / std::max(std::abs(analytic), 1e-8);
    if (rel > worst) {
      worst = rel;
      worst_index = inst;
    }
  }
  INFO("worst instance " << worst_index);
  CHECK(worst < 1e-4);
}

TEST_CASE("adjoint and forward gradients agree") {
  const auto grid = build_grid(Rect::square(0, 1), 20);
  Rng rng(77);
  for (int t = 0; t < 4; ++t) {
    const auto p = random_params(rng, 2 + t, 0.05);
    const auto cfg = make_cfg(PayoffModel{TriModal{}}, 0.03, 1e-2);
    const auto a = flatten(objective_gradient(p, grid, cfg));
    const auto f = flatten(objective_gradient_forward(p, grid, cfg));
    for (std::size_t k = 0; k < a.size(); ++k) CHECK(a[k] == doctest::Approx(f[k]).epsilon(1e-10).scale(1.0));
  }
}

TEST_CASE("negative eta is rejected") {
  ObjectiveConfig c;
  c.eta = -1.0;
  CHECK_THROWS_AS(c.validate(), InvalidParams);
}

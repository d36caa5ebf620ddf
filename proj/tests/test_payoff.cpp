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

#include <algorithm>

#include "persuade/payoff.hpp"
#include "persuade/random.hpp"

using namespace persuade;

namespace {

bool is_ccw_convex(const Polygon &p) {
  const std::size_t n = p.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2 e1 = p[(i + 1) % n] - p[i], e2 = p[(i + 2) % n] - p[(i + 1) % n];
    if (e1.x * e2.y - e1.y * e2.x < -1e-12) return false;
  }
  return true;
}

MarketConfig random_market(Rng &rng) {
  MarketConfig m;
  m.p1 = rng.uniform(0.2, 2.0);
  m.p2 = rng.uniform(0.2, 2.0);
  m.q_min = rng.uniform(0.0, 0.5);
  m.q_max = m.q_min + rng.uniform(0.5, 2.0);
  m.demand = rng.uniform() < 0.5 ? Demand::unit : Demand::additive;
  m.delta = rng.uniform(-0.9, 1.0) * std::min(m.p1, m.p2);
  return m;
}

Vec2 random_quality(Rng &rng, const MarketConfig &m) {
  return {rng.uniform(m.q_min, m.q_max), rng.uniform(m.q_min, m.q_max)};
}

// Utility-maximizing choice at one valuation, lowest index on ties.
int choice(const Vec2 &v, const Vec2 &q, const MarketConfig &m) {
  double u[4] = {0.0, q.x * v.x - m.p1, q.y * v.y - m.p2, q.x * v.x + q.y * v.y - m.p3()};
  const int k = m.demand == Demand::additive ? 4 : 3;
  return static_cast<int>(std::max_element(u, u + k) - u);
}

}  // namespace

TEST_CASE("polygon area examples") {
  CHECK(polygon_area(unit_square()) == 1.0);
  CHECK(polygon_area({}) == 0.0);
  CHECK(polygon_area({{0, 0}, {1, 1}}) == 0.0);
  CHECK(polygon_area({{0, 0}, {1, 0}, {0, 1}}) == 0.5);
  CHECK(polygon_area({{0, 0}, {0, 1}, {1, 0}}) == 0.5);
}

TEST_CASE("half-plane clip examples") {
  const auto half = clip_halfplane(unit_square(), {{1, 0}, 0.5});
  CHECK(half.size() == 4);
  CHECK(polygon_area(half) == doctest::Approx(0.5));
  for (const auto &v : half) CHECK(v.x <= 0.5);

  const auto same = clip_halfplane(unit_square(), {{1, 1}, 5.0});
  CHECK(same == unit_square());

  const auto tri = clip_halfplane(unit_square(), {{1, 1}, 1.0});
  CHECK(polygon_area(tri) == doctest::Approx(0.5));
  CHECK(is_ccw_convex(tri));

  CHECK(clip_halfplane(unit_square(), {{1, 0}, -0.1}).empty());
  CHECK(clip_halfplane({}, {{1, 0}, 0.0}).empty());
}

TEST_CASE("breakdown: no sales at q = (1, 1), p = (1, 1)") {
  const MarketConfig m{1.0, 1.0, 0.0, 0.0, 2.0, Demand::unit};
  const auto b = purchase_breakdown({1, 1}, m);
  CHECK(b.c(0) == doctest::Approx(1.0));
  CHECK(b.c(1) == doctest::Approx(0.0));
  CHECK(b.c(2) == doctest::Approx(0.0));
  CHECK(b.c(3) == 0.0);
  CHECK(revenue({1, 1}, m) == doctest::Approx(0.0));
}

TEST_CASE("breakdown: q = 1.125, p = (1, 1.25) sells good one to 1/9") {
  const MarketConfig m{1.0, 1.25, 0.0, 0.25, 2.0, Demand::unit};
  const auto b = purchase_breakdown({1.125, 1.125}, m);
  CHECK(b.c(1) == doctest::Approx(1.0 / 9.0).epsilon(1e-12));
  CHECK(b.c(2) == doctest::Approx(0.0));
  CHECK(revenue({1.125, 1.125}, m) == doctest::Approx(1.0 / 9.0).epsilon(1e-12));
  CHECK(revenue({1.125, 1.125}, m) == doctest::Approx(0.1111).epsilon(1e-3));
}

TEST_CASE("breakdown: discounted bundle sells to half the square") {
  const MarketConfig m{1.0, 1.0, -1.0, 0.0, 2.0, Demand::additive};
  const auto b = purchase_breakdown({1, 1}, m);
  CHECK(b.c(3) == doctest::Approx(0.5));
  CHECK(b.c(1) == doctest::Approx(0.0));
  CHECK(b.c(2) == doctest::Approx(0.0));
  CHECK(revenue({1, 1}, m) == doctest::Approx(0.5));
}

TEST_CASE("probabilities partition the square and regions are convex") {
  Rng rng(101);
  for (int t = 0; t < 1000; ++t) {
    const auto m = random_market(rng);
    const auto q = random_quality(rng, m);
    const auto b = purchase_breakdown(q, m);
    double total = 0.0;
    for (int k = 0; k < 4; ++k) {
      CHECK(b.c(k) >= 0.0);
      CHECK(b.c(k) <= 1.0 + 1e-15);
      total += b.c(k);
      const auto &r = b.regions[static_cast<std::size_t>(k)];
      CHECK(std::abs(polygon_area(r) - b.c(k)) < 1e-12);
      CHECK(is_ccw_convex(r));
      for (const auto &v : r) CHECK(Rect::square(-1e-12, 1 + 1e-12).contains(v));
    }
    CHECK(std::abs(total - 1.0) < 1e-12);
    if (m.demand == Demand::unit) CHECK(b.c(3) == 0.0);
  }
}

TEST_CASE("zero quality means the good is never bought") {
  const MarketConfig m{0.5, 0.5, 0.0, 0.0, 2.0, Demand::unit};
  const auto b = purchase_breakdown({0.0, 1.5}, m);
  CHECK(b.c(1) == 0.0);
  CHECK(b.c(2) == doctest::Approx(1.0 - 0.5 / 1.5));
}

TEST_CASE("unit demand: good one sales rise with q1 and fall with p1") {
  MarketConfig m{1.0, 1.0, 0.0, 0.0, 2.0, Demand::unit};
  for (double q2 : {0.5, 1.0, 1.5}) {
    for (double p1 : {0.5, 1.0, 1.5}) {
      m.p1 = p1;
      double prev = -1.0;
      for (int k = 0; k <= 40; ++k) {
        const double c1 = purchase_breakdown({0.05 * k, q2}, m).c(1);
        CHECK(c1 >= prev - 1e-14);
        prev = c1;
      }
    }
    for (double q1 : {0.5, 1.0, 1.9}) {
      double prev = 2.0;
      for (int k = 1; k <= 40; ++k) {
        m.p1 = 0.05 * k;
        const double c1 = purchase_breakdown({q1, q2}, m).c(1);
        CHECK(c1 <= prev + 1e-14);
        prev = c1;
      }
    }
  }
}

TEST_CASE("exact areas agree with midpoint quadrature") {
  Rng rng(202);
  const int res = 512;
  for (int t = 0; t < 8; ++t) {
    const auto m = random_market(rng);
    const auto q = random_quality(rng, m);
    const auto b = purchase_breakdown(q, m);
    std::array<double, 4> counts{};
    for (int r = 0; r < res; ++r)
      for (int c = 0; c < res; ++c)
        counts[static_cast<std::size_t>(choice({(c + 0.5) / res, (r + 0.5) / res}, q, m))] += 1.0;
    for (int k = 0; k < 4; ++k) CHECK(std::abs(counts[static_cast<std::size_t>(k)] / (res * res) - b.c(k)) < 2e-3);
  }
}

TEST_CASE("revenue is bounded by the highest price") {
  Rng rng(303);
  for (int t = 0; t < 1000; ++t) {
    const auto m = random_market(rng);
    const double r = revenue(random_quality(rng, m), m);
    CHECK(r >= 0.0);
    CHECK(r <= std::max({m.p1, m.p2, m.p3()}) + 1e-12);
  }
}

TEST_CASE("additive demand with a prohibitive surcharge reduces to unit demand") {
  Rng rng(404);
  for (int t = 0; t < 200; ++t) {
    MarketConfig u = random_market(rng);
    u.demand = Demand::unit;
    MarketConfig a = u;
    a.demand = Demand::additive;
    a.delta = 2.0 * u.q_max + 1.0;  // bundle utility can never beat a single good
    const auto q = random_quality(rng, u);
    const auto bu = purchase_breakdown(q, u), ba = purchase_breakdown(q, a);
    CHECK(ba.c(3) == 0.0);
    for (int k = 0; k < 3; ++k) CHECK(std::abs(ba.c(k) - bu.c(k)) < 1e-12);
    CHECK(revenue(q, a) == doctest::Approx(revenue(q, u)).epsilon(1e-12));
  }
}

TEST_CASE("invalid markets are rejected") {
  CHECK_THROWS_AS(MarketConfig({0.0, 1.0}).validate(), InvalidParams);
  CHECK_THROWS_AS(MarketConfig({1.0, 1.0, 0.0, 2.0, 2.0}).validate(), InvalidParams);
  CHECK_THROWS_AS(MarketConfig({1.0, 1.0, -2.0, 0.0, 2.0, Demand::additive}).validate(), InvalidParams);
  CHECK_THROWS_AS(PayoffModel(Monopolist{{0.0, 1.0}}), InvalidParams);
}

TEST_CASE("concave bowl peaks at the center") {
  const PayoffModel phi{ConcaveBowl{}};
  CHECK(phi({0.5, 0.5}) == 1.0);
  CHECK(phi.grad({0.5, 0.5}) == Vec2{0.0, 0.0});
  CHECK(phi({0.0, 0.0}) == doctest::Approx(0.5));
  CHECK(phi.gradient_mode() == GradientMode::analytic);
  CHECK(phi.name() == "concave_bowl");
}

TEST_CASE("tri-modal modes have equal height") {
  const TriModal spec;
  const PayoffModel phi{spec};
  for (const auto &c : spec.centers) CHECK(std::abs(phi(c) - spec.height) < 1e-9);
  // Modes are local maxima.
  for (const auto &c : spec.centers) {
    CHECK(norm(phi.grad(c)) < 0.1);
    for (const Vec2 d : {Vec2{0.03, 0}, Vec2{0, 0.03}, Vec2{-0.03, 0}, Vec2{0, -0.03}})
      CHECK(phi(c + d) < phi(c));
  }
  CHECK(phi({0.5, 0.6}) < 0.9);
}

TEST_CASE("analytic gradients of synthetic payoffs match differences") {
  Rng rng(505);
  const double h = 1e-6;
  for (const PayoffModel &phi :
       {PayoffModel{ConcaveBowl{}}, PayoffModel{TriModal{}}, PayoffModel{Affine{0.1, 2.0, -3.0}}}) {
    for (int t = 0; t < 20; ++t) {
      const Vec2 y{rng.uniform(), rng.uniform()};
      const Vec2 g = phi.grad(y);
      CHECK(g.x == doctest::Approx((phi({y.x + h, y.y}) - phi({y.x - h, y.y})) / (2 * h)).epsilon(1e-6));
      CHECK(g.y == doctest::Approx((phi({y.x, y.y + h}) - phi({y.x, y.y - h})) / (2 * h)).epsilon(1e-6));
    }
  }
}

TEST_CASE("revenue gradient agrees with a coarser stencil at a smooth point") {
  const MarketConfig m{1.0, 1.0, 0.0, 0.0, 2.0, Demand::unit};
  const PayoffModel fine{Monopolist{m}};
  CHECK(fine.gradient_mode() == GradientMode::central_difference);
  CHECK(fine.fd_step() == doctest::Approx(2e-4));
  const PayoffModel coarse{Monopolist{m}, GradientMode::central_difference, 1e-3};
  for (const Vec2 q : {Vec2{1.5, 1.2}, Vec2{1.8, 0.6}, Vec2{1.3, 1.7}}) {
    const Vec2 a = fine.grad(q), b = coarse.grad(q);
    CHECK(std::abs(a.x - b.x) <= 1e-3 * std::abs(a.x));
    CHECK(std::abs(a.y - b.y) <= 1e-3 * std::max(std::abs(a.y), 1e-12));
  }
  CHECK_THROWS_AS(PayoffModel(Monopolist{m}, GradientMode::analytic, 1e-3), InvalidParams);
  CHECK_THROWS_AS(PayoffModel(ConcaveBowl{}, GradientMode::central_difference, 0.0), InvalidParams);
}

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
#include "persuade/payoff.hpp"

#include <Eigen/Dense>
#include <algorithm>

namespace persuade {

Polygon clip_halfplane(const Polygon &polygon, const HalfPlane &hp) {
  Polygon out;
  const std::size_t n = polygon.size();
  if (n == 0) return out;
  out.reserve(n + 1);
  auto side = [&](const Vec2 &p) { return dot(hp.normal, p) - hp.offset; };
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2 &cur = polygon[i];
    const Vec2 &nxt = polygon[(i + 1) % n];
    const double sc = side(cur), sn = side(nxt);
    if (sc <= 0.0) out.push_back(cur);
    if ((sc < 0.0 && sn > 0.0) || (sc > 0.0 && sn < 0.0)) {
      const double t = sc / (sc - sn);
      out.push_back(cur + (nxt - cur) * t);
    }
  }
  if (out.size() < 3) out.clear();
  return out;
}

double polygon_area(const Polygon &polygon) {
  if (polygon.size() < 3) return 0.0;
  double twice = 0.0;
  for (std::size_t i = 0; i < polygon.size(); ++i) {
    const Vec2 &a = polygon[i];
    const Vec2 &b = polygon[(i + 1) % polygon.size()];
    twice += a.x * b.y - a.y * b.x;
  }
  return 0.5 * std::abs(twice);
}

Polygon unit_square() { return {{0.0, 0.0}, {1.0, 0.0}, {1.0, 1.0}, {0.0, 1.0}}; }

void MarketConfig::validate() const {
  if (!(p1 > 0.0) || !(p2 > 0.0)) throw InvalidParams("market prices p1, p2 must be positive");
  if (!(q_min < q_max)) throw InvalidParams("market needs q_min < q_max");
  if (demand == Demand::additive && !(p3() > 0.0))
    throw InvalidParams("bundle price p1 + p2 + delta must be positive");
}

namespace {

// Buyer utility u(v) = a . v - price for each purchase option.
struct Utility {
  Vec2 slope;
  double price;
};

}  // namespace

PurchaseBreakdown purchase_breakdown(const Vec2 &q, const MarketConfig &market) {
  std::vector<Utility> options = {
      {{0.0, 0.0}, 0.0},
      {{q.x, 0.0}, market.p1},
      {{0.0, q.y}, market.p2},
  };
  if (market.demand == Demand::additive) options.push_back({{q.x, q.y}, market.p3()});

  PurchaseBreakdown out;
  for (std::size_t k = 0; k < options.size(); ++k) {
    Polygon region = unit_square();
    // Option k is chosen where u_j - u_k <= 0 for every other option j.
    for (std::size_t j = 0; j < options.size() && !region.empty(); ++j) {
      if (j == k) continue;
      const HalfPlane hp{options[j].slope - options[k].slope, options[j].price - options[k].price};
      region = clip_halfplane(region, hp);
    }
    out.probabilities[k] = polygon_area(region);
    out.regions[k] = std::move(region);
  }
  return out;
}

double revenue(const Vec2 &q, const MarketConfig &market) {
  const auto b = purchase_breakdown(q, market);
  double r = market.p1 * b.c(1) + market.p2 * b.c(2);
  if (market.demand == Demand::additive) r += market.p3() * b.c(3);
  return r;
}

namespace {

double gaussian(const Vec2 &y, const Vec2 &c, double sigma) {
  return std::exp(-squared_distance(y, c) / (2.0 * sigma * sigma));
}

struct DefaultMode {
  GradientMode operator()(const Monopolist &) const { return GradientMode::central_difference; }
  template <class T>
  GradientMode operator()(const T &) const {
    return GradientMode::analytic;
  }
};

struct DefaultStep {
  double operator()(const Monopolist &m) const { return 1e-4 * (m.market.q_max - m.market.q_min); }
  template <class T>
  double operator()(const T &) const {
    return 1e-6;
  }
};

}  // namespace

PayoffModel::PayoffModel(Kind kind)
    : PayoffModel(kind, std::visit(DefaultMode{}, kind), std::visit(DefaultStep{}, kind)) {}

PayoffModel::PayoffModel(Kind kind, GradientMode mode, double step)
    : kind_(std::move(kind)), mode_(mode), step_(step) {
  if (!(step_ > 0.0)) throw InvalidParams("finite-difference step must be positive");
  if (const auto *m = std::get_if<Monopolist>(&kind_)) {
    m->market.validate();
    if (mode_ == GradientMode::analytic)
      throw InvalidParams("monopolist revenue has no analytic gradient");
  }
  if (const auto *t = std::get_if<TriModal>(&kind_)) {
    if (!(t->sigma > 0.0)) throw InvalidParams("tri-modal sigma must be positive");
    Eigen::Matrix3d gram;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) gram(i, j) = gaussian(t->centers[i], t->centers[j], t->sigma);
    const Eigen::Vector3d a = gram.fullPivLu().solve(Eigen::Vector3d::Constant(t->height));
    for (int i = 0; i < 3; ++i) amplitudes_[i] = a(i);
  }
}

std::string PayoffModel::name() const {
  struct V {
    std::string operator()(const ConcaveBowl &) const { return "concave_bowl"; }
    std::string operator()(const TriModal &) const { return "tri_modal"; }
    std::string operator()(const Affine &) const { return "affine"; }
    std::string operator()(const Monopolist &) const { return "monopolist"; }
  };
  return std::visit(V{}, kind_);
}

double PayoffModel::eval_analytic_grad(const Vec2 &y, Vec2 *g) const {
  if (const auto *b = std::get_if<ConcaveBowl>(&kind_)) {
    const Vec2 d = y - b->center;
    if (g) *g = d * (-2.0 * b->curvature);
    return b->height - b->curvature * squared_norm(d);
  }
  if (const auto *t = std::get_if<TriModal>(&kind_)) {
    double v = 0.0;
    Vec2 grad;
    for (int i = 0; i < 3; ++i) {
      const double e = amplitudes_[i] * gaussian(y, t->centers[i], t->sigma);
      v += e;
      grad += (t->centers[i] - y) * (e / (t->sigma * t->sigma));
    }
    if (g) *g = grad;
    return v;
  }
  if (const auto *a = std::get_if<Affine>(&kind_)) {
    if (g) *g = {a->c1, a->c2};
    return a->c0 + a->c1 * y.x + a->c2 * y.y;
  }
  const auto &m = std::get<Monopolist>(kind_);
  if (g) *g = {std::nan(""), std::nan("")};
  return revenue(y, m.market);
}

double PayoffModel::eval(const Vec2 &y) const { return eval_analytic_grad(y, nullptr); }

Vec2 PayoffModel::grad(const Vec2 &y) const {
  if (mode_ == GradientMode::analytic) {
    Vec2 g;
    eval_analytic_grad(y, &g);
    return g;
  }
  const double h = step_;
  return {(eval({y.x + h, y.y}) - eval({y.x - h, y.y})) / (2.0 * h),
          (eval({y.x, y.y + h}) - eval({y.x, y.y - h})) / (2.0 * h)};
}

}  // namespace persuade

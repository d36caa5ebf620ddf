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
#pragma once

#include <array>
#include <string>
#include <variant>
#include <vector>

#include "persuade/core.hpp"

namespace persuade {

// ---------------------------------------------------------------------------
// Convex polygon utilities

using Polygon = std::vector<Vec2>;

/// Closed half-plane { v : normal . v <= offset }.
struct HalfPlane {
  Vec2 normal;
  double offset = 0.0;
};

/// Sutherland-Hodgman clip of a counterclockwise convex polygon. The result is
/// convex and counterclockwise, possibly empty.
Polygon clip_halfplane(const Polygon &polygon, const HalfPlane &halfplane);

/// Shoelace area, absolute value. Zero for fewer than three vertices.
double polygon_area(const Polygon &polygon);

Polygon unit_square();

// ---------------------------------------------------------------------------
// Monopolist market

enum class Demand { unit, additive };

struct MarketConfig {
  double p1 = 1.0;
  double p2 = 1.0;
  double delta = 0.0;  // bundle price p3 = p1 + p2 + delta
  double q_min = 0.0;
  double q_max = 2.0;
  Demand demand = Demand::unit;

  double p3() const { return p1 + p2 + delta; }
  Rect quality_bounds() const { return Rect::square(q_min, q_max); }
  void validate() const;
};

/// Purchase probabilities under uniform valuations on [0,1]^2.
/// Index 0: nothing, 1: only good 1, 2: only good 2, 3: bundle.
struct PurchaseBreakdown {
  std::array<double, 4> probabilities{};
  std::array<Polygon, 4> regions;

  double c(int k) const { return probabilities[static_cast<std::size_t>(k)]; }
};

/// Regions of valuation space where each purchase option maximizes the
/// buyer's utility at expected qualities `q`, clipped exactly from the unit
/// square.
PurchaseBreakdown purchase_breakdown(const Vec2 &q, const MarketConfig &market);

/// Seller revenue p1 c1 + p2 c2 + p3 c3.
double revenue(const Vec2 &q, const MarketConfig &market);

// ---------------------------------------------------------------------------
// Sender payoff models

/// Phi(y) = height - curvature |y - center|^2.
struct ConcaveBowl {
  Vec2 center{0.5, 0.5};
  double height = 1.0;
  double curvature = 1.0;
};

/// Gaussian bumps whose amplitudes are solved so that Phi equals `height`
/// exactly at every listed center.
struct TriModal {
  std::array<Vec2, 3> centers{Vec2{0.5, 0.25}, Vec2{0.75, 0.75}, Vec2{0.25, 0.75}};
  double sigma = 0.12;
  double height = 1.0;
};

/// Phi(y) = c0 + c1 y.x + c2 y.y.
struct Affine {
  double c0 = 0.0;
  double c1 = 0.0;
  double c2 = 0.0;
};

struct Monopolist {
  MarketConfig market;
};

enum class GradientMode { analytic, central_difference };

class PayoffModel {
 public:
  using Kind = std::variant<ConcaveBowl, TriModal, Affine, Monopolist>;

  PayoffModel(Kind kind);  // NOLINT(google-explicit-constructor)
  /// Forces central differences with absolute step `step` for any kind.
  PayoffModel(Kind kind, GradientMode mode, double step);

  const Kind &kind() const { return kind_; }
  GradientMode gradient_mode() const { return mode_; }
  double fd_step() const { return step_; }
  std::string name() const;

  double operator()(const Vec2 &y) const { return eval(y); }
  double eval(const Vec2 &y) const;
  Vec2 grad(const Vec2 &y) const;

 private:
  double eval_analytic_grad(const Vec2 &y, Vec2 *g) const;

  Kind kind_;
  GradientMode mode_;
  double step_;
  std::array<double, 3> amplitudes_{};  // TriModal only
};

inline double phi_eval(const PayoffModel &model, const Vec2 &y) { return model.eval(y); }
inline Vec2 phi_grad(const PayoffModel &model, const Vec2 &y) { return model.grad(y); }

}  // namespace persuade

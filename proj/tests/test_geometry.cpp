#include <cmath>
#include <random>

#include "doctest.h"
#include "splitsys/geometry.hpp"

using namespace splitsys;

namespace {

Vector vec2(double a, double b) {
  Vector v(2);
  v << a, b;
  return v;
}

Vector sample_box(std::mt19937_64& rng, Index n, double half) {
  std::uniform_real_distribution<double> u(-half, half);
  Vector v(n);
  for (Index i = 0; i < n; ++i) v[i] = u(rng);
  return v;
}

}  // namespace

TEST_CASE("box projection clamps componentwise") {
  ConvexSet C = ConvexSet::box(vec2(0, 0), vec2(1, 1));
  CHECK((C.project(vec2(2, -1)) - vec2(1, 0)).norm() == 0.0);
  CHECK((C.project(vec2(0.3, 0.7)) - vec2(0.3, 0.7)).norm() == 0.0);
  CHECK(C.contains(vec2(1, 1)));
  CHECK_FALSE(C.contains(vec2(1.1, 0)));
}

TEST_CASE("ball projection is radial") {
  ConvexSet inside = ConvexSet::ball(vec2(0, 0), 2.0);
  CHECK((inside.project(vec2(0, 1)) - vec2(0, 1)).norm() == 0.0);

  ConvexSet C = ConvexSet::ball(vec2(1, 1), 1.0);
  Vector p = C.project(vec2(3, 1));
  CHECK((p - vec2(2, 1)).norm() <= 1e-12);

  // cross-check against the nearest point on a dense angular grid of the circle
  Vector best = vec2(0, 0);
  double best_d = 1e300;
  for (double t = 0.0; t < 2.0 * M_PI; t += 1e-4) {
    Vector q = vec2(1 + std::cos(t), 1 + std::sin(t));
    double d = (q - vec2(3, 1)).norm();
    if (d < best_d) {
      best_d = d;
      best = q;
    }
  }
  CHECK((best - p).norm() <= 1e-3);
  CHECK((p - vec2(3, 1)).norm() <= best_d + 1e-9);
}

TEST_CASE("hyperplane and halfspace set projections") {
  ConvexSet H = ConvexSet::hyperplane(vec2(0, 2), 2.0);
  Vector p = H.project(vec2(3, 5));
  CHECK((p - vec2(3, 1)).norm() <= 1e-12);
  CHECK(std::abs(vec2(0, 2).dot(p) - 2.0) <= 1e-12);

  ConvexSet S = ConvexSet::halfspace(vec2(1, 0), vec2(0, 0));
  CHECK((S.project(vec2(-1, 5)) - vec2(-1, 5)).norm() == 0.0);
  CHECK((S.project(vec2(2, 3)) - vec2(0, 3)).norm() <= 1e-12);

  ConvexSet W = ConvexSet::whole_space(2);
  CHECK((W.project(vec2(4, -4)) - vec2(4, -4)).norm() == 0.0);
}

TEST_CASE("halfspace displacement projection") {
  CHECK((project_halfspace({vec2(1, 0), vec2(0, 0)}, vec2(2, 3)) - vec2(0, 3)).norm() <= 1e-15);
  CHECK((project_halfspace({vec2(1, 0), vec2(0, 0)}, vec2(-1, 5)) - vec2(-1, 5)).norm() == 0.0);

  Vector p = project_halfspace({vec2(1, 1), vec2(1, 0)}, vec2(2, 1));
  CHECK((p - vec2(1, 0)).norm() <= 1e-12);

  // optimality of the hand value: no point of the boundary line gets closer to z
  Vector d = vec2(1, -1) / std::sqrt(2.0);
  double best_d = 1e300;
  Vector best = vec2(0, 0);
  for (double t = -3.0; t <= 3.0; t += 1e-4) {
    Vector y = vec2(1, 0) + t * d;
    double dist = (y - vec2(2, 1)).norm();
    if (dist < best_d) {
      best_d = dist;
      best = y;
    }
  }
  CHECK((best - p).norm() <= 1e-3);
  CHECK((p - vec2(2, 1)).norm() <= best_d + 1e-9);

  // degenerate normal keeps z
  CHECK((project_halfspace({vec2(0, 0), vec2(1, 0)}, vec2(2, 1)) - vec2(2, 1)).norm() == 0.0);
}

TEST_CASE("halfspace membership tolerance") {
  Halfspace h{vec2(1, 1), vec2(1, 0)};
  CHECK(h.contains(vec2(1, 0)));
  CHECK(h.contains(vec2(0, 0)));
  CHECK(h.contains(vec2(1.0 + 5e-13, 0)));
  CHECK_FALSE(h.contains(vec2(1.1, 0)));
}

TEST_CASE("project_halfspace matches the halfspace set kind") {
  std::mt19937_64 rng(71);
  Halfspace h{vec2(0.3, -1.2), vec2(0.5, 0.25)};
  ConvexSet S = ConvexSet::halfspace(h.normal, h.anchor);
  for (int t = 0; t < 200; ++t) {
    Vector z = sample_box(rng, 2, 4.0);
    CHECK((project_halfspace(h, z) - S.project(z)).norm() <= 1e-12);
  }
}

TEST_CASE("sampled projection properties per set kind") {
  std::mt19937_64 rng(929);
  std::vector<ConvexSet> sets;
  sets.push_back(ConvexSet::box(vec2(-1, -0.5), vec2(0.75, 2)));
  sets.push_back(ConvexSet::ball(vec2(0.4, -0.1), 1.3));
  sets.push_back(ConvexSet::halfspace(vec2(1, -2), vec2(0.1, 0.1)));
  sets.push_back(ConvexSet::hyperplane(vec2(2, 1), 0.7));
  sets.push_back(ConvexSet::whole_space(2));

  for (const ConvexSet& C : sets) {
    for (int t = 0; t < 500; ++t) {
      Vector x = sample_box(rng, 2, 3.0);
      Vector y = sample_box(rng, 2, 3.0);
      Vector px = C.project(x);
      Vector py = C.project(y);

      // contraction with displacement
      double lhs = (px - py).squaredNorm();
      double rhs = (x - y).squaredNorm() - ((px - x) - (py - y)).squaredNorm();
      CHECK(lhs <= rhs + 1e-9);

      // obtuse angle against a set member
      Vector member = C.project(sample_box(rng, 2, 3.0));
      CHECK((x - px).dot(member - px) <= 1e-10);

      // idempotence and feasibility
      CHECK((C.project(px) - px).norm() <= 1e-12);
      CHECK(C.distance(px) <= 1e-10);
    }
  }
}

TEST_CASE("bounding boxes enclose the set") {
  ConvexSet B = ConvexSet::ball(vec2(1, -1), 2.0);
  BoxRegion r = B.bounding_box();
  CHECK(r.lo[0] <= -1.0);
  CHECK(r.hi[0] >= 3.0);

  BoxRegion w = ConvexSet::whole_space(2).bounding_box(5.0);
  CHECK(w.lo[0] == -5.0);
  CHECK(w.hi[1] == 5.0);
}

TEST_CASE("degenerate set constructions are rejected") {
  CHECK_THROWS_AS(ConvexSet::box(vec2(1, 0), vec2(0, 1)), ConfigError);
  CHECK_THROWS_AS(ConvexSet::ball(vec2(0, 0), -1.0), ConfigError);
}

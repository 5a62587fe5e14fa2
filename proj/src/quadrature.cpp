#include <cmath>
#include <stdexcept>

#include "fsi/fem.hpp"

namespace fsi {
namespace {

QuadratureRule make_centroid() {
  return {1, {{{1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0}}}, {0.5}};
}

QuadratureRule make_midpoint() {
  // Edge midpoints, exact through degree 2.
  return {2,
          {{{0.5, 0.5, 0.0}}, {{0.0, 0.5, 0.5}}, {{0.5, 0.0, 0.5}}},
          {1.0 / 6.0, 1.0 / 6.0, 1.0 / 6.0}};
}

void push_sym3(QuadratureRule& r, double a, double b, double w) {
  // The three permutations of (a, b, b).
  r.points.push_back({a, b, b});
  r.points.push_back({b, a, b});
  r.points.push_back({b, b, a});
  r.weights.insert(r.weights.end(), 3, w);
}

void push_sym6(QuadratureRule& r, double a, double b, double c, double w) {
  r.points.push_back({a, b, c});
  r.points.push_back({a, c, b});
  r.points.push_back({b, a, c});
  r.points.push_back({b, c, a});
  r.points.push_back({c, a, b});
  r.points.push_back({c, b, a});
  r.weights.insert(r.weights.end(), 6, w);
}

QuadratureRule make_degree4() {
  // Six-point rule (two 3-fold orbits), exact through degree 4. Weights are
  // given on a unit-sum basis and scaled by the reference area 1/2.
  QuadratureRule r;
  r.degree = 4;
  push_sym3(r, 0.108103018168070, 0.445948490915965, 0.223381589678011 / 2.0);
  push_sym3(r, 0.816847572980459, 0.091576213509771, 0.109951743655322 / 2.0);
  return r;
}

QuadratureRule make_degree6() {
  // Twelve-point rule, exact through degree 6 (covers bubble*bubble mass).
  QuadratureRule r;
  r.degree = 6;
  push_sym3(r, 0.873821971016996, 0.063089014491502, 0.050844906370207 / 2.0);
  push_sym3(r, 0.501426509658179, 0.249286745170910, 0.116786275726379 / 2.0);
  push_sym6(r, 0.636502499121399, 0.310352451033785, 0.053145049844816,
            0.082851075618374 / 2.0);
  return r;
}

SegmentRule make_gauss(int n) {
  // Gauss-Legendre on [0,1]; n points integrate degree 2n-1 exactly.
  switch (n) {
    case 1:
      return {1, {0.5}, {1.0}};
    case 2: {
      const double d = 0.5 / std::sqrt(3.0);
      return {3, {0.5 - d, 0.5 + d}, {0.5, 0.5}};
    }
    case 3: {
      const double d = 0.5 * std::sqrt(0.6);
      return {5, {0.5 - d, 0.5, 0.5 + d}, {5.0 / 18.0, 4.0 / 9.0, 5.0 / 18.0}};
    }
    default:
      throw std::invalid_argument("segment rule: unsupported point count");
  }
}

}  // namespace

const QuadratureRule& triangle_rule(int degree) {
  static const QuadratureRule d1 = make_centroid();
  static const QuadratureRule d2 = make_midpoint();
  static const QuadratureRule d4 = make_degree4();
  static const QuadratureRule d6 = make_degree6();
  if (degree <= 1) return d1;
  if (degree <= 2) return d2;
  if (degree <= 4) return d4;
  if (degree <= 6) return d6;
  throw std::invalid_argument("triangle rule: degree above 6 not stocked");
}

const SegmentRule& segment_rule(int degree) {
  static const SegmentRule g1 = make_gauss(1);
  static const SegmentRule g2 = make_gauss(2);
  static const SegmentRule g3 = make_gauss(3);
  if (degree <= 1) return g1;
  if (degree <= 3) return g2;
  if (degree <= 5) return g3;
  throw std::invalid_argument("segment rule: degree above 5 not stocked");
}

}  // namespace fsi

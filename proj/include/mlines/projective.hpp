#pragma once

#include <Eigen/Core>

#include "mlines/field.hpp"
#include "mlines/linalg.hpp"

namespace mlines {

template <typename T>
using HomPoint = Eigen::Matrix<T, 4, 1>;
/// Covector; a point x lies on the plane iff sum_i plane_i x_i == 0.
template <typename T>
using HomPlane = Eigen::Matrix<T, 4, 1>;
/// (g01, g23, g02, g13, g03, g12).
template <typename T>
using PluckerLine = Eigen::Matrix<T, 6, 1>;
template <typename T>
using HomPoint4 = Eigen::Matrix<T, 5, 1>;
/// A line of CP^4 given by two spanning points (columns).
template <typename T>
using Line4 = Eigen::Matrix<T, 5, 2>;

/// g^{uv} = a^u b^v - a^v b^u. Throws DegeneratePair when a and b coincide
/// projectively.
template <typename T>
PluckerLine<T> line_from_points(const HomPoint<T>& a, const HomPoint<T>& b, const Tolerance& tol = {});

/// Two points spanning the line, as columns.
template <typename T>
Eigen::Matrix<T, 4, 2> line_points(const PluckerLine<T>& v, const Tolerance& tol = {});

/// g01 g23 - g02 g13 + g03 g12.
template <typename T>
T plucker_identity(const PluckerLine<T>& v) {
  return v(0) * v(1) - v(2) * v(3) + v(4) * v(5);
}

template <typename T>
bool lines_intersect(const PluckerLine<T>& v, const PluckerLine<T>& w, const Tolerance& tol = {});

template <typename T>
bool lines_equal(const PluckerLine<T>& v, const PluckerLine<T>& w, const Tolerance& tol = {}) {
  return proportional(v, w, tol);
}

template <typename T>
bool point_on_line(const HomPoint<T>& x, const PluckerLine<T>& v, const Tolerance& tol = {});

template <typename T>
bool point_on_plane(const HomPoint<T>& x, const HomPlane<T>& p, const Tolerance& tol = {}) {
  return is_zero(T(p.cwiseProduct(x).sum()), norm2(p) * norm2(x), tol);
}

/// Throws SkewLines or IdenticalLines.
template <typename T>
HomPoint<T> meet_point(const PluckerLine<T>& v, const PluckerLine<T>& w, const Tolerance& tol = {});

/// Throws CollinearTriple.
template <typename T>
HomPlane<T> plane_from_points(const HomPoint<T>& p, const HomPoint<T>& q, const HomPoint<T>& r,
                              const Tolerance& tol = {});

/// Throws LineInPlane.
template <typename T>
HomPoint<T> plane_line_meet(const HomPlane<T>& plane, const PluckerLine<T>& v, const Tolerance& tol = {});

/// The line through t (a point of l1) meeting l2 and l3. Throws
/// DegenerateConfiguration when the lines are not pairwise skew or t is not on l1.
template <typename T>
PluckerLine<T> transversal_family_cp3(const PluckerLine<T>& l1, const PluckerLine<T>& l2,
                                      const PluckerLine<T>& l3, const HomPoint<T>& t,
                                      const Tolerance& tol = {});

/// The unique line of CP^4 meeting three lines in general position. Throws
/// NonGenericPosition.
template <typename T>
Line4<T> transversal_cp4(const Line4<T>& l1, const Line4<T>& l2, const Line4<T>& l3,
                         const Tolerance& tol = {});

template <typename T>
bool lines4_meet(const Line4<T>& a, const Line4<T>& b, const Tolerance& tol = {}) {
  Eigen::Matrix<T, 5, 4> m;
  m << a, b;
  return rank(m, tol) <= 3;
}

template <typename T>
bool lines4_equal(const Line4<T>& a, const Line4<T>& b, const Tolerance& tol = {}) {
  Eigen::Matrix<T, 5, 4> m;
  m << a, b;
  return rank(m, tol) == 2;
}

template <typename T>
bool point_on_line4(const HomPoint4<T>& x, const Line4<T>& a, const Tolerance& tol = {}) {
  Eigen::Matrix<T, 5, 3> m;
  m << a, x;
  return rank(m, tol) <= 2;
}

/// Drops the last coordinate: the projection from (0,0,0,0,1) onto x4 = 0.
template <typename T>
HomPoint<T> project_point(const HomPoint4<T>& x) {
  return x.template head<4>();
}

/// Image of a CP^4 line under project_point; NonGenericPosition when the line
/// passes through the centre of projection.
template <typename T>
PluckerLine<T> project_line(const Line4<T>& a, const Tolerance& tol = {});

}  // namespace mlines

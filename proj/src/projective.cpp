#include "mlines/projective.hpp"

#include "mlines/errors.hpp"
#include "mlines/msystem.hpp"

namespace mlines {

template <typename T>
PluckerLine<T> line_from_points(const HomPoint<T>& a, const HomPoint<T>& b, const Tolerance& tol) {
  if (is_zero_vector(a) || is_zero_vector(b) || proportional(a, b, tol)) {
    throw Error(ErrorCode::DegeneratePair, "points do not span a line");
  }
  auto g = [&](int u, int v) { return T(a(u) * b(v) - a(v) * b(u)); };
  PluckerLine<T> out;
  out << g(0, 1), g(2, 3), g(0, 2), g(1, 3), g(0, 3), g(1, 2);
  return out;
}

template <typename T>
Eigen::Matrix<T, 4, 2> line_points(const PluckerLine<T>& v, const Tolerance& tol) {
  Eigen::Matrix<T, 4, 4> p = Eigen::Matrix<T, 4, 4>::Zero();
  const int pairs[6][2] = {{0, 1}, {2, 3}, {0, 2}, {1, 3}, {0, 3}, {1, 2}};
  for (int j = 0; j < 6; ++j) {
    p(pairs[j][0], pairs[j][1]) = v(j);
    p(pairs[j][1], pairs[j][0]) = -v(j);
  }
  Matrix<T> basis = column_basis(p, tol);
  if (basis.cols() != 2) throw Error(ErrorCode::DegenerateConfiguration, "coordinates do not describe a line");
  return basis;
}

template <typename T>
bool lines_intersect(const PluckerLine<T>& v, const PluckerLine<T>& w, const Tolerance& tol) {
  return is_zero(inner(v, w), norm2(v) * norm2(w), tol);
}

template <typename T>
bool point_on_line(const HomPoint<T>& x, const PluckerLine<T>& v, const Tolerance& tol) {
  Eigen::Matrix<T, 4, 3> m;
  m << line_points(v, tol), x;
  return rank(m, tol) <= 2;
}

template <typename T>
HomPoint<T> meet_point(const PluckerLine<T>& v, const PluckerLine<T>& w, const Tolerance& tol) {
  if (lines_equal(v, w, tol)) throw Error(ErrorCode::IdenticalLines, "lines coincide");
  if (!lines_intersect(v, w, tol)) throw Error(ErrorCode::SkewLines, "lines do not meet");
  Matrix<T> meet = intersect_spans(line_points(v, tol), line_points(w, tol), tol);
  if (meet.cols() != 1) throw Error(ErrorCode::SkewLines, "lines do not meet in a single point");
  return canonical(meet.col(0));
}

template <typename T>
HomPlane<T> plane_from_points(const HomPoint<T>& p, const HomPoint<T>& q, const HomPoint<T>& r,
                              const Tolerance& tol) {
  Eigen::Matrix<T, 3, 4> m;
  m << p.transpose(), q.transpose(), r.transpose();
  Matrix<T> ns = nullspace(m, tol);
  if (ns.cols() != 1) throw Error(ErrorCode::CollinearTriple, "points do not span a plane");
  return canonical(ns.col(0));
}

template <typename T>
HomPoint<T> plane_line_meet(const HomPlane<T>& plane, const PluckerLine<T>& v, const Tolerance& tol) {
  Eigen::Matrix<T, 4, 2> pts = line_points(v, tol);
  HomPoint<T> a = pts.col(0);
  HomPoint<T> b = pts.col(1);
  const T pb = plane.cwiseProduct(b).sum();
  const T pa = plane.cwiseProduct(a).sum();
  HomPoint<T> x = pb * a - pa * b;
  if (is_zero_vector(x, norm2(plane) * norm2(a) * norm2(b), tol)) {
    throw Error(ErrorCode::LineInPlane, "line lies in the plane");
  }
  return canonical(x);
}

template <typename T>
PluckerLine<T> transversal_family_cp3(const PluckerLine<T>& l1, const PluckerLine<T>& l2,
                                      const PluckerLine<T>& l3, const HomPoint<T>& t,
                                      const Tolerance& tol) {
  if (lines_intersect(l1, l2, tol) || lines_intersect(l1, l3, tol) || lines_intersect(l2, l3, tol)) {
    throw Error(ErrorCode::DegenerateConfiguration, "transversal family needs pairwise skew lines");
  }
  if (!point_on_line(t, l1, tol)) throw Error(ErrorCode::DegenerateConfiguration, "parameter point is not on the first line");
  try {
    Eigen::Matrix<T, 4, 2> p2 = line_points(l2, tol);
    HomPlane<T> plane = plane_from_points<T>(t, p2.col(0), p2.col(1), tol);
    HomPoint<T> z = plane_line_meet(plane, l3, tol);
    return line_from_points(t, z, tol);
  } catch (const Error& e) {
    throw Error(ErrorCode::DegenerateConfiguration, std::string("transversal collapses: ") + e.what());
  }
}

template <typename T>
Line4<T> transversal_cp4(const Line4<T>& l1, const Line4<T>& l2, const Line4<T>& l3, const Tolerance& tol) {
  for (const auto* l : {&l1, &l2, &l3}) {
    if (rank(*l, tol) != 2) throw Error(ErrorCode::NonGenericPosition, "input is not a line");
  }
  Eigen::Matrix<T, 5, 4> h;
  h << l1, l2;
  if (rank(h, tol) != 4) throw Error(ErrorCode::NonGenericPosition, "first two lines do not span a hyperplane");
  Matrix<T> x = intersect_spans(h, l3, tol);
  if (x.cols() != 1) throw Error(ErrorCode::NonGenericPosition, "third line lies in the hyperplane of the others");
  Eigen::Matrix<T, 5, 3> s1, s2;
  s1 << l1, x;
  s2 << l2, x;
  if (rank(s1, tol) != 3 || rank(s2, tol) != 3) {
    throw Error(ErrorCode::NonGenericPosition, "third line meets one of the others");
  }
  Matrix<T> meet = intersect_spans(s1, s2, tol);
  if (meet.cols() != 2) throw Error(ErrorCode::NonGenericPosition, "transversal is not unique");
  Line4<T> out;
  out.col(0) = canonical(meet.col(0));
  out.col(1) = canonical(meet.col(1));
  return out;
}

template <typename T>
PluckerLine<T> project_line(const Line4<T>& a, const Tolerance& tol) {
  try {
    return line_from_points<T>(a.col(0).template head<4>(), a.col(1).template head<4>(), tol);
  } catch (const Error&) {
    throw Error(ErrorCode::NonGenericPosition, "line passes through the centre of projection");
  }
}

#define MLINES_INSTANTIATE_PROJECTIVE(T)                                                               \
  template PluckerLine<T> line_from_points<T>(const HomPoint<T>&, const HomPoint<T>&, const Tolerance&); \
  template Eigen::Matrix<T, 4, 2> line_points<T>(const PluckerLine<T>&, const Tolerance&);             \
  template bool lines_intersect<T>(const PluckerLine<T>&, const PluckerLine<T>&, const Tolerance&);    \
  template bool point_on_line<T>(const HomPoint<T>&, const PluckerLine<T>&, const Tolerance&);         \
  template HomPoint<T> meet_point<T>(const PluckerLine<T>&, const PluckerLine<T>&, const Tolerance&);  \
  template HomPlane<T> plane_from_points<T>(const HomPoint<T>&, const HomPoint<T>&, const HomPoint<T>&, \
                                            const Tolerance&);                                         \
  template HomPoint<T> plane_line_meet<T>(const HomPlane<T>&, const PluckerLine<T>&, const Tolerance&); \
  template PluckerLine<T> transversal_family_cp3<T>(const PluckerLine<T>&, const PluckerLine<T>&,      \
                                                    const PluckerLine<T>&, const HomPoint<T>&,         \
                                                    const Tolerance&);                                 \
  template Line4<T> transversal_cp4<T>(const Line4<T>&, const Line4<T>&, const Line4<T>&,              \
                                       const Tolerance&);                                              \
  template PluckerLine<T> project_line<T>(const Line4<T>&, const Tolerance&);

MLINES_INSTANTIATE_PROJECTIVE(Rational)
MLINES_INSTANTIATE_PROJECTIVE(GaussRational)
MLINES_INSTANTIATE_PROJECTIVE(Complex)

}  // namespace mlines

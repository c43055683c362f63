#include "graphent/hyperbolic.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace graphent {
namespace {

Vec3 scaled(const Vec3& v, double s) { return {v[0] * s, v[1] * s, v[2] * s}; }

Vec3 add(const Vec3& a, const Vec3& b) { return {a[0] + b[0], a[1] + b[1], a[2] + b[2]}; }

Vec3 axpby(double a, const Vec3& x, double b, const Vec3& y) {
  return {a * x[0] + b * y[0], a * x[1] + b * y[1], a * x[2] + b * y[2]};
}

Vec3 cross(const Vec3& a, const Vec3& b) {
  return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]};
}

// Lorentzian cross product: Minkowski-orthogonal to both arguments.
Vec3 lorentz_cross(const Vec3& a, const Vec3& b) {
  Vec3 c = cross(a, b);
  c[0] = -c[0];
  return c;
}

// acosh(1 + x) without losing digits near x = 0.
double acosh1p(double x) {
  if (x <= 0.0) return 0.0;
  return std::log1p(x + std::sqrt(x * (x + 2.0)));
}

double clamped_acosh(double y) { return acosh1p(y - 1.0); }

Mat3 multiply(const Mat3& a, const Mat3& b) {
  Mat3 c{};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      double s = 0.0;
      for (int k = 0; k < 3; ++k) s += a[3 * i + k] * b[3 * k + j];
      c[3 * i + j] = s;
    }
  return c;
}

double determinant(const Mat3& m) {
  return m[0] * (m[4] * m[8] - m[5] * m[7]) - m[1] * (m[3] * m[8] - m[5] * m[6]) +
         m[2] * (m[3] * m[7] - m[4] * m[6]);
}

Mat3 inverse3(const Mat3& m) {
  const double det = determinant(m);
  if (det == 0.0) throw std::domain_error("singular matrix");
  Mat3 r{};
  r[0] = (m[4] * m[8] - m[5] * m[7]) / det;
  r[1] = (m[2] * m[7] - m[1] * m[8]) / det;
  r[2] = (m[1] * m[5] - m[2] * m[4]) / det;
  r[3] = (m[5] * m[6] - m[3] * m[8]) / det;
  r[4] = (m[0] * m[8] - m[2] * m[6]) / det;
  r[5] = (m[2] * m[3] - m[0] * m[5]) / det;
  r[6] = (m[3] * m[7] - m[4] * m[6]) / det;
  r[7] = (m[1] * m[6] - m[0] * m[7]) / det;
  r[8] = (m[0] * m[4] - m[1] * m[3]) / det;
  return r;
}

}  // namespace

HPoint HPoint::normalized(const Vec3& v) {
  const double n = -minkowski(v, v);
  if (!(n > 0.0)) throw std::domain_error("vector is not timelike");
  const double s = (v[0] > 0.0 ? 1.0 : -1.0) / std::sqrt(n);
  return HPoint{scaled(v, s)};
}

HPoint HPoint::from_half_plane(double re, double im) {
  if (!(im > 0.0)) throw std::invalid_argument("half-plane point needs positive imaginary part");
  const double r2 = re * re + im * im;
  return HPoint{{(r2 + 1.0) / (2.0 * im), (r2 - 1.0) / (2.0 * im), re / im}};
}

std::pair<double, double> HPoint::to_half_plane() const {
  const double im = 1.0 / (x[0] - x[1]);
  return {x[2] * im, im};
}

bool HPoint::valid(double tol) const {
  const double scale = 1.0 + x[0] * x[0];
  return x[0] > 0.0 && std::abs(minkowski(x, x) + 1.0) <= tol * scale;
}

HLine HLine::normalized(const Vec3& v) {
  const double n = minkowski(v, v);
  if (!(n > 0.0)) throw std::domain_error("vector is not spacelike");
  return HLine{scaled(v, 1.0 / std::sqrt(n))};
}

HLine HLine::from_half_plane_circle(double center, double radius) {
  if (!(radius > 0.0)) throw std::invalid_argument("semicircle radius must be positive");
  // |z - c|^2 = R^2 is linear in hyperboloid coordinates.
  const double k = center * center - radius * radius;
  return normalized({-(1.0 + k), 1.0 - k, -2.0 * center});
}

HLine HLine::from_half_plane_vertical(double re) {
  // x = re  <=>  X2 - re*(X0 - X1) = 0
  return normalized({re, re, 1.0});
}

bool HLine::contains(const HPoint& q, double tol) const {
  return std::abs(side_value(q)) <= tol * (1.0 + std::abs(q.x[0]));
}

Vec3 HLine::tangent_at(const HPoint& on_line) const {
  Vec3 t = lorentz_cross(on_line.x, p);
  t = {-t[0], -t[1], -t[2]};  // J(p x f): positive side on the left
  const double n = minkowski(t, t);
  return scaled(t, 1.0 / std::sqrt(n));
}

std::pair<Vec3, Vec3> HLine::ideal_endpoints(const HPoint& on_line) const {
  const Vec3 t = tangent_at(on_line);
  return {axpby(1.0, on_line.x, -1.0, t), add(on_line.x, t)};
}

bool HLine::valid(double tol) const {
  const double scale = 1.0 + p[0] * p[0];
  return std::abs(minkowski(p, p) - 1.0) <= tol * scale;
}

HIsometry::HIsometry(const Mat3& m) : m_(m), orientation_preserving_(determinant(m) > 0.0) {}

HIsometry HIsometry::reflection(const HLine& line) {
  // x -> x - 2 <x,p> p
  const Vec3& p = line.p;
  const Vec3 jp{-p[0], p[1], p[2]};
  Mat3 m{};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) m[3 * i + j] = (i == j ? 1.0 : 0.0) - 2.0 * p[i] * jp[j];
  HIsometry r(m);
  r.orientation_preserving_ = false;
  return r;
}

HIsometry HIsometry::translation(const HLine& line, const HPoint& on_line, double length) {
  // Product of reflections in the perpendiculars at on_line and at arc length/2.
  const HPoint mid = point_at_arclength(line, on_line, 0.5 * length);
  const HLine first{line.tangent_at(on_line)};
  const HLine second{line.tangent_at(mid)};
  HIsometry t = reflection(second).compose(reflection(first));
  t.orientation_preserving_ = true;
  return t;
}

HIsometry HIsometry::from_sl2(double a, double b, double c, double d) {
  const double det = a * d - b * c;
  if (!(det > 0.0)) throw std::invalid_argument("SL(2,R) matrix must have positive determinant");
  const double s = 1.0 / std::sqrt(det);
  a *= s, b *= s, c *= s, d *= s;
  auto image = [&](double re, double im) {
    // (a z + b) / (c z + d)
    const double nr = a * re + b, ni = a * im;
    const double dr = c * re + d, di = c * im;
    const double den = dr * dr + di * di;
    return HPoint::from_half_plane((nr * dr + ni * di) / den, (ni * dr - nr * di) / den);
  };
  const std::array<std::pair<double, double>, 3> zs{{{0.0, 1.0}, {0.0, 2.0}, {1.0, 1.0}}};
  Mat3 src{}, dst{};
  for (int k = 0; k < 3; ++k) {
    const HPoint from = HPoint::from_half_plane(zs[k].first, zs[k].second);
    const HPoint to = image(zs[k].first, zs[k].second);
    for (int i = 0; i < 3; ++i) {
      src[3 * i + k] = from.x[i];
      dst[3 * i + k] = to.x[i];
    }
  }
  HIsometry g(multiply(dst, inverse3(src)));
  g.reorthonormalize();
  return g;
}

HPoint HIsometry::apply(const HPoint& q) const { return HPoint{apply(q.x)}; }

HLine HIsometry::apply(const HLine& l) const { return HLine{apply(l.p)}; }

Vec3 HIsometry::apply(const Vec3& v) const {
  return {m_[0] * v[0] + m_[1] * v[1] + m_[2] * v[2], m_[3] * v[0] + m_[4] * v[1] + m_[5] * v[2],
          m_[6] * v[0] + m_[7] * v[1] + m_[8] * v[2]};
}

HIsometry HIsometry::compose(const HIsometry& other) const {
  HIsometry r;
  r.m_ = multiply(m_, other.m_);
  r.orientation_preserving_ = orientation_preserving_ == other.orientation_preserving_;
  r.compositions_ = std::max(compositions_, other.compositions_) + 1;
  if (r.compositions_ % 16 == 0) r.reorthonormalize();
  return r;
}

HIsometry HIsometry::inverse() const {
  // M^{-1} = J M^T J
  HIsometry r;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      const double si = i == 0 ? -1.0 : 1.0;
      const double sj = j == 0 ? -1.0 : 1.0;
      r.m_[3 * i + j] = si * sj * m_[3 * j + i];
    }
  r.orientation_preserving_ = orientation_preserving_;
  r.compositions_ = compositions_;
  return r;
}

void HIsometry::reorthonormalize() {
  // Once entries reach ~1e3 the form M^T J M is known only to |M|^2 * 1e-16,
  // so a correction would inject more error than it removes.
  if (!(std::abs(m_[0]) <= 1e3)) return;
  // Minkowski Gram-Schmidt on the columns.
  Vec3 c[3];
  for (int j = 0; j < 3; ++j) c[j] = {m_[j], m_[3 + j], m_[6 + j]};
  c[0] = scaled(c[0], 1.0 / std::sqrt(-minkowski(c[0], c[0])));
  c[1] = axpby(1.0, c[1], minkowski(c[1], c[0]), c[0]);
  c[1] = scaled(c[1], 1.0 / std::sqrt(minkowski(c[1], c[1])));
  c[2] = axpby(1.0, c[2], minkowski(c[2], c[0]), c[0]);
  c[2] = axpby(1.0, c[2], -minkowski(c[2], c[1]), c[1]);
  c[2] = scaled(c[2], 1.0 / std::sqrt(minkowski(c[2], c[2])));
  for (int j = 0; j < 3; ++j)
    for (int i = 0; i < 3; ++i) m_[3 * i + j] = c[j][i];
}

double HIsometry::translation_length() const {
  if (!orientation_preserving_) return 0.0;
  const double half = 0.5 * (trace() - 1.0);
  return half > 1.0 ? clamped_acosh(half) : 0.0;
}

HLine HIsometry::axis() const {
  // Fixed spacelike eigenvector: kernel of M - I.
  Mat3 a = m_;
  a[0] -= 1.0, a[4] -= 1.0, a[8] -= 1.0;
  const Vec3 r0{a[0], a[1], a[2]}, r1{a[3], a[4], a[5]}, r2{a[6], a[7], a[8]};
  const Vec3 cands[3] = {cross(r0, r1), cross(r1, r2), cross(r0, r2)};
  const Vec3* best = &cands[0];
  double best_n = -1.0;
  for (const Vec3& v : cands) {
    const double n = v[0] * v[0] + v[1] * v[1] + v[2] * v[2];
    if (n > best_n) best_n = n, best = &v;
  }
  return HLine::normalized(*best);
}

double HIsometry::form_defect() const {
  double worst = 0.0;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      double s = -m_[i] * m_[j] + m_[3 + i] * m_[3 + j] + m_[6 + i] * m_[6 + j];
      const double target = i != j ? 0.0 : (i == 0 ? -1.0 : 1.0);
      const double e = std::abs(s - target);
      if (!(e <= worst)) worst = e;  // keeps NaN visible
    }
  return worst;
}

double dist_h2(const HPoint& p, const HPoint& q) {
  const double c = -minkowski(p.x, q.x);
  if (c > 2.0) return std::acosh(c);
  // Chord form is accurate for nearby points: <p-q,p-q> = 2cosh(d) - 2.
  const Vec3 v = axpby(1.0, p.x, -1.0, q.x);
  const double chord2 = minkowski(v, v);
  if (chord2 <= 0.0) return 0.0;
  return 2.0 * std::asinh(0.5 * std::sqrt(chord2));
}

FootResult foot_and_dist(const HPoint& o, const HLine& line) {
  const double s = line.side_value(o);
  if (s == 0.0) return {o, 0.0};
  // <o - s p, o - s p> = -(1 + s^2) exactly; use it rather than the rounded norm.
  const HPoint foot{scaled(axpby(1.0, o.x, -s, line.p), 1.0 / std::sqrt(1.0 + s * s))};
  return {foot, std::asinh(std::abs(s))};
}

HPoint erect_perpendicular(const HLine& line, const HPoint& foot, double l, Side side) {
  if (!(l >= 0.0)) throw std::invalid_argument("perpendicular length must be nonnegative");
  if (l == 0.0) return foot;
  return HPoint{axpby(std::cosh(l), foot.x, std::sinh(l) * sign_of(side), line.p)};
}

HPoint point_at_arclength(const HLine& line, const HPoint& origin, double s) {
  if (s == 0.0) return origin;
  const Vec3 t = line.tangent_at(origin);
  return HPoint{axpby(std::cosh(s), origin.x, std::sinh(s), t)};
}

double signed_arclength(const HLine& line, const HPoint& origin, const HPoint& q) {
  const Vec3 t = line.tangent_at(origin);
  const double along = minkowski(q.x, t);
  const double d = dist_h2(origin, q);
  return along >= 0.0 ? d : -d;
}

LineChart LineChart::on(const HLine& line, const HPoint& origin) {
  const Vec3 t = line.tangent_at(origin);
  return {add(origin.x, t), axpby(1.0, origin.x, -1.0, t)};
}

LineChart LineChart::transformed(const HIsometry& g) const { return {g.apply(plus), g.apply(minus)}; }

HPoint LineChart::at(double s) const {
  return HPoint{axpby(0.5 * std::exp(s), plus, 0.5 * std::exp(-s), minus)};
}

double LineChart::coordinate(const HPoint& q) const {
  return 0.5 * std::log(minkowski(q.x, minus) / minkowski(q.x, plus));
}

double visual_angle(double d) {
  if (d < 0.0) throw std::invalid_argument("visual_angle: negative distance");
  return 4.0 * std::atan(std::exp(-d));
}

double distance_for_visual_angle(double psi) {
  if (!(psi > 0.0)) throw std::invalid_argument("visual angle must be positive");
  if (psi >= std::numbers::pi) return 0.0;
  return -std::log(std::tan(0.25 * psi));
}

double right_hypotenuse(double a, double b) {
  if (a < 0.0 || b < 0.0) throw std::invalid_argument("right_hypotenuse: negative leg");
  // cosh a cosh b - 1 = (cosh a - 1) cosh b + (cosh b - 1)
  const double ca1 = 2.0 * std::sinh(0.5 * a) * std::sinh(0.5 * a);
  const double cb1 = 2.0 * std::sinh(0.5 * b) * std::sinh(0.5 * b);
  return acosh1p(ca1 * std::cosh(b) + cb1);
}

double prism_dist(const PrismPoint& p, const PrismPoint& q) {
  return std::hypot(dist_h2(p.base, q.base), p.height - q.height);
}

double delta_correction(double l, double d, double alpha) {
  constexpr double half_pi = 0.5 * std::numbers::pi;
  if (!(alpha > 0.0) || alpha > half_pi + 1e-12)
    throw std::invalid_argument("wall angle must lie in (0, pi/2]");
  if (l < 0.0 || d < 0.0) throw std::invalid_argument("delta_correction: negative length");
  const double in_plane = right_hypotenuse(l, d);
  const double tilted = std::hypot(right_hypotenuse(l, d * std::cos(alpha)), d * std::sin(alpha));
  return std::max(0.0, in_plane - tilted);
}

double line_distance(const HLine& a, const HLine& b) {
  const double c = std::abs(minkowski(a.p, b.p));
  return c > 1.0 ? clamped_acosh(c) : 0.0;
}

HLine common_perpendicular(const HLine& a, const HLine& b) {
  return HLine::normalized(lorentz_cross(a.p, b.p));
}

HPoint intersection(const HLine& a, const HLine& b) {
  return HPoint::normalized(lorentz_cross(a.p, b.p));
}

Vec3 direction_to(const HPoint& from, const HPoint& to) {
  const Vec3 v = axpby(1.0, to.x, minkowski(from.x, to.x), from.x);
  const double n = minkowski(v, v);
  if (!(n > 0.0)) return {0.0, 0.0, 0.0};
  return scaled(v, 1.0 / std::sqrt(n));
}

}  // namespace graphent

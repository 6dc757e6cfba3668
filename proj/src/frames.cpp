#include "navfuse/frames.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace navfuse {

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;
}

double wrap_azimuth(double a) {
  double w = std::fmod(a, kTwoPi);
  if (w < 0.0) w += kTwoPi;
  return w;
}

double angle_diff(double x, double y) {
  double d = std::fmod(x - y, kTwoPi);
  if (d > std::numbers::pi) d -= kTwoPi;
  if (d <= -std::numbers::pi) d += kTwoPi;
  return d;
}

double EarthModel::gravity(double lat, double h) const {
  const double s2 = std::sin(lat) * std::sin(lat);
  const double g0 =
      9.7803253359 * (1.0 + 0.001931852652458 * s2) / std::sqrt(1.0 - e2 * s2);
  return g0 - 3.086e-6 * h;
}

Radii radii(const EarthModel& em, double lat) {
  const double s2 = std::sin(lat) * std::sin(lat);
  const double w = 1.0 - em.e2 * s2;
  Radii r;
  r.M = em.a * (1.0 - em.e2) / (w * std::sqrt(w));
  r.N = em.a / std::sqrt(w);
  return r;
}

Matrix3d rotation_body_to_local(const Attitude& att) {
  const double cp = std::cos(att.p), sp = std::sin(att.p);
  const double cr = std::cos(att.r), sr = std::sin(att.r);
  const double ca = std::cos(att.a), sa = std::sin(att.a);
  Matrix3d R;
  R << ca * cr + sa * sp * sr, sa * cp, ca * sr - sa * sp * cr,
      -sa * cr + ca * sp * sr, ca * cp, -sa * sr - ca * sp * cr,
      -cp * sr, sp, cp * cr;
  return R;
}

Quaternion quat_from_attitude(const Attitude& att) {
  Quaternion q(rotation_body_to_local(att));
  q.normalize();
  return q;
}

Attitude attitude_from_quat(const Quaternion& q) {
  const Matrix3d R = q.normalized().toRotationMatrix();
  const double sp = std::clamp(R(2, 1), -1.0, 1.0);
  Attitude att;
  att.p = std::asin(sp);
  if (std::abs(std::abs(att.p) - std::numbers::pi / 2.0) < 1e-6) {
    throw std::domain_error("attitude_from_quat: gimbal lock, |pitch| at pi/2");
  }
  att.a = wrap_azimuth(std::atan2(R(0, 1), R(1, 1)));
  att.r = std::atan2(-R(2, 0), R(2, 2));
  return att;
}

Matrix3d d_rotation_d_pitch(const Attitude& att) {
  const double cp = std::cos(att.p), sp = std::sin(att.p);
  const double cr = std::cos(att.r), sr = std::sin(att.r);
  const double ca = std::cos(att.a), sa = std::sin(att.a);
  Matrix3d D;
  D << sa * cp * sr, -sa * sp, -sa * cp * cr,
      ca * cp * sr, -ca * sp, -ca * cp * cr,
      sp * sr, cp, -sp * cr;
  return D;
}

Matrix3d d_rotation_d_roll(const Attitude& att) {
  const double cp = std::cos(att.p), sp = std::sin(att.p);
  const double cr = std::cos(att.r), sr = std::sin(att.r);
  const double ca = std::cos(att.a), sa = std::sin(att.a);
  Matrix3d D;
  D << -ca * sr + sa * sp * cr, 0.0, ca * cr + sa * sp * sr,
      sa * sr + ca * sp * cr, 0.0, -sa * cr + ca * sp * sr,
      -cp * cr, 0.0, -cp * sr;
  return D;
}

Matrix3d d_rotation_d_azimuth(const Attitude& att) {
  const double cp = std::cos(att.p), sp = std::sin(att.p);
  const double cr = std::cos(att.r), sr = std::sin(att.r);
  const double ca = std::cos(att.a), sa = std::sin(att.a);
  Matrix3d D;
  D << -sa * cr + ca * sp * sr, ca * cp, -sa * sr - ca * sp * cr,
      -ca * cr - sa * sp * sr, -sa * cp, -ca * sr + sa * sp * cr,
      0.0, 0.0, 0.0;
  return D;
}

Matrix3d euler_rate_matrix(const Attitude& att) {
  const double cp = std::cos(att.p), tp = std::tan(att.p);
  const double ca = std::cos(att.a), sa = std::sin(att.a);
  Matrix3d E;
  E << ca, -sa, 0.0,
      sa / cp, ca / cp, 0.0,
      sa * tp, ca * tp, -1.0;
  return E;
}

Matrix3d d_euler_rate_d_pitch(const Attitude& att) {
  const double cp = std::cos(att.p), sp = std::sin(att.p);
  const double ca = std::cos(att.a), sa = std::sin(att.a);
  const double cp2 = cp * cp;
  Matrix3d D;
  D << 0.0, 0.0, 0.0,
      sa * sp / cp2, ca * sp / cp2, 0.0,
      sa / cp2, ca / cp2, 0.0;
  return D;
}

Matrix3d d_euler_rate_d_azimuth(const Attitude& att) {
  const double cp = std::cos(att.p), tp = std::tan(att.p);
  const double ca = std::cos(att.a), sa = std::sin(att.a);
  Matrix3d D;
  D << -sa, -ca, 0.0,
      ca / cp, -sa / cp, 0.0,
      ca * tp, -sa * tp, 0.0;
  return D;
}

LocalEnu geodetic_to_enu(const EarthModel& em, const Geodetic& anchor, const Geodetic& p) {
  const Radii r = radii(em, anchor.lat);
  LocalEnu out;
  out.e = (p.lon - anchor.lon) * (r.N + anchor.h) * std::cos(anchor.lat);
  out.n = (p.lat - anchor.lat) * (r.M + anchor.h);
  out.u = p.h - anchor.h;
  return out;
}

Geodetic enu_to_geodetic(const EarthModel& em, const Geodetic& anchor, const LocalEnu& p) {
  const Radii r = radii(em, anchor.lat);
  Geodetic out;
  out.lat = anchor.lat + p.n / (r.M + anchor.h);
  out.lon = anchor.lon + p.e / ((r.N + anchor.h) * std::cos(anchor.lat));
  out.h = anchor.h + p.u;
  return out;
}

Matrix3d skew(const Vector3d& v) {
  Matrix3d S;
  S << 0.0, -v.z(), v.y(),
      v.z(), 0.0, -v.x(),
      -v.y(), v.x(), 0.0;
  return S;
}

}  // namespace navfuse

#pragma once

#include <Eigen/Dense>
#include <Eigen/Geometry>

// Coordinate conventions used throughout:
//   l-frame: local-level ENU (x east, y north, z up).
//   b-frame: vehicle body (x lateral right, y forward, z up).
//   Attitude angles: pitch p (forward axis above horizon), roll r (about the
//   forward axis), azimuth a (heading of the forward axis, clockwise from
//   north, normalized to [0, 2pi)).
// The quaternion and DCM represent b->l: v_l = R_b^l * v_b.

namespace navfuse {

using Quaternion = Eigen::Quaterniond;
using Eigen::Matrix3d;
using Eigen::Vector3d;

/// Geodetic position: latitude/longitude in radians, ellipsoidal height in m.
struct Geodetic {
  double lat = 0.0;
  double lon = 0.0;
  double h = 0.0;
};

/// Position in a local east/north/up tangent frame, meters.
struct LocalEnu {
  double e = 0.0;
  double n = 0.0;
  double u = 0.0;

  Vector3d vec() const { return {e, n, u}; }
};

/// Euler attitude (pitch, roll, azimuth), radians.
struct Attitude {
  double p = 0.0;
  double r = 0.0;
  double a = 0.0;
};

/// Wrap an azimuth to [0, 2pi).
double wrap_azimuth(double a);

/// Difference of two angles wrapped to (-pi, pi].
double angle_diff(double x, double y);

/// Reference ellipsoid constants plus the normal gravity model.
struct EarthModel {
  double a = 6378137.0;            // semi-major axis, m
  double e2 = 0.00669437999014;    // first eccentricity squared
  double omega_e = 7.292115e-5;    // earth rotation rate, rad/s

  /// Normal gravity (Somigliana) with a free-air height correction, m/s^2.
  double gravity(double lat, double h) const;
};

/// Meridian and prime-vertical radii of curvature at a latitude.
struct Radii {
  double M = 0.0;
  double N = 0.0;
};
Radii radii(const EarthModel& em, double lat);

/// Body-to-local DCM for the (pitch, roll, azimuth) convention above.
/// Its second column is the forward axis in ENU:
/// (sin a cos p, cos a cos p, sin p).
Matrix3d rotation_body_to_local(const Attitude& att);

/// Unit quaternion equivalent of rotation_body_to_local.
Quaternion quat_from_attitude(const Attitude& att);

/// Euler angles back out of a b->l quaternion.
/// Throws std::domain_error within 1e-6 rad of |p| = pi/2 (gimbal lock).
Attitude attitude_from_quat(const Quaternion& q);

/// Partial derivatives of rotation_body_to_local with respect to each angle.
Matrix3d d_rotation_d_pitch(const Attitude& att);
Matrix3d d_rotation_d_roll(const Attitude& att);
Matrix3d d_rotation_d_azimuth(const Attitude& att);

/// Mapping from l-frame angular rate to Euler-angle rates:
/// (p_dot, r_dot, a_dot) = euler_rate_matrix(att) * omega_lb^l.
Matrix3d euler_rate_matrix(const Attitude& att);
Matrix3d d_euler_rate_d_pitch(const Attitude& att);
Matrix3d d_euler_rate_d_azimuth(const Attitude& att);

// Tangent-plane conversions anchored at a fixed geodetic origin. The mapping
// is linear in (lat - lat0, lon - lon0, h - h0) with radii evaluated at the
// anchor, so the two directions invert each other exactly.
LocalEnu geodetic_to_enu(const EarthModel& em, const Geodetic& anchor, const Geodetic& p);
Geodetic enu_to_geodetic(const EarthModel& em, const Geodetic& anchor, const LocalEnu& p);

/// Skew-symmetric cross-product matrix of v.
Matrix3d skew(const Vector3d& v);

}  // namespace navfuse

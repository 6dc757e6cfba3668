#include "navfuse/fusion.hpp"

#include <cmath>
#include <stdexcept>

namespace navfuse {

NavState nav_from_filter(const FilterState& fs) {
  NavState nav;
  nav.t = fs.t;
  nav.pos = {fs.x[0], fs.x[1], fs.x[2]};
  nav.vel = fs.x.segment<3>(3);
  nav.att = {fs.x[6], fs.x[7], fs.x[8]};
  nav.q = quat_from_attitude(nav.att);
  return nav;
}

BiasState bias_from_filter(const FilterState& fs) {
  BiasState b;
  b.dw = fs.x.segment<3>(9);
  b.df = fs.x.segment<3>(12);
  return b;
}

void set_filter_nav(FilterState& fs, const NavState& nav) {
  fs.t = nav.t;
  fs.x[0] = nav.pos.lat;
  fs.x[1] = nav.pos.lon;
  fs.x[2] = nav.pos.h;
  fs.x.segment<3>(3) = nav.vel;
  fs.x[6] = nav.att.p;
  fs.x[7] = nav.att.r;
  fs.x[8] = nav.att.a;
}

void set_filter_bias(FilterState& fs, const BiasState& b) {
  fs.x.segment<3>(9) = b.dw;
  fs.x.segment<3>(12) = b.df;
}

namespace {

// Continuous-time Jacobian of the PVA dynamics in the (geodetic, ENU
// velocity, Euler) parameterization, 9x15. f_b and w_b are bias-compensated.
Eigen::Matrix<double, 9, 15> pva_jacobian(const NavState& nav, const Vector3d& f_b,
                                          const Vector3d& w_b, const EarthModel& em) {
  Eigen::Matrix<double, 9, 15> F = Eigen::Matrix<double, 9, 15>::Zero();

  const double lat = nav.pos.lat, h = nav.pos.h;
  const Radii rad = radii(em, lat);
  const double Mh = rad.M + h, Nh = rad.N + h;
  const double cl = std::cos(lat), sl = std::sin(lat), tl = sl / cl;
  const Vector3d v = nav.vel;

  // Position rows: lat_dot = vn/(M+h), lon_dot = ve/((N+h)cl), h_dot = vu.
  F(0, 2) = -v.y() / (Mh * Mh);
  F(0, 4) = 1.0 / Mh;
  F(1, 0) = v.x() * tl / (Nh * cl);
  F(1, 2) = -v.x() / (Nh * Nh * cl);
  F(1, 3) = 1.0 / (Nh * cl);
  F(2, 5) = 1.0;

  const Matrix3d R = rotation_body_to_local(nav.att);
  const Matrix3d E = euler_rate_matrix(nav.att);
  const Vector3d w_ie = earth_rate_l(em, lat);
  const Vector3d w_el = transport_rate(em, v, nav.pos);

  // d(w_el)/dv and the latitude/height partials of the frame rates.
  Matrix3d Jw;
  Jw << 0.0, -1.0 / Mh, 0.0,
      1.0 / Nh, 0.0, 0.0,
      tl / Nh, 0.0, 0.0;
  const Vector3d dwie_dlat(0.0, -em.omega_e * sl, em.omega_e * cl);
  const Vector3d dwel_dlat(0.0, 0.0, v.x() / (Nh * cl * cl));
  const Vector3d dwel_dh(v.y() / (Mh * Mh), -v.x() / (Nh * Nh), -v.x() * tl / (Nh * Nh));

  // Velocity rows: v_dot = R f_b - (2 w_ie + w_el) x v + g_l.
  const Matrix3d dRdp = d_rotation_d_pitch(nav.att);
  const Matrix3d dRdr = d_rotation_d_roll(nav.att);
  const Matrix3d dRda = d_rotation_d_azimuth(nav.att);
  F.block<3, 1>(3, 6) = dRdp * f_b;
  F.block<3, 1>(3, 7) = dRdr * f_b;
  F.block<3, 1>(3, 8) = dRda * f_b;
  F.block<3, 3>(3, 3) = -skew(2.0 * w_ie + w_el) + skew(v) * Jw;
  F.block<3, 1>(3, 0) = -(2.0 * dwie_dlat + dwel_dlat).cross(v);
  F.block<3, 1>(3, 2) = -dwel_dh.cross(v) + Vector3d(0.0, 0.0, 3.086e-6);
  const double geps = 1e-7;
  F(5, 0) -= (em.gravity(lat + geps, h) - em.gravity(lat - geps, h)) / (2.0 * geps);
  F.block<3, 3>(3, 12) = -R;

  // Attitude rows: att_dot = E (R w_b - (w_ie + w_el)).
  const Vector3d w_l = R * w_b - (w_ie + w_el);
  const Matrix3d dEdp = d_euler_rate_d_pitch(nav.att);
  const Matrix3d dEda = d_euler_rate_d_azimuth(nav.att);
  F.block<3, 1>(6, 6) = dEdp * w_l + E * (dRdp * w_b);
  F.block<3, 1>(6, 7) = E * (dRdr * w_b);
  F.block<3, 1>(6, 8) = dEda * w_l + E * (dRda * w_b);
  F.block<3, 3>(6, 3) = -E * Jw;
  F.block<3, 1>(6, 0) = -E * (dwie_dlat + dwel_dlat);
  F.block<3, 1>(6, 2) = -E * dwel_dh;
  F.block<3, 3>(6, 9) = -E * R;

  return F;
}

}  // namespace

Matrix15 assemble_phi(const NavState& nav, const Vector3d& f_b, const Vector3d& w_b,
                      const SensorSpec& spec, double dt, const EarthModel& em) {
  Matrix15 phi = Matrix15::Identity();
  phi.topRows<9>() += pva_jacobian(nav, f_b, w_b, em) * dt;
  for (int i = 0; i < 3; ++i) {
    phi(9 + i, 9 + i) = 1.0 - spec.beta_gyro[i] * dt;
    phi(12 + i, 12 + i) = 1.0 - spec.beta_accel[i] * dt;
  }
  return phi;
}

Matrix15 assemble_phi_frozen(const SensorSpec& spec, double dt) {
  Matrix15 phi = Matrix15::Identity();
  for (int i = 0; i < 3; ++i) {
    phi(9 + i, 9 + i) = 1.0 - spec.beta_gyro[i] * dt;
    phi(12 + i, 12 + i) = 1.0 - spec.beta_accel[i] * dt;
  }
  return phi;
}

Matrix12 build_Q(const SensorSpec& spec) {
  Matrix12 Q = Matrix12::Zero();
  Q.diagonal().segment<3>(0) = spec.sigma2_gyro_noise;
  Q.diagonal().segment<3>(3) = spec.sigma2_accel_noise;
  Q.diagonal().segment<3>(6) = spec.sigma2_gyro_bias;
  Q.diagonal().segment<3>(9) = spec.sigma2_accel_bias;
  return Q;
}

Matrix15x12 build_G(const NavState& nav, const SensorSpec& spec) {
  Matrix15x12 G = Matrix15x12::Zero();
  const Matrix3d R = rotation_body_to_local(nav.att);
  G.block<3, 3>(3, 3) = R;  // accel noise into velocity
  G.block<3, 3>(6, 0) = R;  // gyro noise into attitude
  for (int i = 0; i < 3; ++i) {
    G(9 + i, 6 + i) = std::sqrt(2.0 * spec.beta_gyro[i]);
    G(12 + i, 9 + i) = std::sqrt(2.0 * spec.beta_accel[i]);
  }
  return G;
}

FilterState predict(const FilterState& fs, const ImuSample& imu, const SensorSpec& spec,
                    double dt, const EarthModel& em, bool frozen) {
  FilterState out;
  const NavState nav = nav_from_filter(fs);
  const BiasState bias = bias_from_filter(fs);

  Matrix15 phi;
  if (frozen) {
    NavState held = nav;
    held.t = fs.t + dt;
    held.vel.setZero();
    set_filter_nav(out, held);
    phi = assemble_phi_frozen(spec, dt);
  } else {
    const NavState next = mech_step(nav, imu.f_b, imu.w_b, bias, dt, em);
    set_filter_nav(out, next);
    phi = assemble_phi(nav, imu.f_b - bias.df, imu.w_b - bias.dw, spec, dt, em);
  }
  set_filter_bias(out, gm_propagate(bias, spec, dt));
  out.t = fs.t + dt;

  const Matrix15x12 G = build_G(nav, spec);
  const Matrix12 Q = build_Q(spec);
  Matrix15 P = phi * fs.P * phi.transpose() + G * Q * G.transpose() * dt;
  out.P = 0.5 * (P + P.transpose());
  return out;
}

UpdateOutcome update(const FilterState& fs, const Measurement& z, const EarthModel& em,
                     double gate_chi2) {
  if (!z.pos && !z.vel) throw std::invalid_argument("update: empty measurement");

  const int k = (z.pos ? 3 : 0) + (z.vel ? 3 : 0);
  Eigen::MatrixXd H = Eigen::MatrixXd::Zero(k, 15);
  Eigen::VectorXd nu(k);
  Eigen::VectorXd Rdiag(k);

  int row = 0;
  if (z.pos) {
    const Radii rad = radii(em, fs.x[0]);
    const double Mh = rad.M + fs.x[2];
    const double Nhc = (rad.N + fs.x[2]) * std::cos(fs.x[0]);
    H(row + 0, 0) = 1.0;
    H(row + 1, 1) = 1.0;
    H(row + 2, 2) = 1.0;
    nu[row + 0] = z.pos->lat - fs.x[0];
    nu[row + 1] = z.pos->lon - fs.x[1];
    nu[row + 2] = z.pos->h - fs.x[2];
    // ENU meter variances to (rad, rad, m): north->lat, east->lon.
    Rdiag[row + 0] = z.pos_cov(1, 1) / (Mh * Mh);
    Rdiag[row + 1] = z.pos_cov(0, 0) / (Nhc * Nhc);
    Rdiag[row + 2] = z.pos_cov(2, 2);
    row += 3;
  }
  if (z.vel) {
    for (int i = 0; i < 3; ++i) {
      H(row + i, 3 + i) = 1.0;
      nu[row + i] = (*z.vel)[i] - fs.x[3 + i];
      Rdiag[row + i] = z.vel_var[i];
    }
  }

  const Eigen::MatrixXd R = Rdiag.asDiagonal();
  const Eigen::MatrixXd S = H * fs.P * H.transpose() + R;
  const Eigen::LDLT<Eigen::MatrixXd> Sldlt(S);

  UpdateOutcome out;
  out.chi2 = nu.dot(Sldlt.solve(nu));
  if (gate_chi2 > 0.0 && out.chi2 > gate_chi2) {
    out.fs = fs;
    out.applied = false;
    return out;
  }

  const Eigen::MatrixXd K = Sldlt.solve(H * fs.P).transpose();
  FilterState next = fs;
  next.x += K * nu;
  next.x[8] = wrap_azimuth(next.x[8]);
  const Matrix15 IKH = Matrix15::Identity() - K * H;
  Matrix15 P = IKH * fs.P * IKH.transpose() + K * R * K.transpose();
  next.P = 0.5 * (P + P.transpose());
  out.fs = next;
  return out;
}

}  // namespace navfuse

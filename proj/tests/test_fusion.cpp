#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "navfuse/frames.hpp"
#include "navfuse/fusion.hpp"
#include "navfuse/mechanization.hpp"

using namespace navfuse;

namespace {

NavState moving_nav() {
  NavState nav;
  nav.t = 10.0;
  nav.pos = {0.7618362184955249, -1.3864895577842953, 100.0};
  nav.vel = {8.0, 2.0, 0.3};
  nav.att = {0.02, -0.01, 1.2};
  nav.q = quat_from_attitude(nav.att);
  return nav;
}

FilterState diagonal_state(const Vector15& pdiag) {
  FilterState fs;
  set_filter_nav(fs, moving_nav());
  fs.t = 10.0;
  fs.P = pdiag.asDiagonal();
  return fs;
}

double min_eigenvalue(const Matrix15& P) {
  Eigen::SelfAdjointEigenSolver<Matrix15> es(P);
  return es.eigenvalues().minCoeff();
}

}  // namespace

TEST_CASE("filter state packs and unpacks the nav and bias blocks") {
  FilterState fs;
  NavState nav = moving_nav();
  BiasState b;
  b.dw = {1e-4, -2e-4, 3e-4};
  b.df = {0.01, -0.02, 0.03};
  set_filter_nav(fs, nav);
  set_filter_bias(fs, b);

  const NavState nav2 = nav_from_filter(fs);
  CHECK(nav2.pos.lat == nav.pos.lat);
  CHECK(nav2.pos.lon == nav.pos.lon);
  CHECK(nav2.pos.h == nav.pos.h);
  CHECK((nav2.vel - nav.vel).norm() == 0.0);
  CHECK(nav2.att.p == nav.att.p);
  CHECK(nav2.att.r == nav.att.r);
  CHECK(nav2.att.a == nav.att.a);
  // the quaternion is rebuilt from the packed Euler angles
  CHECK(std::abs(nav2.q.coeffs().dot(nav.q.coeffs())) == doctest::Approx(1.0).epsilon(1e-12));

  const BiasState b2 = bias_from_filter(fs);
  CHECK((b2.dw - b.dw).norm() == 0.0);
  CHECK((b2.df - b.df).norm() == 0.0);
}

TEST_CASE("transition matrix carries the documented coupling structure") {
  const EarthModel em;
  const NavState nav = moving_nav();
  const SensorSpec spec;
  const double dt = 0.05;
  const Vector3d f_b(0.3, 0.1, 9.8);
  const Vector3d w_b(0.01, -0.02, 0.005);

  const Matrix15 phi = assemble_phi(nav, f_b, w_b, spec, dt, em);
  const Radii rad = radii(em, nav.pos.lat);

  // position rows integrate velocity through the local radii
  CHECK(phi(0, 4) == doctest::Approx(dt / (rad.M + nav.pos.h)).epsilon(1e-12));
  CHECK(phi(1, 3) ==
        doctest::Approx(dt / ((rad.N + nav.pos.h) * std::cos(nav.pos.lat))).epsilon(1e-12));
  CHECK(phi(2, 5) == doctest::Approx(dt).epsilon(1e-15));

  // accel bias feeds velocity through -R dt; gyro bias feeds attitude
  // through -E R dt (the same rotation the mechanization subtracts)
  const Matrix3d R = rotation_body_to_local(nav.att);
  const Matrix3d ER = euler_rate_matrix(nav.att) * R;
  CHECK((phi.block<3, 3>(3, 12) + R * dt).cwiseAbs().maxCoeff() < 1e-12);
  CHECK((phi.block<3, 3>(6, 9) + ER * dt).cwiseAbs().maxCoeff() < 1e-12);

  // attitude sensitivity of the velocity rows matches the rotation derivative
  const Vector3d col = d_rotation_d_pitch(nav.att) * f_b * dt;
  CHECK((phi.block<3, 1>(3, 6) - col).cwiseAbs().maxCoeff() < 1e-12);

  // biases decay independently and feed nothing else
  for (int i = 0; i < 3; ++i) {
    CHECK(phi(9 + i, 9 + i) == doctest::Approx(1.0 - spec.beta_gyro[i] * dt).epsilon(1e-15));
    CHECK(phi(12 + i, 12 + i) == doctest::Approx(1.0 - spec.beta_accel[i] * dt).epsilon(1e-15));
  }
  CHECK(phi.block<6, 9>(9, 0).isZero(0.0));
  CHECK(phi.block<3, 6>(0, 9).isZero(0.0));

  // the frozen variant holds the whole PVA block at identity
  const Matrix15 phif = assemble_phi_frozen(spec, dt);
  CHECK((phif.topLeftCorner<9, 9>() - Eigen::Matrix<double, 9, 9>::Identity())
            .cwiseAbs()
            .maxCoeff() == 0.0);
  CHECK(phif.topRightCorner<9, 6>().isZero(0.0));
  CHECK(phif(9, 9) == doctest::Approx(1.0 - spec.beta_gyro[0] * dt));
}

TEST_CASE("one prediction from zero covariance injects exactly the driving noise") {
  const EarthModel em;
  const SensorSpec spec;
  const double dt = 0.05;

  FilterState fs = diagonal_state(Vector15::Zero());
  // pitch/roll zero so the rotation is orthonormal in the horizontal plane
  NavState nav = moving_nav();
  nav.att = {0.0, 0.0, 1.2};
  nav.q = quat_from_attitude(nav.att);
  set_filter_nav(fs, nav);

  ImuSample imu;
  imu.t = 10.05;
  imu.f_b = nav.q.conjugate() * Vector3d(0, 0, em.gravity(nav.pos.lat, nav.pos.h));
  imu.w_b = Vector3d::Zero();

  const FilterState next = predict(fs, imu, spec, dt, em);

  // isotropic accel noise lands on the velocity diagonal unchanged by R
  for (int i = 3; i < 6; ++i) {
    CHECK(next.P(i, i) == doctest::Approx(spec.sigma2_accel_noise[0] * dt).epsilon(1e-9));
  }
  for (int i = 6; i < 9; ++i) {
    CHECK(next.P(i, i) == doctest::Approx(spec.sigma2_gyro_noise[0] * dt).epsilon(1e-9));
  }
  // Gauss-Markov driving terms 2 beta sigma_B^2 dt on the bias diagonal
  for (int i = 0; i < 3; ++i) {
    const double qg = 2.0 * spec.beta_gyro[i] * spec.sigma2_gyro_bias[i] * dt;
    const double qa = 2.0 * spec.beta_accel[i] * spec.sigma2_accel_bias[i] * dt;
    CHECK(std::abs(next.P(9 + i, 9 + i) - qg) < 1e-6 * qg);
    CHECK(std::abs(next.P(12 + i, 12 + i) - qa) < 1e-6 * qa);
  }
  // position picks up nothing in a single step from zero covariance
  CHECK(next.P.topLeftCorner<3, 3>().cwiseAbs().maxCoeff() < 1e-15);
  // and the result is exactly symmetric
  CHECK((next.P - next.P.transpose()).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("prediction keeps a stationary-variance bias exactly stationary") {
  const EarthModel em;
  const SensorSpec spec;
  const double dt = 0.05;

  Vector15 pdiag = Vector15::Zero();
  for (int i = 0; i < 3; ++i) {
    pdiag[9 + i] = spec.sigma2_gyro_bias[i];
    pdiag[12 + i] = spec.sigma2_accel_bias[i];
  }
  FilterState fs = diagonal_state(pdiag);

  ImuSample imu;
  imu.t = 10.05;
  const NavState nav = nav_from_filter(fs);
  imu.f_b = nav.q.conjugate() * Vector3d(0, 0, em.gravity(nav.pos.lat, nav.pos.h));
  imu.w_b = Vector3d::Zero();

  const FilterState next = predict(fs, imu, spec, dt, em);
  for (int i = 9; i < 15; ++i) {
    // (1 - beta dt)^2 sigma^2 + 2 beta sigma^2 dt = sigma^2 (1 + (beta dt)^2)
    CHECK(std::abs(next.P(i, i) - fs.P(i, i)) < 1e-6 * fs.P(i, i));
  }
}

TEST_CASE("prediction mean is one mechanization step with the estimated biases") {
  const EarthModel em;
  const SensorSpec spec;
  const double dt = 0.05;

  FilterState fs = diagonal_state(Vector15::Constant(1e-6));
  BiasState b;
  b.dw = {2e-4, -1e-4, 5e-5};
  b.df = {0.01, -0.005, 0.02};
  set_filter_bias(fs, b);

  ImuSample imu;
  imu.t = 10.05;
  imu.f_b = {0.3, 0.1, 9.8};
  imu.w_b = {0.01, -0.02, 0.005};

  const FilterState next = predict(fs, imu, spec, dt, em);
  const NavState expect = mech_step(nav_from_filter(fs), imu.f_b, imu.w_b, b, dt, em);
  CHECK(next.x[0] == doctest::Approx(expect.pos.lat).epsilon(1e-15));
  CHECK(next.x[1] == doctest::Approx(expect.pos.lon).epsilon(1e-15));
  CHECK(next.x[2] == doctest::Approx(expect.pos.h).epsilon(1e-12));
  CHECK((next.x.segment<3>(3) - expect.vel).cwiseAbs().maxCoeff() < 1e-12);
  CHECK(next.x[8] == doctest::Approx(expect.att.a).epsilon(1e-12));
  // bias means decay on the Gauss-Markov time constant
  CHECK(next.x[9] == doctest::Approx(b.dw.x() * (1.0 - spec.beta_gyro[0] * dt)).epsilon(1e-12));
  CHECK(next.x[12] == doctest::Approx(b.df.x() * (1.0 - spec.beta_accel[0] * dt)).epsilon(1e-12));
  CHECK(next.t == doctest::Approx(10.05));
}

TEST_CASE("frozen prediction holds the nav state and still decays the biases") {
  const EarthModel em;
  const SensorSpec spec;
  const double dt = 0.05;

  FilterState fs = diagonal_state(Vector15::Constant(0.01));
  BiasState b;
  b.dw = {2e-4, 0, 0};
  b.df = {0.01, 0, 0};
  set_filter_bias(fs, b);

  ImuSample imu;
  imu.t = 10.05;
  imu.f_b = {5.0, 5.0, 5.0};  // wild inputs must not leak into the held state
  imu.w_b = {0.5, 0.5, 0.5};

  const FilterState next = predict(fs, imu, spec, dt, em, /*frozen=*/true);
  CHECK(next.x[0] == fs.x[0]);
  CHECK(next.x[1] == fs.x[1]);
  CHECK(next.x[2] == fs.x[2]);
  CHECK(next.x.segment<3>(3).cwiseAbs().maxCoeff() == 0.0);  // velocity pinned at zero
  CHECK(next.x[8] == fs.x[8]);
  CHECK(next.x[9] == doctest::Approx(2e-4 * (1.0 - spec.beta_gyro[0] * dt)).epsilon(1e-12));
  // the held PVA covariance block does not rotate, only the noise injection adds
  CHECK(next.P(0, 0) == doctest::Approx(fs.P(0, 0)).epsilon(1e-12));
  CHECK(next.P(3, 3) ==
        doctest::Approx(fs.P(3, 3) + spec.sigma2_accel_noise[0] * dt).epsilon(1e-9));
}

TEST_CASE("height channel update reproduces the textbook scalar gain") {
  const EarthModel em;
  Vector15 pdiag = Vector15::Constant(1e-12);
  pdiag[2] = 4.0;
  FilterState fs = diagonal_state(pdiag);

  Measurement z;
  Geodetic mpos{fs.x[0], fs.x[1], fs.x[2] + 2.0};
  z.pos = mpos;
  z.pos_cov = Eigen::Vector3d(1.0, 1.0, 4.0).asDiagonal();

  const UpdateOutcome out = update(fs, z, em);
  REQUIRE(out.applied);
  // K = P/(P+R) = 1/2: the 2 m innovation moves the estimate 1 m
  CHECK(out.fs.x[2] - fs.x[2] == doctest::Approx(1.0).epsilon(1e-12));
  // Joseph form: (1-K)^2 P + K^2 R = 2
  CHECK(out.fs.P(2, 2) == doctest::Approx(2.0).epsilon(1e-12));
  // chi2 = nu^2 / S = 4 / 8 (lat/lon innovations are zero)
  CHECK(out.chi2 == doctest::Approx(0.5).epsilon(1e-9));
  // untouched channels keep mean and variance
  CHECK(out.fs.x[3] == fs.x[3]);
  CHECK(out.fs.P(3, 3) == doctest::Approx(fs.P(3, 3)).epsilon(1e-9));
}

TEST_CASE("meter-valued fix covariance converts onto the right angular axes") {
  const EarthModel em;
  const Radii rad = radii(em, 0.7618362184955249);
  const double Mh = rad.M + 100.0;
  const double Nhc = (rad.N + 100.0) * std::cos(0.7618362184955249);

  // east sigma^2 = 9 must land on the longitude row, north sigma^2 = 100 on
  // the latitude row; priors are set equal to the converted variances so a
  // swap would show up as a gain far from 1/2.
  Vector15 pdiag = Vector15::Constant(1e-15);
  pdiag[0] = 100.0 / (Mh * Mh);
  pdiag[1] = 9.0 / (Nhc * Nhc);
  FilterState fs = diagonal_state(pdiag);

  Measurement z;
  Geodetic mpos{fs.x[0] + 2.0 / Mh, fs.x[1] + 2.0 / Nhc, fs.x[2]};
  z.pos = mpos;
  z.pos_cov = Eigen::Vector3d(9.0, 100.0, 1.0).asDiagonal();

  const UpdateOutcome out = update(fs, z, em);
  REQUIRE(out.applied);
  const double north_shift = (out.fs.x[0] - fs.x[0]) * Mh;
  const double east_shift = (out.fs.x[1] - fs.x[1]) * Nhc;
  CHECK(north_shift == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(east_shift == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("velocity update uses the per-axis odometer variance") {
  const EarthModel em;
  Vector15 pdiag = Vector15::Constant(1e-12);
  pdiag[3] = 0.04;
  pdiag[4] = 0.04;
  pdiag[5] = 0.04;
  FilterState fs = diagonal_state(pdiag);

  Measurement z;
  z.vel = Vector3d(fs.x[3] + 0.2, fs.x[4], fs.x[5]);
  z.vel_var = Vector3d(0.04, 0.04, 0.04);

  const UpdateOutcome out = update(fs, z, em);
  REQUIRE(out.applied);
  CHECK(out.fs.x[3] - fs.x[3] == doctest::Approx(0.1).epsilon(1e-12));
  CHECK(out.fs.P(3, 3) == doctest::Approx(0.02).epsilon(1e-12));
  CHECK(out.fs.P(4, 4) == doctest::Approx(0.02).epsilon(1e-12));
}

TEST_CASE("the innovation gate rejects an outlier and leaves the state alone") {
  const EarthModel em;
  Vector15 pdiag = Vector15::Constant(1e-12);
  pdiag[2] = 4.0;
  FilterState fs = diagonal_state(pdiag);

  Measurement z;
  Geodetic mpos{fs.x[0], fs.x[1], fs.x[2] + 50.0};
  z.pos = mpos;
  z.pos_cov = Eigen::Vector3d(1.0, 1.0, 4.0).asDiagonal();

  const UpdateOutcome gated = update(fs, z, em, 11.345);
  CHECK_FALSE(gated.applied);
  CHECK(gated.chi2 > 11.345);
  CHECK((gated.fs.x - fs.x).cwiseAbs().maxCoeff() == 0.0);
  CHECK((gated.fs.P - fs.P).cwiseAbs().maxCoeff() == 0.0);

  // gate disabled: the same outlier is folded in
  const UpdateOutcome open = update(fs, z, em, 0.0);
  CHECK(open.applied);
  CHECK(open.fs.x[2] > fs.x[2] + 20.0);

  // a consistent measurement passes the same gate
  Geodetic good{fs.x[0], fs.x[1], fs.x[2] + 2.0};
  z.pos = good;
  const UpdateOutcome ok = update(fs, z, em, 11.345);
  CHECK(ok.applied);
  CHECK(ok.chi2 == doctest::Approx(0.5).epsilon(1e-9));
}

TEST_CASE("updating with the state itself never grows any variance") {
  const EarthModel em;
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-1.0, 1.0);

  for (int trial = 0; trial < 20; ++trial) {
    Matrix15 A;
    for (int i = 0; i < 15; ++i)
      for (int j = 0; j < 15; ++j) A(i, j) = u(rng);
    FilterState fs = diagonal_state(Vector15::Zero());
    fs.P = A * A.transpose() / 15.0 + 1e-9 * Matrix15::Identity();

    Measurement z;
    z.pos = Geodetic{fs.x[0], fs.x[1], fs.x[2]};
    z.pos_cov = Eigen::Vector3d(4.0, 4.0, 1.0).asDiagonal();
    z.vel = Vector3d(fs.x[3], fs.x[4], fs.x[5]);
    z.vel_var = Vector3d(0.01, 0.01, 0.04);

    const UpdateOutcome out = update(fs, z, em);
    REQUIRE(out.applied);
    CHECK((out.fs.x - fs.x).cwiseAbs().maxCoeff() < 1e-12);
    for (int i = 0; i < 15; ++i) {
      CHECK(out.fs.P(i, i) <= fs.P(i, i) + 1e-12);
    }
    CHECK(min_eigenvalue(out.fs.P) > -1e-12);
  }
}

TEST_CASE("joint and sequential processing of one epoch agree") {
  const EarthModel em;
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-1.0, 1.0);

  for (int trial = 0; trial < 10; ++trial) {
    Matrix15 A;
    for (int i = 0; i < 15; ++i)
      for (int j = 0; j < 15; ++j) A(i, j) = u(rng);
    FilterState fs = diagonal_state(Vector15::Zero());
    fs.P = A * A.transpose() / 15.0 + 1e-9 * Matrix15::Identity();

    Measurement both;
    both.pos = Geodetic{fs.x[0] + 3e-7 * u(rng), fs.x[1] + 3e-7 * u(rng), fs.x[2] + u(rng)};
    both.pos_cov = Eigen::Vector3d(4.0, 9.0, 1.0).asDiagonal();
    both.vel = Vector3d(fs.x[3] + u(rng), fs.x[4] + u(rng), fs.x[5] + u(rng));
    both.vel_var = Vector3d(0.01, 0.02, 0.04);

    Measurement pos_only;
    pos_only.pos = both.pos;
    pos_only.pos_cov = both.pos_cov;
    Measurement vel_only;
    vel_only.vel = both.vel;
    vel_only.vel_var = both.vel_var;

    const FilterState joint = update(fs, both, em).fs;
    const FilterState seq = update(update(fs, pos_only, em).fs, vel_only, em).fs;

    CHECK((joint.x - seq.x).cwiseAbs().maxCoeff() < 1e-8);
    CHECK((joint.P - seq.P).cwiseAbs().maxCoeff() < 1e-8);
  }
}

TEST_CASE("joseph form stays positive semidefinite under a razor-sharp measurement") {
  const EarthModel em;
  Vector15 pdiag = Vector15::Constant(1.0);
  pdiag[0] = 1e-8;
  pdiag[1] = 1e-8;
  FilterState fs = diagonal_state(pdiag);

  Measurement z;
  z.pos = Geodetic{fs.x[0], fs.x[1], fs.x[2] + 1.0};
  z.pos_cov = Eigen::Vector3d(1e-12, 1e-12, 1e-12).asDiagonal();
  z.vel = Vector3d(fs.x[3] + 0.5, fs.x[4], fs.x[5]);
  z.vel_var = Vector3d(1e-12, 1e-12, 1e-12);

  const UpdateOutcome out = update(fs, z, em);
  REQUIRE(out.applied);
  CHECK((out.fs.P - out.fs.P.transpose()).cwiseAbs().maxCoeff() == 0.0);
  CHECK(min_eigenvalue(out.fs.P) > -1e-9);
  // the measured channels collapse onto the measurement
  CHECK(out.fs.x[2] == doctest::Approx(fs.x[2] + 1.0).epsilon(1e-6));
  CHECK(out.fs.P(2, 2) < 1e-10);
}

TEST_CASE("an update pushing the azimuth past 2pi wraps it back into range") {
  const EarthModel em;
  Vector15 pdiag = Vector15::Constant(1e-12);
  pdiag[2] = 4.0;
  pdiag[8] = 4.0;
  FilterState fs = diagonal_state(pdiag);
  fs.x[8] = 2.0 * std::numbers::pi - 0.5;
  fs.P(8, 2) = fs.P(2, 8) = 3.9;  // height errors strongly steer the azimuth

  Measurement z;
  z.pos = Geodetic{fs.x[0], fs.x[1], fs.x[2] + 2.0};
  z.pos_cov = Eigen::Vector3d(1e12, 1e12, 4.0).asDiagonal();

  const UpdateOutcome out = update(fs, z, em);
  REQUIRE(out.applied);
  // gain into azimuth: P(8,2)/S = 3.9/8, innovation 2 -> step 0.975 past 2pi
  const double expect = wrap_azimuth(2.0 * std::numbers::pi - 0.5 + 2.0 * 3.9 / 8.0);
  CHECK(expect < 1.0);  // wrapped back past zero, not left at ~6.76
  CHECK(out.fs.x[8] == doctest::Approx(expect).epsilon(1e-6));
  CHECK(out.fs.x[8] >= 0.0);
  CHECK(out.fs.x[8] < 2.0 * std::numbers::pi);
}

TEST_CASE("an empty measurement is refused") {
  const EarthModel em;
  FilterState fs = diagonal_state(Vector15::Constant(1.0));
  Measurement z;
  CHECK_THROWS_AS(update(fs, z, em), std::invalid_argument);
}

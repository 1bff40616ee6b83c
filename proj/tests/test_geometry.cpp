#include <doctest.h>

#include <cmath>
#include <random>

#include "lrfcal/geometry.hpp"
#include "lrfcal/rng.hpp"

using namespace lrfcal;

namespace {

Mat3 random_rotation(std::mt19937_64& rng) {
    // Compose three axis-angle rotations about randomized axes.
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    std::uniform_real_distribution<double> ang(0.0, M_PI);
    Mat3 r = Mat3::Identity();
    for (int k = 0; k < 3; ++k) {
        Vec3 axis(unit(rng), unit(rng), unit(rng));
        while (axis.norm() < 1e-3) {
            axis = Vec3(unit(rng), unit(rng), unit(rng));
        }
        r = axis_angle_to_rotation(AxisAngle(axis.normalized(), ang(rng))) * r;
    }
    return r;
}

Transform random_transform(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    return Transform(random_rotation(rng), Vec3(unit(rng), unit(rng), unit(rng)));
}

} // namespace

TEST_CASE("axis_angle_to_rotation basic cases") {
    const Mat3 ident = axis_angle_to_rotation(AxisAngle(Vec3(0, 0, 1), 0.0));
    CHECK((ident - Mat3::Identity()).cwiseAbs().maxCoeff() < 1e-15);

    const Mat3 half_turn = axis_angle_to_rotation(AxisAngle(Vec3(0, 0, 1), M_PI));
    Mat3 expected;
    expected << -1, 0, 0, 0, -1, 0, 0, 0, 1;
    CHECK((half_turn - expected).cwiseAbs().maxCoeff() < 1e-15);

    const Mat3 quarter_x = axis_angle_to_rotation(AxisAngle(Vec3(1, 0, 0), M_PI / 2.0));
    CHECK((quarter_x * Vec3(0, 1, 0) - Vec3(0, 0, 1)).norm() < 1e-15);
}

TEST_CASE("axis_angle_to_rotation leaves the axis fixed") {
    auto rng = make_rng(11);
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    std::uniform_real_distribution<double> ang(0.0, M_PI);
    for (int i = 0; i < 100; ++i) {
        const Vec3 axis = Vec3(unit(rng), unit(rng), unit(rng)).normalized();
        const Mat3 r = axis_angle_to_rotation(AxisAngle(axis, ang(rng)));
        CHECK((r * axis - axis).norm() < 1e-12);
        CHECK((r.transpose() * r - Mat3::Identity()).cwiseAbs().maxCoeff() < 1e-12);
        CHECK(r.determinant() == doctest::Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("rotation_to_axis_angle conventions") {
    const AxisAngle ident = rotation_to_axis_angle(Mat3::Identity());
    CHECK(ident.angle == 0.0);
    CHECK((ident.axis - Vec3(0, 0, 1)).norm() == 0.0);

    Mat3 half_turn;
    half_turn << -1, 0, 0, 0, -1, 0, 0, 0, 1;
    const AxisAngle aa = rotation_to_axis_angle(half_turn);
    CHECK(aa.angle == doctest::Approx(M_PI).epsilon(1e-12));
    CHECK((aa.axis - Vec3(0, 0, 1)).norm() < 1e-12);
}

TEST_CASE("rotation_to_axis_angle pi tie-break picks positive leading component") {
    // Half turn about -x must report the +x axis.
    const Mat3 r = axis_angle_to_rotation(AxisAngle(Vec3(-1, 0, 0), M_PI));
    const AxisAngle aa = rotation_to_axis_angle(r);
    CHECK(aa.axis.x() == doctest::Approx(1.0).epsilon(1e-12));
    // And the convention is idempotent through a second round trip.
    const AxisAngle aa2 = rotation_to_axis_angle(axis_angle_to_rotation(aa));
    CHECK((aa.axis - aa2.axis).norm() < 1e-9);
    CHECK(aa.angle == doctest::Approx(aa2.angle).epsilon(1e-12));
}

TEST_CASE("axis-angle round trip over 1000 seeded rotations") {
    auto rng = make_rng(42);
    for (int i = 0; i < 1000; ++i) {
        const Mat3 r = random_rotation(rng);
        const Mat3 r2 = axis_angle_to_rotation(rotation_to_axis_angle(r));
        CHECK((r - r2).cwiseAbs().maxCoeff() < 1e-9);
    }
}

TEST_CASE("compose and invert laws") {
    auto rng = make_rng(7);
    const Transform t = random_transform(rng);

    const Transform left = compose(Transform::identity(), t);
    CHECK((left.rotation() - t.rotation()).cwiseAbs().maxCoeff() < 1e-15);
    CHECK((left.translation() - t.translation()).norm() < 1e-15);

    const Transform inv_ident = invert(Transform::identity());
    CHECK((inv_ident.matrix() - Mat4::Identity()).cwiseAbs().maxCoeff() < 1e-15);

    for (int i = 0; i < 100; ++i) {
        const Transform u = random_transform(rng);
        const Transform round = compose(invert(u), u);
        CHECK((round.rotation() - Mat3::Identity()).cwiseAbs().maxCoeff() < 1e-10);
        CHECK(round.translation().norm() < 1e-10);
        const Transform round2 = compose(u, invert(u));
        CHECK((round2.matrix() - Mat4::Identity()).cwiseAbs().maxCoeff() < 1e-10);
    }
}

TEST_CASE("composition is associative") {
    auto rng = make_rng(13);
    for (int i = 0; i < 50; ++i) {
        const Transform a = random_transform(rng);
        const Transform b = random_transform(rng);
        const Transform c = random_transform(rng);
        const Transform left = (a * b) * c;
        const Transform right = a * (b * c);
        CHECK((left.matrix() - right.matrix()).cwiseAbs().maxCoeff() < 1e-9);
    }
}

TEST_CASE("plane_residual basic cases") {
    const PlaneParams bottom(Vec3(0, 0, 1), 0.0);
    CHECK(plane_residual(bottom, Vec3(0.3, 0.2, 0.0)) == 0.0);
    CHECK(plane_residual(bottom, Vec3(0.0, 0.0, 0.005)) == doctest::Approx(0.005).epsilon(1e-15));

    const PlaneParams wall(Vec3(1, 0, 0), 0.8);
    CHECK(plane_residual(wall, Vec3(0.8, 0.1, 0.2)) == doctest::Approx(0.0).epsilon(1e-15));
}

TEST_CASE("plane_residual invariant under rotation about the normal") {
    auto rng = make_rng(99);
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    std::uniform_real_distribution<double> ang(0.0, M_PI);
    for (int i = 0; i < 100; ++i) {
        const Vec3 n = Vec3(unit(rng), unit(rng), unit(rng)).normalized();
        const double l = unit(rng);
        const PlaneParams plane(n, l);
        const Vec3 anchor = n * l; // a point on the plane
        const Vec3 p(unit(rng), unit(rng), unit(rng));
        const Mat3 r = axis_angle_to_rotation(AxisAngle(n, ang(rng)));
        const Vec3 rotated = r * (p - anchor) + anchor;
        CHECK(std::abs(plane_residual(plane, rotated) - plane_residual(plane, p)) < 1e-10);
    }
}

TEST_CASE("invalid constructions are rejected") {
    CHECK_THROWS(AxisAngle(Vec3(0, 0, 2), 0.1));
    CHECK_THROWS(AxisAngle(Vec3(0, 0, 1), -0.1));
    CHECK_THROWS(PlaneParams(Vec3(0, 0, 0.5), 0.0));
    Mat3 bad = Mat3::Identity();
    bad(0, 0) = 1.5;
    CHECK_THROWS(Transform(bad, Vec3::Zero()));
}

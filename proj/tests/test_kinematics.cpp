#include <doctest.h>

#include <cmath>
#include <random>

#include "lrfcal/kinematics.hpp"
#include "lrfcal/rng.hpp"

using namespace lrfcal;

namespace {

// Independent oracle: the closed-form modified-DH link matrix (Craig),
// multiplied long-hand as 4x4 matrices. Deliberately does not reuse the
// library's Transform composition.
Mat4 oracle_link_matrix(double alpha, double a, double theta, double d) {
    const double ct = std::cos(theta);
    const double st = std::sin(theta);
    const double ca = std::cos(alpha);
    const double sa = std::sin(alpha);
    Mat4 m;
    m << ct, -st, 0.0, a,
         st * ca, ct * ca, -sa, -sa * d,
         st * sa, ct * sa, ca, ca * d,
         0.0, 0.0, 0.0, 1.0;
    return m;
}

Mat4 oracle_chain(const RobotModel& model, const JointVector& q) {
    Mat4 t = Mat4::Identity();
    for (int i = 0; i < 6; ++i) {
        const DhRow& r = model.row(i);
        t = t * oracle_link_matrix(r.alpha, r.a, r.theta_offset + q(i), r.d);
    }
    return t;
}

JointVector random_joints(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(-1.5, 1.5);
    JointVector q;
    for (int i = 0; i < 6; ++i) {
        q(i) = u(rng);
    }
    return q;
}

} // namespace

TEST_CASE("link_transform matches Table-style rows") {
    // Pure prismatic-like row: only d set.
    const Transform t1 = link_transform(DhRow{0.0, 0.0, 0.0, 0.345}, 0.0);
    CHECK((t1.rotation() - Mat3::Identity()).cwiseAbs().maxCoeff() < 1e-15);
    CHECK((t1.translation() - Vec3(0, 0, 0.345)).norm() < 1e-15);

    // Pure z-rotation.
    const Transform t2 = link_transform(DhRow{0.0, 0.0, 0.0, 0.0}, M_PI / 2.0);
    Mat3 rz;
    rz << 0, -1, 0, 1, 0, 0, 0, 0, 1;
    CHECK((t2.rotation() - rz).cwiseAbs().maxCoeff() < 1e-15);
    CHECK(t2.translation().norm() == 0.0);

    // Second Denso row at q=0: RotX(-90) * RotZ(-90), frozen from the
    // symbolic chain oracle.
    const double d2r = M_PI / 180.0;
    const Transform t3 = link_transform(DhRow{-90.0 * d2r, 0.0, -90.0 * d2r, 0.0}, 0.0);
    Mat3 expected;
    expected << 0, 1, 0,
                0, 0, 1,
                1, 0, 0;
    CHECK((t3.rotation() - expected).cwiseAbs().maxCoeff() < 1e-15);
    CHECK(t3.translation().norm() == 0.0);
    const Mat4 m = oracle_link_matrix(-90.0 * d2r, 0.0, -90.0 * d2r, 0.0);
    CHECK((t3.matrix() - m).cwiseAbs().maxCoeff() < 1e-15);
}

TEST_CASE("forward kinematics of the Denso model at home") {
    const RobotModel model = RobotModel::denso_vs060();
    const Transform t = forward_kinematics(model, JointVector::Zero());
    // Frozen from exact symbolic evaluation of the six-link chain:
    // identity rotation, translation (-0.010, 0, 1.020).
    CHECK((t.rotation() - Mat3::Identity()).cwiseAbs().maxCoeff() < 1e-14);
    CHECK((t.translation() - Vec3(-0.010, 0.0, 1.020)).norm() < 1e-14);

    const Mat4 oracle = oracle_chain(model, JointVector::Zero());
    CHECK((t.matrix() - oracle).cwiseAbs().maxCoeff() < 1e-13);
}

TEST_CASE("forward kinematics matches the long-hand chain oracle") {
    const RobotModel model = RobotModel::denso_vs060();
    auto rng = make_rng(5);
    for (int i = 0; i < 200; ++i) {
        const JointVector q = random_joints(rng);
        const Mat4 oracle = oracle_chain(model, q);
        const Mat4 lib = forward_kinematics(model, q).matrix();
        CHECK((lib - oracle).cwiseAbs().maxCoeff() < 1e-13);
    }
}

TEST_CASE("forward kinematics is 2-pi periodic per joint") {
    const RobotModel model = RobotModel::denso_vs060();
    auto rng = make_rng(6);
    const JointVector q = random_joints(rng);
    for (int j = 0; j < 6; ++j) {
        JointVector shifted = q;
        shifted(j) += 2.0 * M_PI;
        const Mat4 a = forward_kinematics(model, q).matrix();
        const Mat4 b = forward_kinematics(model, shifted).matrix();
        CHECK((a - b).cwiseAbs().maxCoeff() < 1e-9);
    }
}

TEST_CASE("d1 shifts the flange along base z") {
    const RobotModel model = RobotModel::denso_vs060();
    RobotModel shifted = model;
    shifted.row(0).d += 0.001;
    auto rng = make_rng(8);
    for (int i = 0; i < 20; ++i) {
        const JointVector q = random_joints(rng);
        const Transform a = forward_kinematics(model, q);
        const Transform b = forward_kinematics(shifted, q);
        CHECK((b.translation() - a.translation() - Vec3(0, 0, 0.001)).norm() < 1e-14);
        CHECK((b.rotation() - a.rotation()).cwiseAbs().maxCoeff() < 1e-14);
    }
}

TEST_CASE("lrf_point_in_base chains flange and extrinsic frames") {
    // Identity everywhere: the XZ scan point lifts straight into base xz.
    const RobotModel ident_model;
    const ExtrinsicParams ident_ext;
    const Vec3 p = lrf_point_in_base(ident_model, JointVector::Zero(), ident_ext, Vec2(0.1, 0.2));
    CHECK((p - Vec3(0.1, 0.0, 0.2)).norm() < 1e-15);

    // Pure extrinsic translation adds on.
    const ExtrinsicParams trans_ext(AxisAngle(Vec3(0, 0, 1), 0.0), Vec3(0.01, 0.02, 0.03));
    const Vec3 p2 = lrf_point_in_base(ident_model, JointVector::Zero(), trans_ext, Vec2(0.1, 0.2));
    CHECK((p2 - Vec3(0.11, 0.02, 0.23)).norm() < 1e-15);

    // Denso home pose with the reference extrinsic, frozen from the symbolic
    // oracle: origin maps to (-0.1375, -0.033, 1.1215), and (0.1, 0.2) maps
    // to (-0.2375, -0.033, 1.3215).
    const RobotModel model = RobotModel::denso_vs060();
    const ExtrinsicParams ext(AxisAngle(Vec3(0, 0, 1), M_PI), Vec3(-0.1275, -0.033, 0.1015));
    const Vec3 origin = lrf_point_in_base(model, JointVector::Zero(), ext, Vec2(0.0, 0.0));
    CHECK((origin - Vec3(-0.1375, -0.033, 1.1215)).norm() < 1e-14);
    const Vec3 p3 = lrf_point_in_base(model, JointVector::Zero(), ext, Vec2(0.1, 0.2));
    CHECK((p3 - Vec3(-0.2375, -0.033, 1.3215)).norm() < 1e-14);
}

TEST_CASE("forward kinematics is C1 in parameters and joints") {
    const RobotModel model = RobotModel::denso_vs060();
    auto rng = make_rng(17);
    const JointVector q = random_joints(rng);

    auto position = [&](const RobotModel& m, const JointVector& joints) {
        return forward_kinematics(m, joints).translation();
    };

    // Central differences at two step sizes must agree to first order.
    auto check_direction = [&](auto&& eval) {
        const double h1 = 1e-5;
        const double h2 = 1e-6;
        const Vec3 g1 = (eval(h1) - eval(-h1)) / (2.0 * h1);
        const Vec3 g2 = (eval(h2) - eval(-h2)) / (2.0 * h2);
        CHECK((g1 - g2).norm() < 1e-6 * std::max(1.0, g1.norm()) + 1e-8);
    };

    for (int j = 0; j < 6; ++j) {
        check_direction([&](double h) {
            JointVector qq = q;
            qq(j) += h;
            return position(model, qq);
        });
        check_direction([&](double h) {
            RobotModel m = model;
            m.row(j).alpha += h;
            return position(m, q);
        });
        check_direction([&](double h) {
            RobotModel m = model;
            m.row(j).d += h;
            return position(m, q);
        });
    }
}

TEST_CASE("lrf_point_in_base preserves distances between scan points") {
    const RobotModel model = RobotModel::denso_vs060();
    const ExtrinsicParams ext(AxisAngle(Vec3(0, 0, 1), M_PI), Vec3(-0.1275, -0.033, 0.1015));
    auto rng = make_rng(23);
    std::uniform_real_distribution<double> u(-0.5, 0.5);
    for (int i = 0; i < 50; ++i) {
        const JointVector q = random_joints(rng);
        const Vec2 a(u(rng), u(rng));
        const Vec2 b(u(rng), u(rng));
        const double d_scan = (a - b).norm();
        const double d_base =
            (lrf_point_in_base(model, q, ext, a) - lrf_point_in_base(model, q, ext, b)).norm();
        CHECK(d_base == doctest::Approx(d_scan).epsilon(1e-12));
    }
}

TEST_CASE("robot model JSON round trip with unit conversion") {
    const RobotModel model = RobotModel::denso_vs060();
    const std::string path = "test_robot_model.json";
    save_robot_model(model, path);
    const RobotModel loaded = load_robot_model(path);
    for (int i = 0; i < 6; ++i) {
        CHECK(loaded.row(i).alpha == doctest::Approx(model.row(i).alpha).epsilon(1e-12));
        CHECK(loaded.row(i).a == doctest::Approx(model.row(i).a).epsilon(1e-12));
        CHECK(loaded.row(i).theta_offset == doctest::Approx(model.row(i).theta_offset).epsilon(1e-12));
        CHECK(loaded.row(i).d == doctest::Approx(model.row(i).d).epsilon(1e-12));
    }
    std::remove(path.c_str());
}

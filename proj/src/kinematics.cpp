#include "lrfcal/kinematics.hpp"

#include <cmath>
#include <fstream>
#include <stdexcept>

#include <json.hpp>

namespace lrfcal {

namespace {

constexpr double kDegToRad = M_PI / 180.0;

Transform rot_x(double angle) {
    Mat3 r;
    const double c = std::cos(angle);
    const double s = std::sin(angle);
    r << 1.0, 0.0, 0.0,
         0.0, c, -s,
         0.0, s, c;
    return Transform(r, Vec3::Zero());
}

Transform rot_z(double angle) {
    Mat3 r;
    const double c = std::cos(angle);
    const double s = std::sin(angle);
    r << c, -s, 0.0,
         s, c, 0.0,
         0.0, 0.0, 1.0;
    return Transform(r, Vec3::Zero());
}

} // namespace

JointLimits JointLimits::defaults() {
    // Typical small-arm limits: wider on the roll joints 1, 4, 6.
    JointLimits limits;
    const double wide = 170.0 * kDegToRad;
    const double narrow = 120.0 * kDegToRad;
    limits.max_abs = {wide, narrow, narrow, wide, narrow, wide};
    return limits;
}

bool JointLimits::contains(const JointVector& q) const {
    for (int i = 0; i < 6; ++i) {
        if (std::abs(q(i)) > max_abs[static_cast<std::size_t>(i)]) {
            return false;
        }
    }
    return true;
}

RobotModel::RobotModel(const std::array<DhRow, 6>& rows) : rows_(rows) {
    for (const DhRow& row : rows_) {
        if (!std::isfinite(row.alpha) || !std::isfinite(row.a) || !std::isfinite(row.theta_offset) ||
            !std::isfinite(row.d)) {
            throw std::invalid_argument("DH parameters must be finite");
        }
    }
}

RobotModel RobotModel::denso_vs060() {
    const double d2r = kDegToRad;
    return RobotModel({{
        {0.0, 0.0, 0.0, 0.345},
        {-90.0 * d2r, 0.0, -90.0 * d2r, 0.0},
        {0.0, 0.305, 90.0 * d2r, 0.0},
        {90.0 * d2r, -0.010, 0.0, 0.300},
        {-90.0 * d2r, 0.0, 0.0, 0.0},
        {90.0 * d2r, 0.0, 0.0, 0.070},
    }});
}

Transform link_transform(const DhRow& row, double q) {
    const Transform rx = rot_x(row.alpha);
    const Transform tx(Mat3::Identity(), Vec3(row.a, 0.0, 0.0));
    const Transform rz = rot_z(row.theta_offset + q);
    const Transform tz(Mat3::Identity(), Vec3(0.0, 0.0, row.d));
    return rx * tx * rz * tz;
}

Transform forward_kinematics(const RobotModel& model, const JointVector& q) {
    Transform t;
    for (int i = 0; i < 6; ++i) {
        t = t * link_transform(model.row(i), q(i));
    }
    return t;
}

Vec3 lrf_point_in_base(const RobotModel& model, const JointVector& q, const ExtrinsicParams& ext,
                       const Vec2& point_xz) {
    const Transform base_to_lrf = forward_kinematics(model, q) * extrinsic_to_transform(ext);
    return base_to_lrf.apply(Vec3(point_xz.x(), 0.0, point_xz.y()));
}

RobotModel load_robot_model(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("cannot open robot model file: " + path);
    }
    nlohmann::json j;
    in >> j;
    const auto& dh = j.at("dh");
    if (!dh.is_array() || dh.size() != 6) {
        throw std::runtime_error("robot model must contain a 6-row \"dh\" array");
    }
    std::array<DhRow, 6> rows{};
    for (std::size_t i = 0; i < 6; ++i) {
        const auto& r = dh[i];
        if (!r.is_array() || r.size() != 4) {
            throw std::runtime_error("each dh row must be [alpha_deg, a_mm, theta_offset_deg, d_mm]");
        }
        rows[i].alpha = r[0].get<double>() * kDegToRad;
        rows[i].a = r[1].get<double>() * 1e-3;
        rows[i].theta_offset = r[2].get<double>() * kDegToRad;
        rows[i].d = r[3].get<double>() * 1e-3;
    }
    return RobotModel(rows);
}

void save_robot_model(const RobotModel& model, const std::string& path) {
    nlohmann::json dh = nlohmann::json::array();
    for (const DhRow& row : model.rows()) {
        dh.push_back({row.alpha / kDegToRad, row.a * 1e3, row.theta_offset / kDegToRad, row.d * 1e3});
    }
    std::ofstream out(path);
    if (!out) {
        throw std::runtime_error("cannot write robot model file: " + path);
    }
    out << nlohmann::json{{"dh", dh}}.dump(2) << "\n";
}

} // namespace lrfcal

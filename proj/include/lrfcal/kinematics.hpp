#pragma once

#include <array>
#include <string>

#include "lrfcal/geometry.hpp"
#include "lrfcal/lrf.hpp"

namespace lrfcal {

/// One row of a modified-DH table: angles in radians, lengths in meters.
struct DhRow {
    double alpha{0.0};
    double a{0.0};
    double theta_offset{0.0};
    double d{0.0};
};

using JointVector = Eigen::Matrix<double, 6, 1>;

/// Symmetric joint limits in radians, per joint.
struct JointLimits {
    std::array<double, 6> max_abs;

    static JointLimits defaults();
    bool contains(const JointVector& q) const;
};

class RobotModel {
public:
    RobotModel() = default;
    explicit RobotModel(const std::array<DhRow, 6>& rows);

    const std::array<DhRow, 6>& rows() const { return rows_; }
    DhRow& row(int i) { return rows_.at(static_cast<std::size_t>(i)); }
    const DhRow& row(int i) const { return rows_.at(static_cast<std::size_t>(i)); }

    /// Table I of the Denso VS060, converted to radians/meters.
    static RobotModel denso_vs060();

private:
    std::array<DhRow, 6> rows_{};
};

/// Modified-DH link transform: RotX(alpha) * TransX(a) * RotZ(theta_offset + q) * TransZ(d).
Transform link_transform(const DhRow& row, double q);

/// Base-to-flange transform, the product of the six link transforms.
Transform forward_kinematics(const RobotModel& model, const JointVector& q);

/// Maps a 2D scan point (x, z) in the LRF plane through flange and extrinsic
/// frames into the robot base frame.
Vec3 lrf_point_in_base(const RobotModel& model, const JointVector& q, const ExtrinsicParams& ext,
                       const Vec2& point_xz);

RobotModel load_robot_model(const std::string& path);
void save_robot_model(const RobotModel& model, const std::string& path);

} // namespace lrfcal

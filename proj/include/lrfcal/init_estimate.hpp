#pragma once

#include <vector>

#include "lrfcal/kinematics.hpp"
#include "lrfcal/lrf.hpp"
#include "lrfcal/simulator.hpp"

namespace lrfcal {

/// Stacked linear system X phi = d over the 9 pose-entangled entries of the
/// flange-to-LRF transform.
struct DesignSystem {
    Eigen::MatrixXd x;
    Eigen::VectorXd d;
};

/// Plane row [n, -l] carried through a flange pose; the fourth entry absorbs
/// the pose translation term together with the plane offset.
Vec4 transformed_normal(const PlaneParams& plane, const Transform& flange_pose);

/// One least-squares row for a scan point. The right-hand side is the
/// negated fourth entry of the transformed plane row.
std::pair<Eigen::Matrix<double, 9, 1>, double> build_design_row(const Vec2& point_xz,
                                                                const Vec4& n_prime);

DesignSystem build_design_system(const std::vector<ScanRecord>& records, const RobotModel& robot,
                                 const PlaneParams& plane_guess);

/// Linear estimate of the LRF extrinsics from one plane's records: minimum-
/// norm least squares, column normalization, cross-product completion, and a
/// final nearest-rotation projection.
ExtrinsicParams solve_extrinsic_lsq(const std::vector<ScanRecord>& records, const RobotModel& robot,
                                    const PlaneParams& plane_guess);

} // namespace lrfcal

#include "lrfcal/init_estimate.hpp"

#include <stdexcept>

#include <Eigen/SVD>

namespace lrfcal {

Vec4 transformed_normal(const PlaneParams& plane, const Transform& flange_pose) {
    Vec4 row;
    row << plane.normal, -plane.offset;
    return flange_pose.matrix().transpose() * row;
}

std::pair<Eigen::Matrix<double, 9, 1>, double> build_design_row(const Vec2& point_xz,
                                                                const Vec4& n_prime) {
    Eigen::Matrix<double, 9, 1> row;
    const double x = point_xz.x();
    const double z = point_xz.y();
    row << x * n_prime(0), x * n_prime(1), x * n_prime(2),
           z * n_prime(0), z * n_prime(1), z * n_prime(2),
           n_prime(0), n_prime(1), n_prime(2);
    return {row, -n_prime(3)};
}

DesignSystem build_design_system(const std::vector<ScanRecord>& records, const RobotModel& robot,
                                 const PlaneParams& plane_guess) {
    std::size_t total = 0;
    for (const ScanRecord& record : records) {
        total += record.points.size();
    }
    if (total < 9) {
        throw std::invalid_argument("need at least 9 scan points for the linear estimate");
    }
    DesignSystem system;
    system.x.resize(static_cast<Eigen::Index>(total), 9);
    system.d.resize(static_cast<Eigen::Index>(total));
    Eigen::Index r = 0;
    for (const ScanRecord& record : records) {
        const Transform flange = forward_kinematics(robot, record.joints);
        const Vec4 n_prime = transformed_normal(plane_guess, flange);
        for (const Vec2& point : record.points) {
            const auto [row, rhs] = build_design_row(point, n_prime);
            system.x.row(r) = row.transpose();
            system.d(r) = rhs;
            ++r;
        }
    }
    return system;
}

ExtrinsicParams solve_extrinsic_lsq(const std::vector<ScanRecord>& records, const RobotModel& robot,
                                    const PlaneParams& plane_guess) {
    const DesignSystem system = build_design_system(records, robot, plane_guess);

    Eigen::BDCSVD<Eigen::MatrixXd> svd(system.x, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const auto& sigma = svd.singularValues();
    if (sigma(8) < 1e-8 * sigma(0)) {
        throw std::runtime_error(
            "degenerate scan data: the design matrix is rank-deficient (sigma9/sigma1 = " +
            std::to_string(sigma(8) / sigma(0)) + "); poses may be too few or too aligned");
    }
    const Eigen::VectorXd phi = svd.solve(system.d);

    // Reconstruction: normalize the two recovered rotation columns, read the
    // translation, complete by cross product, then project to the nearest
    // rotation since the recovered columns need not be mutually orthogonal
    // under noise.
    const Vec3 col1 = phi.segment<3>(0).normalized();
    const Vec3 col3 = phi.segment<3>(3).normalized();
    const Vec3 translation = phi.segment<3>(6);
    const Vec3 col2 = col3.cross(col1);

    Mat3 rotation;
    rotation.col(0) = col1;
    rotation.col(1) = col2;
    rotation.col(2) = col3;
    return transform_to_extrinsic(Transform(nearest_rotation(rotation), translation));
}

} // namespace lrfcal

#include "lrfcal/evaluation.hpp"

#include <algorithm>
#include <stdexcept>

#include "lrfcal/rng.hpp"

namespace lrfcal {

namespace {

// Kahan-compensated accumulator so the mean is independent of chunking.
struct CompensatedSum {
    double sum{0.0};
    double carry{0.0};

    void add(double value) {
        const double y = value - carry;
        const double t = sum + y;
        carry = (t - sum) - y;
        sum = t;
    }
};

} // namespace

std::pair<double, double> pose_error(const Transform& model_pose, const Transform& true_pose) {
    const Transform delta = invert(model_pose) * true_pose;
    const double position = delta.translation().norm();
    const double orientation = rotation_to_axis_angle(delta.rotation()).angle;
    return {position, orientation};
}

ErrorStats evaluate_model(const RobotModel& robot_model, const ExtrinsicParams& ext_model,
                          const RobotModel& robot_true, const ExtrinsicParams& ext_true,
                          const JointLimits& limits, int num_poses, std::uint64_t seed) {
    if (num_poses < 1) {
        throw std::invalid_argument("need at least one evaluation pose");
    }
    const Transform lrf_model = extrinsic_to_transform(ext_model);
    const Transform lrf_true = extrinsic_to_transform(ext_true);

    CompensatedSum position_sum;
    CompensatedSum orientation_sum;
    ErrorStats stats;
    stats.num_poses = num_poses;
    stats.seed = seed;

    for (int i = 0; i < num_poses; ++i) {
        auto rng = make_rng(seed, 0x6576616cULL, static_cast<std::uint64_t>(i));
        JointVector q;
        for (int j = 0; j < 6; ++j) {
            std::uniform_real_distribution<double> dist(-limits.max_abs[static_cast<std::size_t>(j)],
                                                        limits.max_abs[static_cast<std::size_t>(j)]);
            q(j) = dist(rng);
        }
        const Transform pose_model = forward_kinematics(robot_model, q) * lrf_model;
        const Transform pose_true = forward_kinematics(robot_true, q) * lrf_true;
        const auto [dp, dtheta] = pose_error(pose_model, pose_true);
        position_sum.add(dp);
        orientation_sum.add(dtheta);
        stats.max_position = std::max(stats.max_position, dp);
        stats.max_orientation = std::max(stats.max_orientation, dtheta);
    }
    stats.mean_position = position_sum.sum / num_poses;
    stats.mean_orientation = orientation_sum.sum / num_poses;
    return stats;
}

} // namespace lrfcal

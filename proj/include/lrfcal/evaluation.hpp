#pragma once

#include <cstdint>
#include <utility>

#include "lrfcal/kinematics.hpp"
#include "lrfcal/lrf.hpp"

namespace lrfcal {

struct ErrorStats {
    double mean_position{0.0};    // meters
    double max_position{0.0};
    double mean_orientation{0.0}; // radians
    double max_orientation{0.0};
    int num_poses{0};
    std::uint64_t seed{0};
};

/// Position norm and rotation angle of the discrepancy transform
/// inv(model_pose) * true_pose.
std::pair<double, double> pose_error(const Transform& model_pose, const Transform& true_pose);

/// Compares the base-to-LRF map of two (robot, extrinsic) models over
/// uniformly sampled random joint vectors.
ErrorStats evaluate_model(const RobotModel& robot_model, const ExtrinsicParams& ext_model,
                          const RobotModel& robot_true, const ExtrinsicParams& ext_true,
                          const JointLimits& limits, int num_poses, std::uint64_t seed);

} // namespace lrfcal

#include "lrfcal/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <stdexcept>

#include "lrfcal/params.hpp"
#include "lrfcal/rng.hpp"

namespace lrfcal {

namespace {

double truncated_normal(std::mt19937_64& rng, double range) {
    if (range <= 0.0) {
        return 0.0;
    }
    std::normal_distribution<double> dist(0.0, range / 2.0);
    for (int i = 0; i < 1000; ++i) {
        const double draw = dist(rng);
        if (std::abs(draw) <= range) {
            return draw;
        }
    }
    return 0.0; // unreachable in practice
}

Vec3 perpendicular_direction(const Vec3& d, double azimuth) {
    const Vec3 ref = std::abs(d.x()) < 0.9 ? Vec3(1, 0, 0) : Vec3(0, 1, 0);
    const Vec3 e1 = d.cross(ref).normalized();
    const Vec3 e2 = d.cross(e1);
    return std::cos(azimuth) * e1 + std::sin(azimuth) * e2;
}

// Pose error as a 6-vector: translation difference, then the rotation
// vector carrying current into target.
Eigen::Matrix<double, 6, 1> pose_error(const Transform& target, const Transform& current) {
    Eigen::Matrix<double, 6, 1> e;
    e.head<3>() = target.translation() - current.translation();
    const Mat3 r_err = target.rotation() * current.rotation().transpose();
    const AxisAngle aa = rotation_to_axis_angle(r_err);
    e.tail<3>() = aa.axis * aa.angle;
    return e;
}

// Damped least-squares IK on a numeric Jacobian of the pose error.
std::optional<JointVector> solve_ik(const RobotModel& model, const Transform& target,
                                    const JointVector& q0, const JointLimits& limits) {
    constexpr int kMaxIterations = 200;
    constexpr double kTolerance = 1e-8;
    constexpr double kFdStep = 1e-6;

    JointVector q = q0;
    double damping = 1e-2;
    Eigen::Matrix<double, 6, 1> err = pose_error(target, forward_kinematics(model, q));
    for (int iter = 0; iter < kMaxIterations; ++iter) {
        if (err.norm() < kTolerance) {
            break;
        }
        Eigen::Matrix<double, 6, 6> jac;
        for (int j = 0; j < 6; ++j) {
            JointVector qj = q;
            qj(j) += kFdStep;
            jac.col(j) = (pose_error(target, forward_kinematics(model, qj)) - err) / kFdStep;
        }
        const Eigen::Matrix<double, 6, 6> normal =
            jac.transpose() * jac + damping * damping * Eigen::Matrix<double, 6, 6>::Identity();
        Eigen::Matrix<double, 6, 1> step = normal.ldlt().solve(-jac.transpose() * err);
        const double step_norm = step.norm();
        if (step_norm > 0.5) {
            step *= 0.5 / step_norm;
        }
        const JointVector q_new = q + step;
        const auto err_new = pose_error(target, forward_kinematics(model, q_new));
        if (err_new.norm() < err.norm()) {
            q = q_new;
            err = err_new;
            damping = std::max(1e-8, damping * 0.5);
        } else {
            damping *= 4.0;
            if (damping > 1e6) {
                return std::nullopt;
            }
        }
    }
    if (err.norm() >= kTolerance) {
        return std::nullopt;
    }
    for (int j = 0; j < 6; ++j) {
        q(j) = std::remainder(q(j), 2.0 * M_PI);
    }
    if (!limits.contains(q)) {
        return std::nullopt;
    }
    return q;
}

struct RayHit {
    double range;
    double angle;
    Vec3 base_point;
};

// All fan rays that strike the plane patch, ordered by fan angle.
std::vector<RayHit> cast_fan(const Scene& scene, const Transform& base_to_lrf, int plane_index) {
    const PlaneParams& plane = scene.planes[static_cast<std::size_t>(plane_index - 1)];
    const PlaneExtent& extent = scene.extents[static_cast<std::size_t>(plane_index - 1)];
    const auto [axis_u, axis_v] = plane_axes(plane.normal);

    // Plane expressed in the LRF frame: m . p = c.
    const Vec3 m = base_to_lrf.rotation().transpose() * plane.normal;
    const double c = plane.offset - plane.normal.dot(base_to_lrf.translation());

    std::vector<RayHit> hits;
    hits.reserve(static_cast<std::size_t>(scene.rays_per_scan));
    for (int i = 0; i < scene.rays_per_scan; ++i) {
        const double angle = -scene.fan_half_angle +
                             2.0 * scene.fan_half_angle * static_cast<double>(i) /
                                 static_cast<double>(scene.rays_per_scan - 1);
        const Vec3 dir(std::sin(angle), 0.0, std::cos(angle));
        const double denom = m.dot(dir);
        if (std::abs(denom) < 1e-12) {
            continue;
        }
        const double range = c / denom;
        if (range <= 1e-6) {
            continue;
        }
        const Vec3 base_point = base_to_lrf.apply(range * dir);
        const Vec3 offset = base_point - extent.center;
        if (std::abs(offset.dot(axis_u)) > extent.half_u || std::abs(offset.dot(axis_v)) > extent.half_v) {
            continue;
        }
        hits.push_back({range, angle, base_point});
    }
    return hits;
}

const char* plane_name(int plane_index) {
    switch (plane_index) {
        case 1: return "plane 1 (bottom)";
        case 2: return "plane 2 (wall A)";
        case 3: return "plane 3 (wall B)";
        default: return "plane ?";
    }
}

} // namespace

std::pair<Vec3, Vec3> plane_axes(const Vec3& normal) {
    const Vec3 ref = std::abs(normal.x()) < 0.9 ? Vec3(1, 0, 0) : Vec3(0, 1, 0);
    const Vec3 u = normal.cross(ref).normalized();
    const Vec3 v = normal.cross(u);
    return {u, v};
}

Scene default_scene() {
    Scene scene;
    scene.robot = RobotModel::denso_vs060();
    scene.ext = ExtrinsicParams(AxisAngle(Vec3(0, 0, 1), M_PI), Vec3(-0.1275, -0.033, 0.1015));
    scene.planes = {PlaneParams(Vec3(0, 0, 1), 0.0), PlaneParams(Vec3(1, 0, 0), 0.8),
                    PlaneParams(Vec3(0, 1, 0), 0.8)};
    scene.extents = {PlaneExtent{Vec3(0.45, 0.0, 0.0), 0.5, 0.5},
                     PlaneExtent{Vec3(0.8, 0.0, 0.45), 0.5, 0.5},
                     PlaneExtent{Vec3(0.0, 0.8, 0.45), 0.5, 0.5}};
    return scene;
}

void validate_scene(const Scene& scene) {
    for (int a = 0; a < 3; ++a) {
        for (int b = a + 1; b < 3; ++b) {
            const double dot = std::abs(scene.planes[static_cast<std::size_t>(a)].normal.dot(
                scene.planes[static_cast<std::size_t>(b)].normal));
            if (dot >= 0.99) {
                throw std::invalid_argument("calibration planes must be mutually non-parallel");
            }
        }
    }
    for (const PlaneExtent& e : scene.extents) {
        if (e.half_u <= 0.0 || e.half_v <= 0.0) {
            throw std::invalid_argument("plane extents must be positive");
        }
    }
    if (!(scene.standoff_min > 0.0 && scene.standoff_max > scene.standoff_min)) {
        throw std::invalid_argument("invalid standoff range");
    }
    if (scene.rays_per_scan < 3 || !(scene.fan_half_angle > 0.0 && scene.fan_half_angle < M_PI / 2.0)) {
        throw std::invalid_argument("invalid scan fan configuration");
    }
}

std::pair<RobotModel, ExtrinsicParams> make_perturbed_model(const RobotModel& true_robot,
                                                            const ExtrinsicParams& true_ext,
                                                            const PerturbationConfig& cfg) {
    if (cfg.linear_range < 0.0 || cfg.angular_range < 0.0) {
        throw std::invalid_argument("perturbation ranges must be non-negative");
    }
    auto rng = make_rng(cfg.seed, 0x70657274ULL);
    const auto frozen = [&](const std::string& name) {
        return std::find(cfg.frozen.begin(), cfg.frozen.end(), name) != cfg.frozen.end();
    };

    RobotModel robot = true_robot;
    const auto& names = parameter_names();
    for (int i = 0; i < 6; ++i) {
        double* fields[4] = {&robot.row(i).alpha, &robot.row(i).a, &robot.row(i).theta_offset,
                             &robot.row(i).d};
        for (int f = 0; f < 4; ++f) {
            const int index = 4 * i + f;
            const double range = is_angular_parameter(index) ? cfg.angular_range : cfg.linear_range;
            const double draw = truncated_normal(rng, range);
            if (!frozen(names[static_cast<std::size_t>(index)])) {
                *fields[f] += draw;
            }
        }
    }

    ExtrinsicParams ext = true_ext;
    std::uniform_real_distribution<double> azimuth_dist(0.0, 2.0 * M_PI);

    // Rotation axis: tilt by an angular draw about a random perpendicular.
    const double tilt = truncated_normal(rng, cfg.angular_range);
    const double azimuth = azimuth_dist(rng);
    if (!frozen("raxis")) {
        const Vec3 tilt_axis = perpendicular_direction(ext.rotation.axis, azimuth);
        const Mat3 r = axis_angle_to_rotation(AxisAngle(tilt_axis, std::abs(tilt)));
        ext.rotation.axis = (r * ext.rotation.axis).normalized();
    }

    const double angle_draw = truncated_normal(rng, cfg.angular_range);
    if (!frozen("rtheta")) {
        double angle = ext.rotation.angle + angle_draw;
        if (angle > M_PI) {
            // Equivalent representation with the flipped axis.
            angle = 2.0 * M_PI - angle;
            ext.rotation.axis = -ext.rotation.axis;
        } else if (angle < 0.0) {
            angle = -angle;
            ext.rotation.axis = -ext.rotation.axis;
        }
        ext.rotation.angle = angle;
    }

    double* pos_fields[3] = {&ext.position.x(), &ext.position.y(), &ext.position.z()};
    const char* pos_names[3] = {"px", "py", "pz"};
    for (int f = 0; f < 3; ++f) {
        const double draw = truncated_normal(rng, cfg.linear_range);
        if (!frozen(pos_names[f])) {
            *pos_fields[f] += draw;
        }
    }
    return {robot, ext};
}

std::vector<JointVector> sample_calibration_poses(const Scene& scene, int plane_index, int n,
                                                  std::uint64_t seed) {
    validate_scene(scene);
    if (plane_index < 1 || plane_index > 3) {
        throw std::invalid_argument("plane index must be 1, 2 or 3");
    }
    if (n < 1) {
        throw std::invalid_argument("need at least one pose");
    }
    constexpr int kAttemptBudget = 10000;
    // Require a comfortable share of the fan to hit the patch so that scans
    // of up to ~1/4 of the fan resolution cannot fail downstream.
    const int min_fan_hits = std::max(8, scene.rays_per_scan / 4);

    const PlaneParams& plane = scene.planes[static_cast<std::size_t>(plane_index - 1)];
    const PlaneExtent& extent = scene.extents[static_cast<std::size_t>(plane_index - 1)];
    const auto [axis_u, axis_v] = plane_axes(plane.normal);
    const Transform ext_t = extrinsic_to_transform(scene.ext);
    const Transform ext_inv = invert(ext_t);

    // Side of the plane the robot works from, probed at the shoulder.
    const Vec3 shoulder(0.0, 0.0, scene.robot.row(0).d);
    double side = plane_residual(plane, shoulder) >= 0.0 ? 1.0 : -1.0;

    auto rng = make_rng(seed, 0x706f7365ULL, static_cast<std::uint64_t>(plane_index));
    std::uniform_real_distribution<double> u_dist(-extent.half_u, extent.half_u);
    std::uniform_real_distribution<double> v_dist(-extent.half_v, extent.half_v);
    std::uniform_real_distribution<double> incidence_dist(0.0, scene.max_incidence);
    std::uniform_real_distribution<double> azimuth_dist(0.0, 2.0 * M_PI);
    std::uniform_real_distribution<double> standoff_dist(scene.standoff_min, scene.standoff_max);
    std::uniform_real_distribution<double> joint_dist(-1.0, 1.0);

    std::vector<JointVector> poses;
    std::vector<Vec3> targets;
    poses.reserve(static_cast<std::size_t>(n));

    for (int attempt = 0; attempt < kAttemptBudget && static_cast<int>(poses.size()) < n; ++attempt) {
        const Vec3 target = extent.center + u_dist(rng) * axis_u + v_dist(rng) * axis_v;

        // Spread targets over the patch; give up on spacing late in the budget.
        const bool enforce_spacing = attempt < (kAttemptBudget * 3) / 5;
        if (enforce_spacing) {
            bool too_close = false;
            for (const Vec3& t : targets) {
                if ((t - target).norm() < scene.min_target_spacing) {
                    too_close = true;
                    break;
                }
            }
            if (too_close) {
                continue;
            }
        }

        const double incidence = incidence_dist(rng);
        const double azimuth = azimuth_dist(rng);
        const double standoff = standoff_dist(rng);
        const Vec3 ray = side * std::cos(incidence) * plane.normal +
                         std::sin(incidence) * (std::cos(azimuth) * axis_u + std::sin(azimuth) * axis_v);
        // Note: ray points from the sensor towards the plane, so the ray and
        // the robot-side direction oppose.
        const Vec3 ray_dir = -ray;
        const Vec3 sensor_pos = target - standoff * ray_dir;

        Mat3 r_lrf;
        const double roll = azimuth_dist(rng);
        const Vec3 x_axis = perpendicular_direction(ray_dir, roll);
        r_lrf.col(0) = x_axis;
        r_lrf.col(1) = ray_dir.cross(x_axis);
        r_lrf.col(2) = ray_dir;
        const Transform lrf_pose(r_lrf, sensor_pos);
        const Transform flange_target = lrf_pose * ext_inv;

        JointVector q0;
        for (int j = 0; j < 6; ++j) {
            q0(j) = joint_dist(rng) * 0.8 * scene.limits.max_abs[static_cast<std::size_t>(j)];
        }
        const auto solution = solve_ik(scene.robot, flange_target, q0, scene.limits);
        if (!solution) {
            continue;
        }

        // Re-check with the actual forward chain: the central ray must hit
        // the patch, and enough of the fan must land for later scans.
        const Transform base_to_lrf = forward_kinematics(scene.robot, *solution) * ext_t;
        const auto hits = cast_fan(scene, base_to_lrf, plane_index);
        if (static_cast<int>(hits.size()) < min_fan_hits) {
            continue;
        }
        const Vec3 central_dir = base_to_lrf.rotation().col(2);
        const double denom = plane.normal.dot(central_dir);
        if (std::abs(denom) < 1e-9) {
            continue;
        }
        const double range = (plane.offset - plane.normal.dot(base_to_lrf.translation())) / denom;
        if (range <= 0.0) {
            continue;
        }
        const Vec3 central_point = base_to_lrf.apply(range * Vec3(0, 0, 1));
        const Vec3 offset = central_point - extent.center;
        if (std::abs(offset.dot(axis_u)) > extent.half_u || std::abs(offset.dot(axis_v)) > extent.half_v) {
            continue;
        }

        poses.push_back(*solution);
        targets.push_back(central_point);
    }

    if (static_cast<int>(poses.size()) < n) {
        throw std::runtime_error(std::string("pose sampling failed for ") + plane_name(plane_index) +
                                 ": found " + std::to_string(poses.size()) + " of " + std::to_string(n) +
                                 " poses within the attempt budget");
    }
    return poses;
}

ScanRecord simulate_scan(const Scene& scene, const JointVector& q, int plane_index, int m,
                         double sigma_noise, std::uint64_t seed) {
    if (m < 1) {
        throw std::invalid_argument("need at least one scan point");
    }
    const Transform base_to_lrf = forward_kinematics(scene.robot, q) * extrinsic_to_transform(scene.ext);
    const auto hits = cast_fan(scene, base_to_lrf, plane_index);
    if (static_cast<int>(hits.size()) < m) {
        throw std::runtime_error(std::string("scan fan intersects ") + plane_name(plane_index) +
                                 " with only " + std::to_string(hits.size()) + " rays, need " +
                                 std::to_string(m));
    }

    auto rng = make_rng(seed, 0x7363616eULL);
    std::normal_distribution<double> noise(0.0, sigma_noise);

    ScanRecord record;
    record.plane_index = plane_index;
    record.joints = q;
    record.points.reserve(static_cast<std::size_t>(m));
    const std::size_t count = hits.size();
    for (int t = 0; t < m; ++t) {
        const std::size_t idx =
            static_cast<std::size_t>((static_cast<double>(t) + 0.5) * static_cast<double>(count) /
                                     static_cast<double>(m));
        const RayHit& hit = hits[std::min(idx, count - 1)];
        const double range = hit.range + (sigma_noise > 0.0 ? noise(rng) : 0.0);
        record.points.emplace_back(range * std::sin(hit.angle), range * std::cos(hit.angle));
    }
    return record;
}

ScanDataset generate_dataset(const Scene& scene, int poses_per_plane, int points_per_scan,
                             double sigma_noise, std::uint64_t seed) {
    validate_scene(scene);
    ScanDataset dataset;
    dataset.provenance = {seed, sigma_noise, poses_per_plane, points_per_scan};
    dataset.records.reserve(static_cast<std::size_t>(3 * poses_per_plane));
    for (int k = 1; k <= 3; ++k) {
        const auto poses =
            sample_calibration_poses(scene, k, poses_per_plane, mix_seed(seed, 0xa0 + static_cast<std::uint64_t>(k)));
        for (int j = 0; j < poses_per_plane; ++j) {
            ScanRecord record = simulate_scan(scene, poses[static_cast<std::size_t>(j)], k,
                                              points_per_scan, sigma_noise,
                                              mix_seed(seed, static_cast<std::uint64_t>(k),
                                                       static_cast<std::uint64_t>(j)));
            record.pose_index = j;
            dataset.records.push_back(std::move(record));
        }
    }
    return dataset;
}

} // namespace lrfcal

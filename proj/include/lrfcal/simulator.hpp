#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "lrfcal/kinematics.hpp"
#include "lrfcal/lrf.hpp"

namespace lrfcal {

/// Rectangular patch of a calibration plane: center plus half-widths along
/// two in-plane axes derived deterministically from the plane normal.
struct PlaneExtent {
    Vec3 center{Vec3::Zero()};
    double half_u{0.5};
    double half_v{0.5};
};

/// In-plane orthonormal axes (u, v) for a plane normal.
std::pair<Vec3, Vec3> plane_axes(const Vec3& normal);

struct Scene {
    RobotModel robot;
    ExtrinsicParams ext;
    std::array<PlaneParams, 3> planes;
    std::array<PlaneExtent, 3> extents;
    JointLimits limits{JointLimits::defaults()};

    // LRF scan geometry: rays in the sensor XZ plane, evenly spread around
    // the central +z ray.
    double fan_half_angle{20.0 * M_PI / 180.0};
    int rays_per_scan{721};

    // Pose synthesis.
    double max_incidence{45.0 * M_PI / 180.0};
    double standoff_min{0.15};
    double standoff_max{0.60};
    double min_target_spacing{0.05};
};

/// Paper-style setup: Denso VS060, reference extrinsic, bottom plane plus
/// two walls, roughly perpendicular around the robot.
Scene default_scene();

/// Enforces the non-parallel-planes condition and basic sanity.
void validate_scene(const Scene& scene);

struct PerturbationConfig {
    double linear_range{0.002};                 // meters
    double angular_range{1.0 * M_PI / 180.0};   // radians
    std::uint64_t seed{0};
    // Parameters left at their true values. Defaults to the gauge-fixing
    // set so that a perturbed model stays comparable to the truth it will
    // be evaluated against.
    std::vector<std::string> frozen{"d6", "theta6", "d2", "a1", "alpha1", "theta1", "d1"};
};

std::pair<RobotModel, ExtrinsicParams> make_perturbed_model(const RobotModel& true_robot,
                                                            const ExtrinsicParams& true_ext,
                                                            const PerturbationConfig& cfg);

struct ScanRecord {
    int plane_index{1}; // 1-based, k in {1,2,3}
    int pose_index{0};
    JointVector joints{JointVector::Zero()};
    std::vector<Vec2> points; // (x, z) in the LRF frame, meters
};

struct DatasetProvenance {
    std::uint64_t scene_seed{0};
    double sigma_noise{0.0};
    int poses_per_plane{0};
    int points_per_scan{0};
};

struct ScanDataset {
    std::vector<ScanRecord> records;
    DatasetProvenance provenance;
};

/// N joint vectors whose central LRF ray hits plane k within its extents,
/// targets spread at least min_target_spacing apart where feasible.
std::vector<JointVector> sample_calibration_poses(const Scene& scene, int plane_index, int n,
                                                  std::uint64_t seed);

/// Exact ray-plane ranges for M evenly spaced intersecting rays, plus
/// Gaussian range noise of the given sigma.
ScanRecord simulate_scan(const Scene& scene, const JointVector& q, int plane_index, int m,
                         double sigma_noise, std::uint64_t seed);

ScanDataset generate_dataset(const Scene& scene, int poses_per_plane, int points_per_scan,
                             double sigma_noise, std::uint64_t seed);

} // namespace lrfcal

#pragma once

#include <array>
#include <functional>
#include <string>
#include <vector>

#include "lrfcal/kinematics.hpp"
#include "lrfcal/lrf.hpp"
#include "lrfcal/params.hpp"
#include "lrfcal/simulator.hpp"

namespace lrfcal {

/// The packed 43-entry calibration state. One component of each unit vector
/// (the LRF rotation axis and the three plane normals) is eliminated and
/// reconstructed from the other two, leaving 39 free entries; a fixed mask
/// over the free entries marks parameters excluded from optimization.
class ParameterVector {
public:
    struct UnitGroup {
        int start;      // canonical index of the x component
        int eliminated; // 0, 1 or 2 within the group
        double sign;    // sign of the eliminated component at packing time
    };

    ParameterVector() = default;

    /// Packs model blocks. The eliminated component of each unit vector is
    /// the one of largest magnitude at packing time, which reduces to the
    /// usual z-elimination for an upward axis or bottom-plane normal.
    static ParameterVector pack(const RobotModel& robot, const ExtrinsicParams& ext,
                                const std::array<PlaneParams, 3>& planes,
                                const std::vector<std::string>& fixed_names = {});

    const Eigen::Matrix<double, kNumParams, 1>& values() const { return values_; }
    const std::array<UnitGroup, 4>& unit_groups() const { return groups_; }

    const std::vector<int>& free_indices() const { return free_indices_; }
    std::vector<std::string> free_names() const;
    Eigen::VectorXd free_values() const;
    /// Writes the 39 free entries and reconstructs the eliminated components;
    /// unit-vector free pairs whose squared sum exceeds 1 - 1e-12 are scaled
    /// back and flagged.
    void set_free_values(const Eigen::VectorXd& v);

    const std::vector<bool>& fixed_mask() const { return fixed_; }
    std::vector<std::string> fixed_names() const;
    int optimizable_count() const;
    Eigen::VectorXd optimizable_values() const;
    void set_optimizable_values(const Eigen::VectorXd& v);

    bool clamp_warning() const { return clamp_warning_; }

    RobotModel robot() const;
    ExtrinsicParams extrinsic() const;
    std::array<PlaneParams, 3> planes() const;

private:
    void reconstruct_eliminated();

    Eigen::Matrix<double, kNumParams, 1> values_ = Eigen::Matrix<double, kNumParams, 1>::Zero();
    std::array<UnitGroup, 4> groups_{};
    std::vector<int> free_indices_;
    std::vector<bool> fixed_;
    bool clamp_warning_{false};
};

/// Plane-constraint residuals n_k . p - l_k, one entry per scan point, in
/// dataset order.
Eigen::VectorXd residuals(const ParameterVector& pv, const ScanDataset& data);

struct LMOptions {
    int max_iterations{200};
    double initial_lambda{1e-3};
    double lambda_up{10.0};
    double lambda_down{10.0};
    double gradient_tolerance{1e-12};
    double step_tolerance{1e-12};
    double cost_tolerance{1e-14};
    double fd_step_rel{1e-7};
    double fd_step_floor{1e-9};
};

struct LMDiagnostics {
    int iterations{0};
    double initial_cost{0.0};
    double final_cost{0.0};
    double gradient_norm{0.0};
    std::string termination;
    std::vector<double> cost_trace;       // accepted costs, monotone non-increasing
    std::vector<double> column_norms;     // Jacobian column norms at the solution
};

struct LMResult {
    Eigen::VectorXd x;
    LMDiagnostics diagnostics;
};

using ResidualFn = std::function<Eigen::VectorXd(const Eigen::VectorXd&)>;

/// Damped normal-equations Levenberg-Marquardt with a forward-difference
/// Jacobian and a multiplicative damping schedule.
LMResult levenberg_marquardt(const ResidualFn& residual_fn, const Eigen::VectorXd& x0,
                             const LMOptions& opts = {});

struct CalibrationResult {
    RobotModel robot;
    ExtrinsicParams ext;
    std::array<PlaneParams, 3> planes;
    std::vector<std::string> fixed;
    double initial_cost{0.0};
    double final_cost{0.0};
    LMDiagnostics diagnostics;
    bool clamp_warning{false};
};

/// Joint refinement of DH, extrinsic and plane parameters on all three
/// planes' data, starting from the given initial blocks.
CalibrationResult calibrate(const ScanDataset& data, const RobotModel& robot0,
                            const ExtrinsicParams& ext0, const std::array<PlaneParams, 3>& planes0,
                            const std::vector<std::string>& fixed_names, const LMOptions& opts = {});

} // namespace lrfcal

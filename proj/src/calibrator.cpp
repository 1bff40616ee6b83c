#include "lrfcal/calibrator.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <Eigen/Cholesky>

namespace lrfcal {

namespace {

constexpr double kUnitDiskCap = 1.0 - 1e-12;

// Rodrigues without the canonical-range restriction of AxisAngle: during
// optimization the angle may step slightly outside [0, pi].
Mat3 rodrigues(const Vec3& unit_axis, double angle) {
    Mat3 k;
    k << 0.0, -unit_axis.z(), unit_axis.y(),
         unit_axis.z(), 0.0, -unit_axis.x(),
         -unit_axis.y(), unit_axis.x(), 0.0;
    return Mat3::Identity() + std::sin(angle) * k + (1.0 - std::cos(angle)) * (k * k);
}

// Closed-form modified-DH link matrix applied in place: (r, t) <- (r, t) * A_i.
void append_link(Mat3& r, Vec3& t, double alpha, double a, double theta, double d) {
    const double ct = std::cos(theta);
    const double st = std::sin(theta);
    const double ca = std::cos(alpha);
    const double sa = std::sin(alpha);
    Mat3 link;
    link << ct, -st, 0.0,
            st * ca, ct * ca, -sa,
            st * sa, ct * sa, ca;
    const Vec3 link_t(a, -sa * d, ca * d);
    t += r * link_t;
    r *= link;
}

} // namespace

ParameterVector ParameterVector::pack(const RobotModel& robot, const ExtrinsicParams& ext,
                                      const std::array<PlaneParams, 3>& planes,
                                      const std::vector<std::string>& fixed_names) {
    ParameterVector pv;
    for (int i = 0; i < 6; ++i) {
        pv.values_(4 * i + 0) = robot.row(i).alpha;
        pv.values_(4 * i + 1) = robot.row(i).a;
        pv.values_(4 * i + 2) = robot.row(i).theta_offset;
        pv.values_(4 * i + 3) = robot.row(i).d;
    }
    pv.values_.segment<3>(kExtrinsicOffset) = ext.rotation.axis;
    pv.values_(kExtrinsicOffset + 3) = ext.rotation.angle;
    pv.values_.segment<3>(kExtrinsicOffset + 4) = ext.position;
    for (int k = 0; k < 3; ++k) {
        pv.values_.segment<3>(kPlaneOffset + 4 * k) = planes[static_cast<std::size_t>(k)].normal;
        pv.values_(kPlaneOffset + 4 * k + 3) = planes[static_cast<std::size_t>(k)].offset;
    }

    const std::array<int, 4> group_starts = {kExtrinsicOffset, kPlaneOffset, kPlaneOffset + 4,
                                             kPlaneOffset + 8};
    for (std::size_t g = 0; g < 4; ++g) {
        const int start = group_starts[g];
        const Vec3 unit = pv.values_.segment<3>(start);
        int eliminated = 0;
        for (int c = 1; c < 3; ++c) {
            if (std::abs(unit(c)) > std::abs(unit(eliminated))) {
                eliminated = c;
            }
        }
        const double sign = unit(eliminated) < 0.0 ? -1.0 : 1.0;
        pv.groups_[g] = {start, eliminated, sign};
    }

    pv.free_indices_.reserve(kNumFreeParams);
    for (int i = 0; i < kNumParams; ++i) {
        bool is_eliminated = false;
        for (const UnitGroup& group : pv.groups_) {
            if (i == group.start + group.eliminated) {
                is_eliminated = true;
                break;
            }
        }
        if (!is_eliminated) {
            pv.free_indices_.push_back(i);
        }
    }

    pv.fixed_.assign(pv.free_indices_.size(), false);
    const auto& names = parameter_names();
    for (const std::string& name : fixed_names) {
        const int index = parameter_index(name);
        const auto it = std::find(pv.free_indices_.begin(), pv.free_indices_.end(), index);
        if (it == pv.free_indices_.end()) {
            throw std::invalid_argument("cannot fix eliminated parameter " + name);
        }
        pv.fixed_[static_cast<std::size_t>(it - pv.free_indices_.begin())] = true;
    }
    (void)names;

    pv.reconstruct_eliminated();
    return pv;
}

void ParameterVector::reconstruct_eliminated() {
    for (const UnitGroup& group : groups_) {
        double s = 0.0;
        std::array<int, 2> free_components{};
        int fc = 0;
        for (int c = 0; c < 3; ++c) {
            if (c != group.eliminated) {
                free_components[static_cast<std::size_t>(fc++)] = c;
                s += values_(group.start + c) * values_(group.start + c);
            }
        }
        if (s > kUnitDiskCap) {
            const double scale = std::sqrt(kUnitDiskCap / s);
            for (const int c : free_components) {
                values_(group.start + c) *= scale;
            }
            s = kUnitDiskCap;
            clamp_warning_ = true;
        }
        values_(group.start + group.eliminated) = group.sign * std::sqrt(1.0 - s);
    }
}

std::vector<std::string> ParameterVector::free_names() const {
    std::vector<std::string> out;
    out.reserve(free_indices_.size());
    const auto& names = parameter_names();
    for (const int i : free_indices_) {
        out.push_back(names[static_cast<std::size_t>(i)]);
    }
    return out;
}

Eigen::VectorXd ParameterVector::free_values() const {
    Eigen::VectorXd v(static_cast<Eigen::Index>(free_indices_.size()));
    for (std::size_t i = 0; i < free_indices_.size(); ++i) {
        v(static_cast<Eigen::Index>(i)) = values_(free_indices_[i]);
    }
    return v;
}

void ParameterVector::set_free_values(const Eigen::VectorXd& v) {
    if (v.size() != static_cast<Eigen::Index>(free_indices_.size())) {
        throw std::invalid_argument("free value vector has wrong size");
    }
    for (std::size_t i = 0; i < free_indices_.size(); ++i) {
        values_(free_indices_[i]) = v(static_cast<Eigen::Index>(i));
    }
    reconstruct_eliminated();
}

std::vector<std::string> ParameterVector::fixed_names() const {
    std::vector<std::string> out;
    const auto& names = parameter_names();
    for (std::size_t i = 0; i < fixed_.size(); ++i) {
        if (fixed_[i]) {
            out.push_back(names[static_cast<std::size_t>(free_indices_[i])]);
        }
    }
    return out;
}

int ParameterVector::optimizable_count() const {
    return static_cast<int>(std::count(fixed_.begin(), fixed_.end(), false));
}

Eigen::VectorXd ParameterVector::optimizable_values() const {
    Eigen::VectorXd v(optimizable_count());
    Eigen::Index out = 0;
    for (std::size_t i = 0; i < free_indices_.size(); ++i) {
        if (!fixed_[i]) {
            v(out++) = values_(free_indices_[i]);
        }
    }
    return v;
}

void ParameterVector::set_optimizable_values(const Eigen::VectorXd& v) {
    if (v.size() != optimizable_count()) {
        throw std::invalid_argument("optimizable value vector has wrong size");
    }
    Eigen::Index in = 0;
    for (std::size_t i = 0; i < free_indices_.size(); ++i) {
        if (!fixed_[i]) {
            values_(free_indices_[i]) = v(in++);
        }
    }
    reconstruct_eliminated();
}

RobotModel ParameterVector::robot() const {
    std::array<DhRow, 6> rows{};
    for (int i = 0; i < 6; ++i) {
        rows[static_cast<std::size_t>(i)] = {values_(4 * i + 0), values_(4 * i + 1),
                                             values_(4 * i + 2), values_(4 * i + 3)};
    }
    return RobotModel(rows);
}

ExtrinsicParams ParameterVector::extrinsic() const {
    Vec3 axis = values_.segment<3>(kExtrinsicOffset);
    double angle = values_(kExtrinsicOffset + 3);
    // Fold into the canonical axis-angle range.
    angle = std::remainder(angle, 2.0 * M_PI);
    if (angle < 0.0) {
        angle = -angle;
        axis = -axis;
    }
    if (angle > M_PI) {
        angle = 2.0 * M_PI - angle;
        axis = -axis;
    }
    return ExtrinsicParams(AxisAngle(axis.normalized(), angle),
                           values_.segment<3>(kExtrinsicOffset + 4));
}

std::array<PlaneParams, 3> ParameterVector::planes() const {
    std::array<PlaneParams, 3> out;
    for (int k = 0; k < 3; ++k) {
        out[static_cast<std::size_t>(k)] =
            PlaneParams(values_.segment<3>(kPlaneOffset + 4 * k).normalized(),
                        values_(kPlaneOffset + 4 * k + 3));
    }
    return out;
}

Eigen::VectorXd residuals(const ParameterVector& pv, const ScanDataset& data) {
    const auto& v = pv.values();
    const Vec3 axis = v.segment<3>(kExtrinsicOffset).normalized();
    const Mat3 lrf_rot = rodrigues(axis, v(kExtrinsicOffset + 3));
    const Vec3 lrf_pos = v.segment<3>(kExtrinsicOffset + 4);

    std::size_t total = 0;
    for (const ScanRecord& record : data.records) {
        total += record.points.size();
    }
    Eigen::VectorXd out(static_cast<Eigen::Index>(total));
    Eigen::Index r = 0;
    for (const ScanRecord& record : data.records) {
        if (record.plane_index < 1 || record.plane_index > 3) {
            throw std::invalid_argument("scan record has invalid plane index");
        }
        Mat3 rot = Mat3::Identity();
        Vec3 t = Vec3::Zero();
        for (int i = 0; i < 6; ++i) {
            append_link(rot, t, v(4 * i + 0), v(4 * i + 1), v(4 * i + 2) + record.joints(i),
                        v(4 * i + 3));
        }
        // Base-to-LRF chain.
        const Vec3 base_lrf_pos = t + rot * lrf_pos;
        const Mat3 base_lrf_rot = rot * lrf_rot;

        const int plane_base = kPlaneOffset + 4 * (record.plane_index - 1);
        const Vec3 normal = v.segment<3>(plane_base);
        const double offset = v(plane_base + 3);
        // Plane pulled into the LRF frame once per record.
        const Vec3 normal_lrf = base_lrf_rot.transpose() * normal;
        const double offset_lrf = offset - normal.dot(base_lrf_pos);
        for (const Vec2& point : record.points) {
            out(r++) = normal_lrf.x() * point.x() + normal_lrf.z() * point.y() - offset_lrf;
        }
    }
    return out;
}

LMResult levenberg_marquardt(const ResidualFn& residual_fn, const Eigen::VectorXd& x0,
                             const LMOptions& opts) {
    constexpr double kLambdaFloor = 1e-12;
    constexpr double kLambdaCeiling = 1e12;

    LMResult result;
    Eigen::VectorXd x = x0;
    Eigen::VectorXd r = residual_fn(x);
    if (!r.allFinite()) {
        throw std::invalid_argument("residuals are not finite at the initial point");
    }
    double cost = r.squaredNorm();
    LMDiagnostics& diag = result.diagnostics;
    diag.initial_cost = cost;
    diag.cost_trace.push_back(cost);

    const Eigen::Index n = x.size();
    const Eigen::Index m = r.size();
    Eigen::MatrixXd jac(m, n);
    double lambda = opts.initial_lambda;
    diag.termination = "max_iterations";

    for (int iter = 0; iter < opts.max_iterations; ++iter) {
        for (Eigen::Index j = 0; j < n; ++j) {
            const double h = std::max(opts.fd_step_rel * std::abs(x(j)), opts.fd_step_floor);
            Eigen::VectorXd xj = x;
            xj(j) += h;
            jac.col(j) = (residual_fn(xj) - r) / h;
        }
        const Eigen::VectorXd gradient = jac.transpose() * r;
        diag.gradient_norm = gradient.lpNorm<Eigen::Infinity>();
        if (diag.gradient_norm <= opts.gradient_tolerance) {
            diag.termination = "gradient_tolerance";
            break;
        }
        const Eigen::MatrixXd normal = jac.transpose() * jac;

        bool accepted = false;
        while (!accepted) {
            Eigen::MatrixXd damped = normal;
            damped.diagonal().array() += lambda;
            const Eigen::LDLT<Eigen::MatrixXd> ldlt(damped);
            Eigen::VectorXd step;
            bool solvable = ldlt.info() == Eigen::Success;
            if (solvable) {
                step = ldlt.solve(-gradient);
                solvable = step.allFinite();
            }
            if (solvable) {
                const Eigen::VectorXd x_try = x + step;
                const Eigen::VectorXd r_try = residual_fn(x_try);
                const double cost_try = r_try.allFinite() ? r_try.squaredNorm() : std::nan("");
                if (cost_try <= cost) {
                    const double decrease = cost - cost_try;
                    x = x_try;
                    r = r_try;
                    cost = cost_try;
                    diag.cost_trace.push_back(cost);
                    diag.iterations = iter + 1;
                    lambda = std::max(lambda / opts.lambda_down, kLambdaFloor);
                    accepted = true;
                    if (step.norm() <= opts.step_tolerance * (x.norm() + opts.step_tolerance)) {
                        diag.termination = "step_tolerance";
                    } else if (decrease <= opts.cost_tolerance * std::max(cost, 1e-300)) {
                        diag.termination = "cost_tolerance";
                    }
                    break;
                }
            }
            lambda *= opts.lambda_up;
            if (lambda > kLambdaCeiling) {
                if (!solvable) {
                    throw std::runtime_error(
                        "singular normal equations: no solvable damping found (iteration " +
                        std::to_string(iter) + ", cost " + std::to_string(cost) + ")");
                }
                diag.termination = "no_further_decrease";
                break;
            }
        }
        if (!accepted) {
            break; // damping ceiling reached without a downhill step
        }
        if (diag.termination != "max_iterations") {
            break; // a tolerance fired on the accepted step
        }
    }

    diag.final_cost = cost;
    diag.column_norms.resize(static_cast<std::size_t>(n));
    for (Eigen::Index j = 0; j < n; ++j) {
        diag.column_norms[static_cast<std::size_t>(j)] = jac.col(j).norm();
    }
    result.x = std::move(x);
    return result;
}

CalibrationResult calibrate(const ScanDataset& data, const RobotModel& robot0,
                            const ExtrinsicParams& ext0, const std::array<PlaneParams, 3>& planes0,
                            const std::vector<std::string>& fixed_names, const LMOptions& opts) {
    ParameterVector pv = ParameterVector::pack(robot0, ext0, planes0, fixed_names);

    std::size_t total_points = 0;
    for (const ScanRecord& record : data.records) {
        total_points += record.points.size();
    }
    if (static_cast<int>(total_points) < pv.optimizable_count()) {
        throw std::invalid_argument("number of scan points must exceed the number of parameters");
    }

    const ResidualFn fn = [&pv, &data](const Eigen::VectorXd& x) {
        ParameterVector candidate = pv;
        candidate.set_optimizable_values(x);
        return residuals(candidate, data);
    };

    const LMResult lm = levenberg_marquardt(fn, pv.optimizable_values(), opts);
    pv.set_optimizable_values(lm.x);

    CalibrationResult result;
    result.robot = pv.robot();
    result.ext = pv.extrinsic();
    result.planes = pv.planes();
    result.fixed = pv.fixed_names();
    result.initial_cost = lm.diagnostics.initial_cost;
    result.final_cost = lm.diagnostics.final_cost;
    result.diagnostics = lm.diagnostics;
    result.clamp_warning = pv.clamp_warning();
    return result;
}

} // namespace lrfcal

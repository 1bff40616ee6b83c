#include "lrfcal/geometry.hpp"

#include <cmath>
#include <stdexcept>

namespace lrfcal {

namespace {

void check_rotation(const Mat3& r) {
    const double ortho = (r.transpose() * r - Mat3::Identity()).cwiseAbs().maxCoeff();
    if (ortho > kOrthonormalTol) {
        throw std::invalid_argument("rotation matrix is not orthonormal");
    }
    if (std::abs(r.determinant() - 1.0) > kOrthonormalTol) {
        throw std::invalid_argument("rotation matrix must have determinant +1");
    }
}

Mat3 skew(const Vec3& v) {
    Mat3 k;
    k << 0.0, -v.z(), v.y(),
         v.z(), 0.0, -v.x(),
         -v.y(), v.x(), 0.0;
    return k;
}

// Shepperd-style quaternion extraction, (w, x, y, z), unit norm.
Vec4 rotation_to_quaternion(const Mat3& r) {
    Vec4 q;
    const double tr = r.trace();
    if (tr > r(0, 0) && tr > r(1, 1) && tr > r(2, 2)) {
        const double s = std::sqrt(tr + 1.0) * 2.0;
        q << 0.25 * s,
             (r(2, 1) - r(1, 2)) / s,
             (r(0, 2) - r(2, 0)) / s,
             (r(1, 0) - r(0, 1)) / s;
    } else if (r(0, 0) > r(1, 1) && r(0, 0) > r(2, 2)) {
        const double s = std::sqrt(1.0 + r(0, 0) - r(1, 1) - r(2, 2)) * 2.0;
        q << (r(2, 1) - r(1, 2)) / s,
             0.25 * s,
             (r(0, 1) + r(1, 0)) / s,
             (r(0, 2) + r(2, 0)) / s;
    } else if (r(1, 1) > r(2, 2)) {
        const double s = std::sqrt(1.0 + r(1, 1) - r(0, 0) - r(2, 2)) * 2.0;
        q << (r(0, 2) - r(2, 0)) / s,
             (r(0, 1) + r(1, 0)) / s,
             0.25 * s,
             (r(1, 2) + r(2, 1)) / s;
    } else {
        const double s = std::sqrt(1.0 + r(2, 2) - r(0, 0) - r(1, 1)) * 2.0;
        q << (r(1, 0) - r(0, 1)) / s,
             (r(0, 2) + r(2, 0)) / s,
             (r(1, 2) + r(2, 1)) / s,
             0.25 * s;
    }
    return q.normalized();
}

} // namespace

AxisAngle::AxisAngle(const Vec3& axis_in, double angle_in) : axis(axis_in), angle(angle_in) {
    if (std::abs(axis.norm() - 1.0) > kUnitNormTol) {
        throw std::invalid_argument("axis-angle axis must be a unit vector");
    }
    if (!(angle >= 0.0 && angle <= M_PI)) {
        throw std::invalid_argument("axis-angle angle must lie in [0, pi]");
    }
}

PlaneParams::PlaneParams(const Vec3& normal_in, double offset_in)
    : normal(normal_in), offset(offset_in) {
    if (std::abs(normal.norm() - 1.0) > kUnitNormTol) {
        throw std::invalid_argument("plane normal must be a unit vector");
    }
}

Transform::Transform(const Mat3& rotation, const Vec3& translation)
    : rotation_(rotation), translation_(translation) {
    check_rotation(rotation_);
}

Mat4 Transform::matrix() const {
    Mat4 m = Mat4::Identity();
    m.topLeftCorner<3, 3>() = rotation_;
    m.topRightCorner<3, 1>() = translation_;
    return m;
}

Mat3 axis_angle_to_rotation(const AxisAngle& aa) {
    const Mat3 k = skew(aa.axis);
    return Mat3::Identity() + std::sin(aa.angle) * k + (1.0 - std::cos(aa.angle)) * (k * k);
}

AxisAngle rotation_to_axis_angle(const Mat3& rotation) {
    check_rotation(rotation);
    Vec4 q = rotation_to_quaternion(rotation);
    if (q(0) < 0.0) {
        q = -q;
    }
    const Vec3 v = q.tail<3>();
    const double vnorm = v.norm();
    const double angle = 2.0 * std::atan2(vnorm, q(0));
    if (angle < 1e-12) {
        return AxisAngle(Vec3(0.0, 0.0, 1.0), 0.0);
    }
    Vec3 axis = v / vnorm;
    if (angle > M_PI - 1e-9) {
        // Axis sign is ambiguous at a half turn: make the first component
        // of non-negligible magnitude positive.
        for (int i = 0; i < 3; ++i) {
            if (std::abs(axis(i)) > 1e-9) {
                if (axis(i) < 0.0) {
                    axis = -axis;
                }
                break;
            }
        }
    }
    return AxisAngle(axis, std::min(angle, M_PI));
}

Transform compose(const Transform& a, const Transform& b) {
    return Transform(a.rotation() * b.rotation(), a.rotation() * b.translation() + a.translation());
}

Transform invert(const Transform& t) {
    const Mat3 rt = t.rotation().transpose();
    return Transform(rt, -(rt * t.translation()));
}

Mat3 nearest_rotation(const Mat3& m) {
    Eigen::JacobiSVD<Mat3> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
    Mat3 u = svd.matrixU();
    const Mat3 v = svd.matrixV();
    if ((u * v.transpose()).determinant() < 0.0) {
        u.col(2) *= -1.0;
    }
    return u * v.transpose();
}

} // namespace lrfcal

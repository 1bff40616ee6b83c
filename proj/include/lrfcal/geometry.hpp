#pragma once

#include <Eigen/Dense>

namespace lrfcal {

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;
using Vec4 = Eigen::Vector4d;
using Mat3 = Eigen::Matrix3d;
using Mat4 = Eigen::Matrix4d;

constexpr double kOrthonormalTol = 1e-10;
constexpr double kUnitNormTol = 1e-10;

/// Rotation by a unit axis and an angle in [0, pi].
struct AxisAngle {
    Vec3 axis{0.0, 0.0, 1.0};
    double angle{0.0};

    AxisAngle() = default;
    AxisAngle(const Vec3& axis_in, double angle_in);
};

/// Plane n.p = l with unit normal n and offset l in meters.
struct PlaneParams {
    Vec3 normal{0.0, 0.0, 1.0};
    double offset{0.0};

    PlaneParams() = default;
    PlaneParams(const Vec3& normal_in, double offset_in);
};

/// Rigid transform; rotation is kept orthonormal with det +1.
class Transform {
public:
    Transform() : rotation_(Mat3::Identity()), translation_(Vec3::Zero()) {}
    Transform(const Mat3& rotation, const Vec3& translation);

    static Transform identity() { return Transform(); }

    const Mat3& rotation() const { return rotation_; }
    const Vec3& translation() const { return translation_; }

    Vec3 apply(const Vec3& point) const { return rotation_ * point + translation_; }
    Mat4 matrix() const;

private:
    Mat3 rotation_;
    Vec3 translation_;
};

Mat3 axis_angle_to_rotation(const AxisAngle& aa);

// Inverse conversion. Near-identity rotations map to (axis [0,0,1], angle 0);
// at angle pi the axis sign is fixed so its first nonzero component is positive.
AxisAngle rotation_to_axis_angle(const Mat3& rotation);

Transform compose(const Transform& a, const Transform& b);
Transform invert(const Transform& t);

inline Transform operator*(const Transform& a, const Transform& b) { return compose(a, b); }

/// Signed distance from point to plane, n.p - l, in meters.
inline double plane_residual(const PlaneParams& plane, const Vec3& point) {
    return plane.normal.dot(point) - plane.offset;
}

/// Orthonormal matrix closest to m in the Frobenius sense, det +1.
Mat3 nearest_rotation(const Mat3& m);

} // namespace lrfcal

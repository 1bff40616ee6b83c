#pragma once

#include "lrfcal/geometry.hpp"

namespace lrfcal {

/// LRF pose in the robot flange frame: axis-angle rotation plus position.
struct ExtrinsicParams {
    AxisAngle rotation;
    Vec3 position{Vec3::Zero()};

    ExtrinsicParams() = default;
    ExtrinsicParams(const AxisAngle& rotation_in, const Vec3& position_in)
        : rotation(rotation_in), position(position_in) {}
};

Transform extrinsic_to_transform(const ExtrinsicParams& ext);
ExtrinsicParams transform_to_extrinsic(const Transform& t);

} // namespace lrfcal

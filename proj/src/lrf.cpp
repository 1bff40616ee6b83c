#include "lrfcal/lrf.hpp"

namespace lrfcal {

Transform extrinsic_to_transform(const ExtrinsicParams& ext) {
    return Transform(axis_angle_to_rotation(ext.rotation), ext.position);
}

ExtrinsicParams transform_to_extrinsic(const Transform& t) {
    return ExtrinsicParams(rotation_to_axis_angle(t.rotation()), t.translation());
}

} // namespace lrfcal

#pragma once

#include <string>
#include <vector>

namespace lrfcal {

// Canonical ordering of the 43 calibration parameters:
//   link i = 1..6:  alpha_i, a_i, theta_i, d_i          (24)
//   extrinsic:      rx, ry, rz, rtheta, px, py, pz       (7)
//   plane k = 1..3: nk_x, nk_y, nk_z, l_k               (12)
constexpr int kNumParams = 43;
constexpr int kNumFreeParams = 39;

constexpr int kExtrinsicOffset = 24;
constexpr int kPlaneOffset = 31;

const std::vector<std::string>& parameter_names();

/// Index of a canonical parameter name; throws on unknown names.
int parameter_index(const std::string& name);

/// True for alpha_i, theta_i, rtheta and the unit-vector components.
bool is_angular_parameter(int index);

} // namespace lrfcal

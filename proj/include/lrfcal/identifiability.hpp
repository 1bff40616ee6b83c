#pragma once

#include <string>
#include <utility>
#include <vector>

#include "lrfcal/calibrator.hpp"

namespace lrfcal {

/// A direction in parameter space along which the residuals do not change:
/// the parameters listed in members cannot be identified independently.
struct NullCombo {
    Eigen::VectorXd coefficients; // over the free parameters, unit norm
    std::vector<std::pair<std::string, double>> members; // |coefficient| > cutoff
};

struct WeakCombo {
    double sigma_ratio{0.0};
    std::vector<std::pair<std::string, double>> members;
};

struct IdentifiabilityReport {
    std::vector<std::string> free_names;
    Eigen::VectorXd singular_values; // descending
    double threshold{0.0};           // tau * sigma_1
    std::vector<NullCombo> null_combos;
    std::vector<WeakCombo> weak_combos; // sigma in [tau, 1e-4) * sigma_1
    std::vector<std::string> suggested_fixed;
};

/// Central-difference rows of the constraint residuals over all 39 free
/// parameters; any fixed mask on pv is ignored, the analysis itself decides
/// what to fix.
Eigen::MatrixXd identification_jacobian(const ParameterVector& pv, const ScanDataset& data);

IdentifiabilityReport singular_value_analysis(const Eigen::MatrixXd& jacobian,
                                              const std::vector<std::string>& free_names,
                                              double tau = 1e-8, double member_cutoff = 0.05);

/// Default policy: the reference seven-parameter mask when the expected
/// dependency structure is detected, otherwise one greedy pick per combo.
std::vector<std::string> select_fixed_parameters(const IdentifiabilityReport& report);

/// Drops the named columns; used for rank-restoration checks after masking.
Eigen::MatrixXd restrict_columns(const Eigen::MatrixXd& jacobian,
                                 const std::vector<std::string>& free_names,
                                 const std::vector<std::string>& excluded);

} // namespace lrfcal

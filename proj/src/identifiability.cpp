#include "lrfcal/identifiability.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <set>
#include <stdexcept>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

namespace lrfcal {

namespace {

constexpr double kCentralStep = 1e-6;
constexpr double kSupportTol = 1e-4;   // sigma_min of the projected support columns
constexpr double kWeakBand = 1e-4;     // upper edge of the weakly identifiable band

std::vector<std::pair<std::string, double>> combo_members(const Eigen::VectorXd& v,
                                                          const std::vector<std::string>& names,
                                                          double cutoff) {
    std::vector<std::pair<std::string, double>> members;
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        if (std::abs(v(i)) > cutoff) {
            members.emplace_back(names[static_cast<std::size_t>(i)], v(i));
        }
    }
    std::sort(members.begin(), members.end(), [](const auto& a, const auto& b) {
        return std::abs(a.second) > std::abs(b.second);
    });
    return members;
}

void normalize_sign(Eigen::VectorXd& v) {
    Eigen::Index top = 0;
    v.cwiseAbs().maxCoeff(&top);
    if (v(top) < 0.0) {
        v = -v;
    }
}

// Enumerates small parameter supports and extracts, greedily, the null-space
// directions confined to them. The raw right-singular vectors of a
// multiplicity-7 numerical null space are an arbitrary orthonormal basis;
// this recovers the readable pairs/triples behind them.
std::vector<Eigen::VectorXd> sparsify_null_basis(const Eigen::MatrixXd& null_basis) {
    const Eigen::Index n = null_basis.rows();
    const Eigen::Index dim = null_basis.cols();
    Eigen::MatrixXd complement =
        Eigen::MatrixXd::Identity(n, n) - null_basis * null_basis.transpose();

    std::vector<Eigen::VectorXd> found;
    std::vector<int> support;
    const int max_support = 4;

    auto test_support = [&](const std::vector<int>& s) -> bool {
        const int k = static_cast<int>(s.size());
        Eigen::MatrixXd gram(k, k);
        for (int a = 0; a < k; ++a) {
            for (int b = a; b < k; ++b) {
                gram(a, b) = complement.col(s[static_cast<std::size_t>(a)])
                                 .dot(complement.col(s[static_cast<std::size_t>(b)]));
                gram(b, a) = gram(a, b);
            }
        }
        const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(gram);
        if (eig.eigenvalues()(0) > kSupportTol * kSupportTol) {
            return false;
        }
        Eigen::VectorXd direction = Eigen::VectorXd::Zero(n);
        for (int a = 0; a < k; ++a) {
            direction(s[static_cast<std::size_t>(a)]) = eig.eigenvectors()(a, 0);
        }
        direction.normalize();
        // Deflate the complement projector by the in-space part of the
        // direction so later supports cannot rediscover it.
        Eigen::VectorXd in_space = direction - complement * direction;
        const double in_norm = in_space.norm();
        if (in_norm < 0.5) {
            return false;
        }
        in_space /= in_norm;
        complement += in_space * in_space.transpose();
        found.push_back(std::move(direction));
        return true;
    };

    std::function<void(int, int)> enumerate = [&](int next, int remaining) {
        if (static_cast<Eigen::Index>(found.size()) >= dim) {
            return;
        }
        if (remaining == 0) {
            test_support(support);
            return;
        }
        for (int i = next; i <= static_cast<int>(n) - remaining; ++i) {
            support.push_back(i);
            enumerate(i + 1, remaining - 1);
            support.pop_back();
            if (static_cast<Eigen::Index>(found.size()) >= dim) {
                return;
            }
        }
    };
    for (int size = 1; size <= max_support; ++size) {
        enumerate(0, size);
    }

    // Whatever is left of the null space has no small support; report an
    // orthonormal basis of the remainder.
    if (static_cast<Eigen::Index>(found.size()) < dim) {
        const Eigen::MatrixXd residual_projector =
            Eigen::MatrixXd::Identity(n, n) - complement;
        const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(residual_projector);
        for (Eigen::Index i = 0; i < n && static_cast<Eigen::Index>(found.size()) < dim; ++i) {
            // Eigenvalues ascend; take the trailing ~1 eigenvalues.
            const Eigen::Index idx = n - 1 - i;
            if (eig.eigenvalues()(idx) > 0.5) {
                found.push_back(eig.eigenvectors().col(idx));
            }
        }
    }
    for (auto& v : found) {
        normalize_sign(v);
    }
    return found;
}

} // namespace

Eigen::MatrixXd identification_jacobian(const ParameterVector& pv, const ScanDataset& data) {
    ParameterVector work = pv;
    const Eigen::VectorXd base = work.free_values();
    const Eigen::Index n = base.size();

    std::size_t total = 0;
    for (const ScanRecord& record : data.records) {
        total += record.points.size();
    }
    Eigen::MatrixXd jac(static_cast<Eigen::Index>(total), n);
    for (Eigen::Index j = 0; j < n; ++j) {
        Eigen::VectorXd x = base;
        x(j) += kCentralStep;
        work.set_free_values(x);
        const Eigen::VectorXd plus = residuals(work, data);
        x(j) = base(j) - kCentralStep;
        work.set_free_values(x);
        const Eigen::VectorXd minus = residuals(work, data);
        jac.col(j) = (plus - minus) / (2.0 * kCentralStep);
    }
    return jac;
}

IdentifiabilityReport singular_value_analysis(const Eigen::MatrixXd& jacobian,
                                              const std::vector<std::string>& free_names,
                                              double tau, double member_cutoff) {
    if (!jacobian.allFinite()) {
        throw std::invalid_argument("identification Jacobian contains non-finite entries");
    }
    if (jacobian.cols() != static_cast<Eigen::Index>(free_names.size())) {
        throw std::invalid_argument("jacobian/name size mismatch");
    }

    Eigen::BDCSVD<Eigen::MatrixXd> svd(jacobian, Eigen::ComputeThinV);
    IdentifiabilityReport report;
    report.free_names = free_names;
    report.singular_values = svd.singularValues();
    const double sigma1 = report.singular_values(0);
    report.threshold = tau * sigma1;

    Eigen::Index null_count = 0;
    for (Eigen::Index i = 0; i < report.singular_values.size(); ++i) {
        if (report.singular_values(i) < report.threshold) {
            ++null_count;
        }
        else if (report.singular_values(i) < kWeakBand * sigma1) {
            WeakCombo weak;
            weak.sigma_ratio = report.singular_values(i) / sigma1;
            weak.members = combo_members(svd.matrixV().col(i), free_names, member_cutoff);
            report.weak_combos.push_back(std::move(weak));
        }
    }

    if (null_count > 0) {
        const Eigen::MatrixXd null_basis = svd.matrixV().rightCols(null_count);
        for (Eigen::VectorXd& v : sparsify_null_basis(null_basis)) {
            NullCombo combo;
            combo.members = combo_members(v, free_names, member_cutoff);
            combo.coefficients = std::move(v);
            report.null_combos.push_back(std::move(combo));
        }
    }

    report.suggested_fixed = select_fixed_parameters(report);
    return report;
}

std::vector<std::string> select_fixed_parameters(const IdentifiabilityReport& report) {
    if (report.null_combos.empty()) {
        return {};
    }

    auto member_names = [](const NullCombo& combo) {
        std::set<std::string> names;
        for (const auto& [name, coeff] : combo.members) {
            names.insert(name);
        }
        return names;
    };
    auto subset_of = [](const std::set<std::string>& a, const std::set<std::string>& b) {
        return std::includes(b.begin(), b.end(), a.begin(), a.end());
    };

    // Reference structure: a d6/pz pair, a theta6/rtheta coupling (possibly
    // leaking into px/py through the lever arm), a d2/d3 pair, and four
    // combos mixing the first link with the plane parameters.
    if (report.null_combos.size() == 7) {
        const std::set<std::string> first_link = {"a1", "alpha1", "theta1", "d1"};
        std::set<std::string> plane_names;
        for (const std::string& n : report.free_names) {
            if (n.front() == 'n' || n.front() == 'l') {
                plane_names.insert(n);
            }
        }
        bool has_d6_pz = false;
        bool has_theta6_rtheta = false;
        bool has_d2_d3 = false;
        std::set<std::string> base_union;
        int base_combos = 0;
        for (const NullCombo& combo : report.null_combos) {
            const auto names = member_names(combo);
            if (names == std::set<std::string>{"d6", "pz"}) {
                has_d6_pz = true;
            } else if (names.count("theta6") && names.count("rtheta") &&
                       subset_of(names, {"theta6", "rtheta", "px", "py"})) {
                has_theta6_rtheta = true;
            } else if (names == std::set<std::string>{"d2", "d3"}) {
                has_d2_d3 = true;
            } else {
                std::set<std::string> allowed = plane_names;
                allowed.insert(first_link.begin(), first_link.end());
                if (subset_of(names, allowed)) {
                    ++base_combos;
                    for (const std::string& n : names) {
                        if (first_link.count(n)) {
                            base_union.insert(n);
                        }
                    }
                }
            }
        }
        if (has_d6_pz && has_theta6_rtheta && has_d2_d3 && base_combos == 4 &&
            base_union == first_link) {
            return {"d6", "theta6", "d2", "a1", "alpha1", "theta1", "d1"};
        }
    }

    // Fallback: per combo, fix the strongest member not already fixed.
    std::vector<std::string> fixed;
    for (const NullCombo& combo : report.null_combos) {
        bool chosen = false;
        for (const auto& [name, coeff] : combo.members) { // sorted by |coeff|
            if (std::find(fixed.begin(), fixed.end(), name) == fixed.end()) {
                fixed.push_back(name);
                chosen = true;
                break;
            }
        }
        if (!chosen) {
            throw std::runtime_error(
                "every candidate in an unidentifiable combination is already fixed; "
                "manual review required");
        }
    }
    return fixed;
}

Eigen::MatrixXd restrict_columns(const Eigen::MatrixXd& jacobian,
                                 const std::vector<std::string>& free_names,
                                 const std::vector<std::string>& excluded) {
    std::vector<Eigen::Index> keep;
    for (std::size_t i = 0; i < free_names.size(); ++i) {
        if (std::find(excluded.begin(), excluded.end(), free_names[i]) == excluded.end()) {
            keep.push_back(static_cast<Eigen::Index>(i));
        }
    }
    Eigen::MatrixXd out(jacobian.rows(), static_cast<Eigen::Index>(keep.size()));
    for (std::size_t i = 0; i < keep.size(); ++i) {
        out.col(static_cast<Eigen::Index>(i)) = jacobian.col(keep[i]);
    }
    return out;
}

} // namespace lrfcal

#include "lrfcal/params.hpp"

#include <stdexcept>
#include <unordered_map>

namespace lrfcal {

const std::vector<std::string>& parameter_names() {
    static const std::vector<std::string> names = [] {
        std::vector<std::string> out;
        out.reserve(kNumParams);
        for (int i = 1; i <= 6; ++i) {
            const std::string suffix = std::to_string(i);
            out.push_back("alpha" + suffix);
            out.push_back("a" + suffix);
            out.push_back("theta" + suffix);
            out.push_back("d" + suffix);
        }
        for (const char* n : {"rx", "ry", "rz", "rtheta", "px", "py", "pz"}) {
            out.emplace_back(n);
        }
        for (int k = 1; k <= 3; ++k) {
            const std::string suffix = std::to_string(k);
            out.push_back("n" + suffix + "x");
            out.push_back("n" + suffix + "y");
            out.push_back("n" + suffix + "z");
            out.push_back("l" + suffix);
        }
        return out;
    }();
    return names;
}

int parameter_index(const std::string& name) {
    static const std::unordered_map<std::string, int> lookup = [] {
        std::unordered_map<std::string, int> m;
        const auto& names = parameter_names();
        for (int i = 0; i < static_cast<int>(names.size()); ++i) {
            m.emplace(names[i], i);
        }
        return m;
    }();
    const auto it = lookup.find(name);
    if (it == lookup.end()) {
        throw std::invalid_argument("unknown calibration parameter: " + name);
    }
    return it->second;
}

bool is_angular_parameter(int index) {
    if (index < 0 || index >= kNumParams) {
        throw std::out_of_range("parameter index out of range");
    }
    if (index < kExtrinsicOffset) {
        const int field = index % 4;
        return field == 0 || field == 2; // alpha_i, theta_i
    }
    if (index < kPlaneOffset) {
        return index < kExtrinsicOffset + 4; // rx, ry, rz, rtheta
    }
    return (index - kPlaneOffset) % 4 != 3; // normal components; l_k is a length
}

} // namespace lrfcal

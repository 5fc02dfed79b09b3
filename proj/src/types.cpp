#include "alphatest/types.hpp"

#include "alphatest/errors.hpp"

#include <algorithm>
#include <cctype>
#include <string>

namespace alphatest {

std::string_view to_string(TestName name) {
    switch (name) {
        case TestName::kSum: return "SUM";
        case TestName::kMax: return "MAX";
        case TestName::kCc: return "CC";
        case TestName::kDsum: return "DSUM";
        case TestName::kDmax: return "DMAX";
        case TestName::kDcc: return "DCC";
    }
    return "?";
}

std::string_view to_string(Calibration calibration) {
    switch (calibration) {
        case Calibration::kAnalyticNormal: return "analytic-normal";
        case Calibration::kGumbel: return "gumbel";
        case Calibration::kBootstrap: return "bootstrap";
        case Calibration::kCauchy: return "cauchy";
    }
    return "?";
}

TestName parse_test_name(std::string_view text) {
    std::string upper(text);
    std::transform(upper.begin(), upper.end(), upper.begin(),
                   [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
    for (TestName name : kAllTests) {
        if (to_string(name) == upper) return name;
    }
    throw ConfigError("unknown test name '" + std::string(text) +
                      "' (expected SUM, MAX, CC, DSUM, DMAX or DCC)");
}

}  // namespace alphatest

#pragma once

#include <string>

#include "nlclaw/core.hpp"

namespace nlclaw {

/// Declarative initial-datum description, shared by presets and the CLI.
struct U0Spec {
    enum class Kind { constant, sine, step, gaussian_bump, file };
    Kind kind = Kind::constant;

    double value = 0.0;  // constant

    double mean = 0.0;  // sine
    double amplitude = 0.0;
    int frequency = 1;

    double left = 0.0;  // step along axis 0
    double right = 0.0;
    double interface_pos = 0.0;

    double bump_amplitude = 0.0;  // gaussian bump
    double width = 0.0;
    double center = 0.0;
    double baseline = 0.0;

    std::string path;  // snapshot file
};

/// Realize the description as cell averages (3-point Gauss per axis for
/// smooth profiles, exact integration for the step).
Field build_u0(const Grid& g, const U0Spec& spec);

}  // namespace nlclaw

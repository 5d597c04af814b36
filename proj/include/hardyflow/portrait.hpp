#pragma once

#include <string>
#include <vector>

#include "hardyflow/fowler.hpp"
#include "hardyflow/manifolds.hpp"

namespace hardyflow {

enum class PortraitMode { cartesian, stripe };

struct PortraitMark {
    double x = 0.0;
    double y = 0.0;
    std::string label;
};

struct PortraitPath {
    std::vector<FowlerState> states;
    std::string label;
};

struct PortraitStyle {
    PortraitMode mode = PortraitMode::cartesian;
    int width = 640;
    int height = 640;
    std::string title;
    /// Points farther than this from the origin are clipped (cartesian) or capped in R (stripe).
    double clip_radius = 6.0;
    /// Stripe mode draws the stable branches shifted for j = 0..shifts.
    int shifts = 2;
    std::vector<PortraitMark> marks;
};

/// Standalone SVG with axes, curves, trajectories, marks and a legend. Byte-identical for identical input.
std::string render_portrait(const std::vector<ManifoldCurve>& curves, const std::vector<PortraitPath>& paths,
                            const PortraitStyle& style = {});

}  // namespace hardyflow

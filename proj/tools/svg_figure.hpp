#pragma once

#include <optional>
#include <string>
#include <vector>

#include "nonbayes/belief.hpp"
#include "nonbayes/geometry.hpp"

namespace nonbayes::fig {

/// One sweep step: the parameter value and the distorted posteriors (or
/// random-rule support points) it produced, in realization order.
struct Snapshot {
    double value = 0.0;
    std::vector<Belief> points;
};

/// Static SVG of the belief simplex: a segment for two states, the standard
/// equilateral-triangle barycentric map for three. Draws the prior, the
/// Bayesian posteriors, every snapshot's distorted points (older snapshots
/// faded), and optionally a separating hyperplane. Only n in {2,3} is
/// drawable; callers guard on that.
void write_simplex_figure(const std::string& path, const Environment& env,
                          const std::vector<Snapshot>& snapshots,
                          const std::optional<Hyperplane>& plane);

} // namespace nonbayes::fig

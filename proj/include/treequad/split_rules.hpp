#pragma once

#include <string_view>

#include "treequad/container.hpp"
#include "treequad/random.hpp"

namespace treequad {

enum class SplitRule { min_sse, kd, random };

std::string_view to_string(SplitRule rule);
SplitRule parse_split_rule(std::string_view name);

struct SplitDecision {
    AxialCut cut;
    /// Sum over both children of the within-child SSE of Y.
    double score = 0.0;
    SplitRule rule = SplitRule::min_sse;
};

/// Exhaustive search over axial cuts at midpoints between consecutive
/// distinct sample coordinates, minimising SSE_left + SSE_right. Ties go to
/// the lower axis, then the lower threshold.
///
/// Scores are swept with prefix sums of centred Y; candidates within
/// round-off of the sweep minimum are re-scored with the two-pass formula
/// in sample order, so exactly tied partitions compare bitwise equal.
///
/// Throws Errc::degenerate_container when fewer than two samples exist or
/// every axis has a single distinct coordinate.
SplitDecision min_sse_axial(const Container& c);

/// Highest-variance axis of c.X, cut at the coordinate median. Falls back to
/// the next axis when the median lands on the boundary or the axis is flat.
SplitDecision kd_split(const Container& c);

/// Uniform axis, uniform threshold strictly inside the box.
SplitDecision random_axial(const Container& c, Rng& rng);

SplitDecision choose_split(const Container& c, SplitRule rule, Rng& rng);

/// SSE of the two children the cut would produce, two-pass in sample order.
double split_score(const Container& c, const AxialCut& cut);

}  // namespace treequad

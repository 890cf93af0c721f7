#pragma once

#include "oyldp/sampled_function.hpp"

// Grid-based convex conjugation and infimal convolution. Conjugation is exact
// over the sample nodes (no interpolation); infimal convolution interpolates
// its first argument linearly between nodes.

namespace oyldp::convex {

// f*(p) = max_i (p x_i - f(x_i)) over the finite nodes of f, evaluated at the
// nodes of `dual`. Throws std::domain_error when f has an empty effective
// domain. Output nodes whose maximizer sits at an end of f's finite region
// get a boundary flag: the true conjugate may be larger there.
SampledFunction legendre_transform(const SampledFunction& f, const GridSpec& dual);

// (f # g)(x) = min_j (f(x - y_j) + g(y_j)) over the finite nodes y_j of g,
// with f interpolated. Throws std::domain_error when either domain is empty
// and std::invalid_argument when `out` misses dom f + dom g entirely.
// Boundary flags propagate from both inputs and mark window-limited minima.
SampledFunction inf_convolution(const SampledFunction& f, const SampledFunction& g,
                                const GridSpec& out);

// (f*)* on f's own grid, conjugating through the `dual` window; equals the
// closed convex hull of f when the window covers all supporting slopes.
SampledFunction biconjugate(const SampledFunction& f, const GridSpec& dual);

// Convenience overload: dual window inferred from the observed slopes of f
// (padded by one unit each side).
SampledFunction biconjugate(const SampledFunction& f);

}  // namespace oyldp::convex

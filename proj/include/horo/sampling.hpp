#pragma once

#include <random>

#include "horo/manifold.hpp"

namespace horo {

using Rng = std::mt19937_64;

/// Tangent with standard Gaussian coordinates in the orthonormal frame at x.
Tangent random_tangent(const Manifold& m, const Point& x, Rng& rng);

/// Uniformly random direction at x scaled to length `len`.
Tangent random_direction(const Manifold& m, const Point& x, Rng& rng,
                         double len = 1.0);

/// exp(center, r u) with u a random unit direction and r uniform in
/// [0, radius].
Point random_point(const Manifold& m, const Point& center, double radius,
                   Rng& rng);

}  // namespace horo

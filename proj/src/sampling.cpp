#include "horo/sampling.hpp"

namespace horo {

Tangent random_tangent(const Manifold& m, const Point& x, Rng& rng) {
  std::normal_distribution<double> gauss;
  Tangent v = m.zero_tangent();
  for (const Tangent& e : m.tangent_basis(x)) v += gauss(rng) * e;
  return v;
}

Tangent random_direction(const Manifold& m, const Point& x, Rng& rng,
                         double len) {
  for (;;) {
    const Tangent v = random_tangent(m, x, rng);
    const double n = m.norm(x, v);
    if (n > 1e-8) return (len / n) * v;
  }
}

Point random_point(const Manifold& m, const Point& center, double radius,
                   Rng& rng) {
  std::uniform_real_distribution<double> unif(0.0, radius);
  return m.exp(center, random_direction(m, center, rng, unif(rng)));
}

}  // namespace horo

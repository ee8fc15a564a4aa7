#pragma once

#include "epg/types.hpp"

namespace epg {

struct QuadratureRule {
  Vector nodes;
  Vector weights;
};

// Gauss-Legendre nodes and weights on [lo, hi]; exact for polynomials of
// degree <= 2*order - 1.
QuadratureRule gauss_legendre(int order, double lo = -1.0, double hi = 1.0);

// `panels` equal sub-intervals, each with an order-`order` Gauss-Legendre rule.
QuadratureRule composite_gauss_legendre(int order, int panels, double lo, double hi);

// Probabilists' Gauss-Hermite rule: sum_i w_i f(z_i) ~ E[f(z)], z ~ N(0, 1).
QuadratureRule gauss_hermite(int order);

}  // namespace epg

#include "epg/quadrature/rules.hpp"

#include <cmath>
#include <numbers>

#include <Eigen/Eigenvalues>

namespace epg {

QuadratureRule gauss_legendre(int order, double lo, double hi) {
  if (order < 1) throw ConfigError("gauss_legendre: order must be >= 1");
  QuadratureRule rule{Vector(order), Vector(order)};
  const double half = 0.5 * (hi - lo);
  const double mid = 0.5 * (hi + lo);
  for (int i = 0; i < (order + 1) / 2; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (order + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0;
      double p1 = 0.0;
      for (int k = 1; k <= order; ++k) {
        const double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p2) / k;
      }
      dp = order * (x * p0 - p1) / (x * x - 1.0);
      const double dx = p0 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    // recompute the derivative at the converged node
    double p0 = 1.0;
    double p1 = 0.0;
    for (int k = 1; k <= order; ++k) {
      const double p2 = p1;
      p1 = p0;
      p0 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p2) / k;
    }
    dp = order * (x * p0 - p1) / (x * x - 1.0);
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    rule.nodes(i) = mid - half * x;
    rule.nodes(order - 1 - i) = mid + half * x;
    rule.weights(i) = half * w;
    rule.weights(order - 1 - i) = half * w;
  }
  return rule;
}

QuadratureRule composite_gauss_legendre(int order, int panels, double lo, double hi) {
  if (panels < 1) throw ConfigError("composite_gauss_legendre: panels must be >= 1");
  QuadratureRule out{Vector(order * panels), Vector(order * panels)};
  const double width = (hi - lo) / panels;
  for (int p = 0; p < panels; ++p) {
    const QuadratureRule r = gauss_legendre(order, lo + p * width, lo + (p + 1) * width);
    out.nodes.segment(p * order, order) = r.nodes;
    out.weights.segment(p * order, order) = r.weights;
  }
  return out;
}

QuadratureRule gauss_hermite(int order) {
  if (order < 1) throw ConfigError("gauss_hermite: order must be >= 1");
  // Golub-Welsch on the Jacobi matrix of the probabilists' Hermite recurrence.
  Matrix jacobi = Matrix::Zero(order, order);
  for (int k = 1; k < order; ++k) {
    jacobi(k, k - 1) = std::sqrt(static_cast<double>(k));
    jacobi(k - 1, k) = jacobi(k, k - 1);
  }
  Eigen::SelfAdjointEigenSolver<Matrix> eig(jacobi);
  QuadratureRule rule{eig.eigenvalues(), Vector(order)};
  for (int i = 0; i < order; ++i) rule.weights(i) = eig.eigenvectors()(0, i) * eig.eigenvectors()(0, i);
  // symmetrise to remove eigen-solver round-off
  for (int i = 0; i < order / 2; ++i) {
    const int j = order - 1 - i;
    const double x = 0.5 * (rule.nodes(j) - rule.nodes(i));
    const double w = 0.5 * (rule.weights(i) + rule.weights(j));
    rule.nodes(i) = -x;
    rule.nodes(j) = x;
    rule.weights(i) = w;
    rule.weights(j) = w;
  }
  if (order % 2 == 1) rule.nodes(order / 2) = 0.0;
  rule.weights /= rule.weights.sum();
  return rule;
}

}  // namespace epg

#pragma once

#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace epg {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

// The single pseudorandom generator used throughout the library. Every
// stochastic operation takes an explicit seed or a reference to one of these.
using Rng = std::mt19937_64;

inline Rng make_rng(std::uint64_t seed) { return Rng(seed); }

// Derives an independent stream seed from a base seed and a tag.
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t tag);

Vector standard_normal(int n, Rng& rng);

// States are either tabular (index) or continuous (feature vector x).
struct State {
  int index = 0;
  Vector x;

  static State tabular(int i) { return State{i, Vector()}; }
  static State continuous(Vector features) { return State{0, std::move(features)}; }
};

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Inconsistent or unsupported configuration (shapes, estimator choice, ...).
class ConfigError : public Error {
 public:
  using Error::Error;
};

// Argument outside the domain of a density or map.
class DomainError : public Error {
 public:
  using Error::Error;
};

// A numeric routine could not reach its accuracy budget.
class AccuracyError : public Error {
 public:
  using Error::Error;
};

// Something that should be impossible (singular well-posed system, divergence).
class InternalError : public Error {
 public:
  using Error::Error;
};

}  // namespace epg

#pragma once

#include <map>
#include <string>
#include <vector>

#include "epg/types.hpp"

namespace epg {

struct ParamBlock {
  std::string name;
  int offset = 0;
  int size = 0;
};

using ParamLayout = std::vector<ParamBlock>;

int layout_size(const ParamLayout& layout);
bool same_layout(const ParamLayout& a, const ParamLayout& b);

// A gradient split into named parameter groups, plus provenance metadata.
class GradientEstimate {
 public:
  GradientEstimate() = default;
  GradientEstimate(ParamLayout layout, Vector flat, std::string estimator);

  static GradientEstimate zeros(const ParamLayout& layout, std::string estimator);

  const ParamLayout& layout() const { return layout_; }
  const Vector& flat() const { return flat_; }
  Vector& flat() { return flat_; }

  bool has_block(const std::string& name) const;
  Vector block(const std::string& name) const;
  void set_block(const std::string& name, const Vector& value);

  double max_abs_diff(const GradientEstimate& other) const;

  GradientEstimate& operator+=(const GradientEstimate& other);
  GradientEstimate& operator*=(double k);

  std::string estimator;
  long sample_count = 0;
  // Per-sample variance (trace of the sample covariance) for sampled
  // estimators; exactly 0 for analytic ones.
  double sample_variance = 0.0;
  // Per-component standard errors for sampled estimators (empty otherwise).
  Vector standard_error;
  std::map<std::string, double> diagnostics;
  // Non-empty when a numeric component could not certify its accuracy.
  std::string warning;

 private:
  const ParamBlock& find(const std::string& name) const;

  ParamLayout layout_;
  Vector flat_;
};

}  // namespace epg

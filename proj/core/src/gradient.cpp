#include "epg/gradient.hpp"

namespace epg {

int layout_size(const ParamLayout& layout) {
  int n = 0;
  for (const auto& b : layout) n += b.size;
  return n;
}

bool same_layout(const ParamLayout& a, const ParamLayout& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i].name != b[i].name || a[i].offset != b[i].offset || a[i].size != b[i].size) return false;
  }
  return true;
}

GradientEstimate::GradientEstimate(ParamLayout layout, Vector flat, std::string estimator_name)
    : estimator(std::move(estimator_name)), layout_(std::move(layout)), flat_(std::move(flat)) {
  if (flat_.size() != layout_size(layout_)) {
    throw ConfigError("GradientEstimate: flat vector does not match parameter layout");
  }
}

GradientEstimate GradientEstimate::zeros(const ParamLayout& layout, std::string estimator_name) {
  return GradientEstimate(layout, Vector::Zero(layout_size(layout)), std::move(estimator_name));
}

const ParamBlock& GradientEstimate::find(const std::string& name) const {
  for (const auto& b : layout_) {
    if (b.name == name) return b;
  }
  throw ConfigError("GradientEstimate: no block named '" + name + "'");
}

bool GradientEstimate::has_block(const std::string& name) const {
  for (const auto& b : layout_) {
    if (b.name == name) return true;
  }
  return false;
}

Vector GradientEstimate::block(const std::string& name) const {
  const auto& b = find(name);
  return flat_.segment(b.offset, b.size);
}

void GradientEstimate::set_block(const std::string& name, const Vector& value) {
  const auto& b = find(name);
  if (value.size() != b.size) throw ConfigError("GradientEstimate: block size mismatch for '" + name + "'");
  flat_.segment(b.offset, b.size) = value;
}

double GradientEstimate::max_abs_diff(const GradientEstimate& other) const {
  if (!same_layout(layout_, other.layout_)) {
    throw ConfigError("GradientEstimate: comparing estimates with different layouts");
  }
  if (flat_.size() == 0) return 0.0;
  return (flat_ - other.flat_).cwiseAbs().maxCoeff();
}

GradientEstimate& GradientEstimate::operator+=(const GradientEstimate& other) {
  if (!same_layout(layout_, other.layout_)) {
    throw ConfigError("GradientEstimate: adding estimates with different layouts");
  }
  flat_ += other.flat_;
  return *this;
}

GradientEstimate& GradientEstimate::operator*=(double k) {
  flat_ *= k;
  return *this;
}

}  // namespace epg

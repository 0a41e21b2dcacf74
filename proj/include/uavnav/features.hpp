// Copyright 2026 The uavnav Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef UAVNAV_FEATURES_HPP
#define UAVNAV_FEATURES_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <utility>
#include <vector>

#include "uavnav/world.hpp"

namespace uavnav {

/// phi(s): the first n_x entries encode x, the last n_y entries encode y.
using FeatureVector = std::vector<double>;

enum class EncoderKind { FSR, RBF };

struct EncoderSpec {
  EncoderKind kind = EncoderKind::FSR;
  std::size_t n_x = 25;
  std::size_t n_y = 25;
  Rect area;
  /// Kernel variances mu_k^2, indexed by kernel k and shared by both axes.
  /// Must cover max(n_x, n_y) entries; empty means "grid spacing squared".
  std::vector<double> rbf_variance;

  std::size_t dim() const { return n_x + n_y; }

  double x_center(std::size_t k) const {
    return area.x_min + static_cast<double>(k) / static_cast<double>(n_x) * area.width();
  }
  double y_center(std::size_t k) const {
    return area.y_min + static_cast<double>(k) / static_cast<double>(n_y) * area.height();
  }

  double variance(std::size_t k) const {
    if (rbf_variance.empty()) {
      const double spacing = std::max(area.width() / static_cast<double>(n_x),
                                      area.height() / static_cast<double>(n_y));
      return spacing * spacing;
    }
    return rbf_variance[k];
  }

  void validate() const {
    if (n_x < 1 || n_y < 1) throw std::invalid_argument("encoder: n_x and n_y must be >= 1");
    area.validate("encoder.area");
    if (kind == EncoderKind::RBF && !rbf_variance.empty()) {
      if (rbf_variance.size() < std::max(n_x, n_y))
        throw std::invalid_argument("encoder.rbf_variance needs max(n_x, n_y) entries");
      for (double v : rbf_variance)
        if (!(v > 0.0) || !std::isfinite(v))
          throw std::invalid_argument("encoder.rbf_variance entries must be positive");
    }
  }

  friend bool operator==(const EncoderSpec&, const EncoderSpec&) = default;
};

namespace detail {

// Index of the half-open bin [edge_k, edge_k+1) holding v; the last bin is
// closed so that the upper edge of the range encodes.
inline std::size_t fsr_bin(double v, double lo, double hi, std::size_t n) {
  const double width = hi - lo;
  auto edge = [&](std::size_t k) {
    return lo + static_cast<double>(k) / static_cast<double>(n) * width;
  };
  const double guess = std::floor((v - lo) / width * static_cast<double>(n));
  std::size_t k = guess <= 0.0 ? 0 : std::min(static_cast<std::size_t>(guess), n - 1);
  // The division above can land one bin off near an edge.
  while (k > 0 && v < edge(k)) --k;
  while (k + 1 < n && v >= edge(k + 1)) ++k;
  return k;
}

// Far tails are clamped to the smallest normal double instead of
// underflowing to zero, so every kernel response stays strictly positive.
inline double gaussian(double offset, double variance) {
  return std::max(std::exp(-offset * offset / (2.0 * variance)),
                  std::numeric_limits<double>::min());
}

}  // namespace detail

inline void encode_fsr(const Position& p, const EncoderSpec& spec, FeatureVector& out) {
  if (!spec.area.contains_closed(p.x, p.y))
    throw std::out_of_range("encode_fsr: position outside the encoder area");
  out.assign(spec.dim(), 0.0);
  out[detail::fsr_bin(p.x, spec.area.x_min, spec.area.x_max, spec.n_x)] = 1.0;
  out[spec.n_x + detail::fsr_bin(p.y, spec.area.y_min, spec.area.y_max, spec.n_y)] = 1.0;
}

inline FeatureVector encode_fsr(const Position& p, const EncoderSpec& spec) {
  FeatureVector out;
  encode_fsr(p, spec, out);
  return out;
}

inline void encode_rbf(const Position& p, const EncoderSpec& spec, FeatureVector& out) {
  out.resize(spec.dim());
  for (std::size_t k = 0; k < spec.n_x; ++k) {
    const double dx = p.x - spec.x_center(k);
    out[k] = detail::gaussian(dx, spec.variance(k));
  }
  for (std::size_t k = 0; k < spec.n_y; ++k) {
    const double dy = p.y - spec.y_center(k);
    out[spec.n_x + k] = detail::gaussian(dy, spec.variance(k));
  }
}

inline FeatureVector encode_rbf(const Position& p, const EncoderSpec& spec) {
  FeatureVector out;
  encode_rbf(p, spec, out);
  return out;
}

/// Encoder functor over an EncoderSpec, dispatching on its kind.
class SpecEncoder {
 public:
  SpecEncoder() = default;
  explicit SpecEncoder(EncoderSpec spec) : spec_(std::move(spec)) { spec_.validate(); }

  std::size_t dim() const { return spec_.dim(); }
  const EncoderSpec& spec() const { return spec_; }

  void operator()(const Position& p, FeatureVector& out) const {
    if (spec_.kind == EncoderKind::FSR)
      encode_fsr(p, spec_, out);
    else
      encode_rbf(p, spec_, out);
  }

 private:
  EncoderSpec spec_;
};

}  // namespace uavnav

#endif  // UAVNAV_FEATURES_HPP

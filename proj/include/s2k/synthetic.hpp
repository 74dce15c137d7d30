#pragma once

#include "s2k/image.hpp"
#include "s2k/rng.hpp"

namespace s2k {

// Procedural grayscale scenes with natural-image statistics: a 1/f
// random-phase field plus a handful of soft-edged shapes, mapped into
// [min_lum, 1]. The luminance floor keeps every pixel strictly away
// from zero, which matters downstream: shape comparisons against
// near-black pixels would otherwise be dominated by the truncation
// threshold instead of the content.
struct TextureConfig {
  int size = 256;
  double min_lum = 0.05;
  double spectral_alpha = 1.2;  // amplitude falloff exponent of the field
};

GrayImage make_texture(const TextureConfig& cfg, Rng& rng);

}  // namespace s2k

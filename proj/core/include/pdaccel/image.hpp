#pragma once

#include <pdaccel/types.hpp>

#include <cstdint>
#include <string>

namespace pdaccel {

/// Interleaved image: value of channel k at column i, row j is
/// data[(j * width + i) * channels + k]. Values are nominally in [0, 255]
/// and are not clamped.
struct Image {
  int width = 0;
  int height = 0;
  int channels = 1;
  Vector data;

  Image() = default;
  Image(int w, int h, int c);
  Image(int w, int h, int c, Vector values);

  double& at(int i, int j, int k = 0) { return data[index(i, j, k)]; }
  double at(int i, int j, int k = 0) const { return data[index(i, j, k)]; }
  Index pixel_count() const { return Index(width) * height; }
  bool empty() const { return width == 0 || height == 0; }

 private:
  Index index(int i, int j, int k) const {
    return (Index(j) * width + i) * channels + k;
  }
};

/// Reads binary PGM (P5, 1 channel) or PPM (P6, 3 channels) with maxval
/// 255. Throws FormatError on malformed or unsupported input.
Image load_ppm(const std::string& path);

/// Writes P5 for 1 channel and P6 for 3, rounding and clamping to [0, 255].
void save_ppm(const Image& img, const std::string& path);

/// Adds i.i.d. N(0, std^2) noise. Uniforms come from a xorshift64* stream
/// seeded through splitmix64; pairs are turned into normals by Box-Muller.
Image add_gaussian_noise(const Image& img, double std, std::uint64_t seed);

/// Deterministic piecewise-constant test pattern over a linear ramp.
Image synthetic_image(int width, int height, int channels = 1);

}  // namespace pdaccel

#include <pdaccel/image.hpp>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <iterator>
#include <numbers>
#include <stdexcept>
#include <vector>

namespace pdaccel {

Image::Image(int w, int h, int c) : Image(w, h, c, Vector::Zero(Index(w) * h * c)) {}

Image::Image(int w, int h, int c, Vector values)
    : width(w), height(h), channels(c), data(std::move(values)) {
  if (w < 0 || h < 0 || c < 1)
    throw std::invalid_argument("Image: invalid dimensions");
  if (data.size() != Index(w) * h * c)
    throw std::invalid_argument("Image: pixel count does not match dimensions");
}

namespace {

class HeaderReader {
 public:
  explicit HeaderReader(const std::vector<unsigned char>& bytes) : b_(bytes) {}

  std::string magic() {
    if (b_.size() < 2) throw FormatError("ppm: file too short");
    pos_ = 2;
    return std::string(b_.begin(), b_.begin() + 2);
  }

  long number() {
    skip_space_and_comments();
    if (pos_ >= b_.size() || !std::isdigit(b_[pos_]))
      throw FormatError("ppm: malformed header");
    long v = 0;
    while (pos_ < b_.size() && std::isdigit(b_[pos_])) {
      v = v * 10 + (b_[pos_] - '0');
      if (v > 1'000'000'000) throw FormatError("ppm: header value too large");
      ++pos_;
    }
    return v;
  }

  // Exactly one whitespace byte separates maxval from the payload.
  std::size_t payload_start() {
    if (pos_ >= b_.size() || !std::isspace(b_[pos_]))
      throw FormatError("ppm: missing separator before pixel data");
    return pos_ + 1;
  }

 private:
  void skip_space_and_comments() {
    while (pos_ < b_.size()) {
      if (std::isspace(b_[pos_])) {
        ++pos_;
      } else if (b_[pos_] == '#') {
        while (pos_ < b_.size() && b_[pos_] != '\n') ++pos_;
      } else {
        break;
      }
    }
  }

  const std::vector<unsigned char>& b_;
  std::size_t pos_ = 0;
};

std::uint64_t splitmix64(std::uint64_t& state) {
  state += 0x9e3779b97f4a7c15ULL;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

class XorShift64Star {
 public:
  explicit XorShift64Star(std::uint64_t seed) {
    std::uint64_t s = seed;
    state_ = splitmix64(s);
    if (state_ == 0) state_ = 0x2545f4914f6cdd1dULL;
  }

  std::uint64_t next() {
    state_ ^= state_ >> 12;
    state_ ^= state_ << 25;
    state_ ^= state_ >> 27;
    return state_ * 0x2545f4914f6cdd1dULL;
  }

  // Uniform in (0, 1].
  double uniform_open0() {
    return (static_cast<double>(next() >> 11) + 1.0) * 0x1.0p-53;
  }

 private:
  std::uint64_t state_;
};

}  // namespace

Image load_ppm(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("ppm: cannot open " + path);
  const std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)),
                                         std::istreambuf_iterator<char>());
  HeaderReader hdr(bytes);
  const std::string magic = hdr.magic();
  int channels;
  if (magic == "P5") {
    channels = 1;
  } else if (magic == "P6") {
    channels = 3;
  } else {
    throw FormatError("ppm: unsupported magic '" + magic + "'");
  }
  const long w = hdr.number();
  const long h = hdr.number();
  const long maxval = hdr.number();
  if (w <= 0 || h <= 0) throw FormatError("ppm: non-positive dimensions");
  if (maxval != 255)
    throw FormatError("ppm: unsupported maxval " + std::to_string(maxval));
  const std::size_t start = hdr.payload_start();
  const std::size_t need = std::size_t(w) * std::size_t(h) * channels;
  if (bytes.size() < start + need) throw FormatError("ppm: truncated pixel data");

  Image img(static_cast<int>(w), static_cast<int>(h), channels);
  for (std::size_t i = 0; i < need; ++i) img.data[Index(i)] = bytes[start + i];
  return img;
}

void save_ppm(const Image& img, const std::string& path) {
  if (img.channels != 1 && img.channels != 3)
    throw FormatError("ppm: only 1 or 3 channels can be written");
  if (img.empty()) throw FormatError("ppm: empty image");
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FormatError("ppm: cannot open " + path + " for writing");
  out << (img.channels == 1 ? "P5" : "P6") << '\n'
      << img.width << ' ' << img.height << "\n255\n";
  std::vector<char> payload(static_cast<std::size_t>(img.data.size()));
  for (Index i = 0; i < img.data.size(); ++i) {
    const double v = std::clamp(std::round(img.data[i]), 0.0, 255.0);
    payload[std::size_t(i)] = static_cast<char>(static_cast<unsigned char>(v));
  }
  out.write(payload.data(), static_cast<std::streamsize>(payload.size()));
  if (!out) throw FormatError("ppm: write failed for " + path);
}

Image add_gaussian_noise(const Image& img, double std, std::uint64_t seed) {
  if (!(std >= 0.0)) throw std::invalid_argument("add_gaussian_noise: std must be >= 0");
  Image out = img;
  if (std == 0.0) return out;
  XorShift64Star rng(seed);
  const Index n = out.data.size();
  for (Index i = 0; i < n; i += 2) {
    const double r = std::sqrt(-2.0 * std::log(rng.uniform_open0()));
    const double phi = 2.0 * std::numbers::pi * rng.uniform_open0();
    out.data[i] += std * r * std::cos(phi);
    if (i + 1 < n) out.data[i + 1] += std * r * std::sin(phi);
  }
  return out;
}

Image synthetic_image(int width, int height, int channels) {
  if (width < 1 || height < 1 || channels < 1)
    throw std::invalid_argument("synthetic_image: invalid dimensions");
  Image img(width, height, channels);
  const double span = std::max(1, width + height - 2);
  auto inside = [](int v, int lo, int hi) { return v >= lo && v < hi; };
  for (int j = 0; j < height; ++j) {
    for (int i = 0; i < width; ++i) {
      double v = 60.0 + 80.0 * (i + j) / span;
      if (inside(i, width / 8, width / 2) && inside(j, height / 8, height / 2))
        v += 90.0;
      if (inside(i, width / 2, 7 * width / 8) &&
          inside(j, height / 2, 7 * height / 8))
        v -= 40.0;
      if (inside(i, 5 * width / 8, 7 * width / 8) &&
          inside(j, height / 8, 3 * height / 8))
        v += 50.0;
      for (int k = 0; k < channels; ++k) img.at(i, j, k) = v + 10.0 * k;
    }
  }
  return img;
}

}  // namespace pdaccel

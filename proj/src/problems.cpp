#include "proxmm/problems.hpp"

#include <cctype>
#include <cmath>
#include <fstream>
#include <stdexcept>
#include <utility>
#include <vector>

#include "proxmm/splitmix.hpp"

namespace proxmm {

void Image::validate() const {
  if (side < 1) throw std::invalid_argument("Image: side must be >= 1");
  if (pixels.size() != side * side)
    throw std::invalid_argument("Image: pixel count must equal side^2");
  for (Index i = 0; i < pixels.size(); ++i)
    if (!(pixels[i] >= 0.0 && pixels[i] <= 1.0))
      throw std::invalid_argument("Image: intensities must lie in [0, 1]");
}

Problem build_l1tv(const Image& y, double alpha) {
  y.validate();
  if (!(alpha > 0.0)) throw std::invalid_argument("build_l1tv: alpha must be positive");
  const Index n2 = y.side * y.side;
  LinearOperator e = LinearOperator::vstack(
      {LinearOperator::identity(n2), LinearOperator::grad2d_periodic(y.side)});
  // Data block alpha ||u - y||_1 on [0, n2); gradient block pairing vertical
  // and horizontal differences of each pixel on [n2, 3 n2).
  ProxSpec phi = ProxSpec::block_sum(
      {{ProxSpec::affine_shifted(ProxSpec::l1(alpha), y.pixels), 0, n2},
       {ProxSpec::group_l21(n2), n2, 2 * n2}});
  return Problem(SmoothSpec::zero(n2), std::move(e), std::move(phi));
}

Problem build_lasso(Matrix a, Vector b, double alpha) {
  if (!(alpha > 0.0)) throw std::invalid_argument("build_lasso: alpha must be positive");
  const Index n = a.cols();
  SmoothSpec f = SmoothSpec::quadratic(std::move(a), std::move(b));
  return Problem(std::move(f), LinearOperator::identity(n), ProxSpec::l1(alpha));
}

namespace {

// Next header token, skipping whitespace and '#' comments to end of line.
std::string next_pgm_token(std::istream& in) {
  std::string tok;
  int ch = in.get();
  while (ch != EOF) {
    if (ch == '#') {
      while (ch != EOF && ch != '\n') ch = in.get();
    } else if (std::isspace(ch)) {
      ch = in.get();
    } else {
      break;
    }
  }
  while (ch != EOF && !std::isspace(ch) && ch != '#') {
    tok.push_back(static_cast<char>(ch));
    ch = in.get();
  }
  // Leave the terminating byte in the stream: the caller owns the single
  // whitespace separating the header from the raster.
  if (ch != EOF) in.unget();
  return tok;
}

long parse_pgm_int(std::istream& in, const char* what) {
  const std::string tok = next_pgm_token(in);
  if (tok.empty()) throw std::runtime_error(std::string("read_pgm: missing ") + what);
  std::size_t used = 0;
  long value = 0;
  try {
    value = std::stol(tok, &used);
  } catch (const std::exception&) {
    throw std::runtime_error(std::string("read_pgm: malformed ") + what);
  }
  if (used != tok.size()) throw std::runtime_error(std::string("read_pgm: malformed ") + what);
  return value;
}

}  // namespace

Image read_pgm(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("read_pgm: cannot open " + path);
  const std::string magic = next_pgm_token(in);
  if (magic != "P5")
    throw std::runtime_error("read_pgm: unsupported magic '" + magic + "' (want binary P5)");
  const long width = parse_pgm_int(in, "width");
  const long height = parse_pgm_int(in, "height");
  const long maxval = parse_pgm_int(in, "maxval");
  if (width < 1 || height < 1) throw std::runtime_error("read_pgm: bad dimensions");
  if (width != height) throw std::runtime_error("read_pgm: image must be square");
  if (maxval != 255) throw std::runtime_error("read_pgm: maxval must be 255");
  in.get();  // single whitespace byte separating header and raster
  if (!in) throw std::runtime_error("read_pgm: truncated header");

  const Index n = static_cast<Index>(width);
  std::vector<unsigned char> raster(static_cast<std::size_t>(n) * n);
  in.read(reinterpret_cast<char*>(raster.data()), static_cast<std::streamsize>(raster.size()));
  if (in.gcount() != static_cast<std::streamsize>(raster.size()))
    throw std::runtime_error("read_pgm: truncated raster");

  Image img;
  img.side = n;
  img.pixels.resize(n * n);
  // File raster is row-major; memory layout is column-major.
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < n; ++j)
      img.pixels[i + n * j] = static_cast<double>(raster[i * n + j]) / 255.0;
  return img;
}

void write_pgm(const Image& img, const std::string& path) {
  img.validate();
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("write_pgm: cannot open " + path);
  const Index n = img.side;
  out << "P5\n" << n << " " << n << "\n255\n";
  std::vector<unsigned char> raster(static_cast<std::size_t>(n) * n);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < n; ++j) {
      const double q = std::floor(img.pixels[i + n * j] * 255.0 + 0.5);  // round half up
      raster[i * n + j] = static_cast<unsigned char>(std::min(255.0, std::max(0.0, q)));
    }
  out.write(reinterpret_cast<const char*>(raster.data()),
            static_cast<std::streamsize>(raster.size()));
  if (!out) throw std::runtime_error("write_pgm: write failed");
}

Image salt_pepper_noise(const Image& img, double density, std::uint64_t seed) {
  img.validate();
  if (!(density > 0.0 && density < 1.0))
    throw std::invalid_argument("salt_pepper_noise: density must lie in (0, 1)");
  SplitMix64 rng(seed);
  Image out = img;
  for (Index idx = 0; idx < out.pixels.size(); ++idx) {
    if (rng.next_double() < density)
      out.pixels[idx] = rng.next_double() < 0.5 ? 0.0 : 1.0;
  }
  return out;
}

}  // namespace proxmm

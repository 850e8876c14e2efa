#pragma once

#include <cstdint>
#include <string>

#include "proxmm/problem.hpp"
#include "proxmm/types.hpp"

namespace proxmm {

// Square grayscale image with intensities in [0, 1], stored column-major:
// pixel (row i, column j) lives at index i + side * j.
struct Image {
  Index side = 0;
  Vector pixels;

  void validate() const;  // throws on size mismatch or out-of-range values
};

// Anisotropic-data / isotropic-TV denoising model
//   min_u  alpha ||u - y||_1 + sum_i ||(grad u)_i||_2
// posed as min phi(E u) with f = 0, E = [I; D] for the periodic
// forward-difference gradient D, and phi the block sum of the shifted
// weighted l1 norm and the grouped l2 norm pairing the two gradient
// components of each pixel.
Problem build_l1tv(const Image& y, double alpha);

// Lasso  min_x (1/2)||A x - b||^2 + alpha ||x||_1  with E = I.
Problem build_lasso(Matrix a, Vector b, double alpha);

// Binary PGM (P5, maxval 255) reader/writer for square images. The raster is
// row-major in the file and column-major in memory; writing quantizes by
// round-half-up to 8 bits, so write/read round-trips 8-bit data exactly.
Image read_pgm(const std::string& path);
void write_pgm(const Image& img, const std::string& path);

// Salt-and-pepper corruption: each pixel is replaced independently with
// probability `density`, equally likely by 0 or 1. Deterministic for a fixed
// seed (SplitMix64 stream; two draws per corrupted pixel, one otherwise).
Image salt_pepper_noise(const Image& img, double density, std::uint64_t seed);

}  // namespace proxmm

#pragma once

#include <cstdint>
#include <vector>

#include "medmark/features.hpp"
#include "medmark/image.hpp"
#include "medmark/transforms.hpp"
#include "medmark/watermark.hpp"

// Serial reference implementations of the parallel kernels. They are kept
// deliberately plain (no OpenMP, no precomputed basis reuse tricks) so the
// tests can check the fast paths against them and the benchmark can measure
// the speedup.
namespace medmark::reference {

// 2-D DCT-II / DCT-III straight from the definition, O(n^4) per block.
std::vector<double> dct2_forward_direct(const std::vector<double>& block, int n);
std::vector<double> dct2_inverse_direct(const std::vector<double>& coeffs, int n);

// Single-level Haar DWT, plain double loops.
SubbandDecomposition dwt_haar_forward_serial(const ImageGray& img);
ImageGray dwt_haar_inverse_serial(const SubbandDecomposition& sub);

// Whole embed pipeline without any parallel pragma.
ImageGray embed_serial(const ImageGray& img, const WatermarkPayload& payload, const EmbedConfig& cfg);

// Brute-force nearest-neighbor distances, serial.
std::vector<double> nearest_neighbor_distances_serial(const FeatureSet& queries, const FeatureSet& base,
                                                      bool exclude_self = false);

}  // namespace medmark::reference

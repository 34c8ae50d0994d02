#pragma once

#include <cstdint>
#include <vector>

#include "medmark/image.hpp"

namespace medmark {

// Lossless compressed size of an image in bytes: quantize to 8 bits, filter
// each row with the cheapest of none/left/up/average/Paeth (minimum sum of
// absolute residuals, first wins ties), then DEFLATE the filtered stream
// with fixed settings. Deterministic: identical images give identical sizes.
std::size_t lossless_compress_size(const ImageGray& img);

// The filtered byte stream that gets compressed (one filter-id byte per row
// followed by the residuals). Exposed for tests.
std::vector<uint8_t> predictive_filter_stream(const std::vector<uint8_t>& gray8, int width, int height);

// Raw DEFLATE helper (zlib, fixed level), returns compressed byte count.
std::size_t deflate_size(const std::vector<uint8_t>& bytes);

}  // namespace medmark

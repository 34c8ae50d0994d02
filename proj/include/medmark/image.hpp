#pragma once

#include <algorithm>
#include <cstddef>
#include <vector>

#include "medmark/errors.hpp"

namespace medmark {

// Grayscale image with row-major double pixels in the canonical range [0,1].
struct ImageGray {
    int width = 0;
    int height = 0;
    std::vector<double> pixels;   // size == width * height
    int source_bit_depth = 8;     // 8 or 16

    ImageGray() = default;
    ImageGray(int w, int h, double fill = 0.0, int bit_depth = 8)
        : width(w), height(h), pixels(static_cast<std::size_t>(w) * h, fill), source_bit_depth(bit_depth) {
        if (w <= 0 || h <= 0) throw ArgumentError("image dimensions must be positive");
    }

    double& at(int x, int y) { return pixels[static_cast<std::size_t>(y) * width + x]; }
    double at(int x, int y) const { return pixels[static_cast<std::size_t>(y) * width + x]; }

    std::size_t pixel_count() const { return pixels.size(); }

    void clamp01() {
        for (double& p : pixels) p = std::clamp(p, 0.0, 1.0);
    }
};

}  // namespace medmark

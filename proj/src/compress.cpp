#include "medmark/compress.hpp"

#include <zlib.h>

#include <array>
#include <cmath>
#include <cstdlib>

#include "medmark/errors.hpp"

namespace medmark {

namespace {

constexpr int kDeflateLevel = 6;  // fixed: sizes are only comparable within one configuration

enum Filter : uint8_t { kNone = 0, kLeft = 1, kUp = 2, kAverage = 3, kPaeth = 4 };

inline int paeth_predict(int left, int up, int upleft) {
    const int p = left + up - upleft;
    const int pa = std::abs(p - left);
    const int pb = std::abs(p - up);
    const int pc = std::abs(p - upleft);
    if (pa <= pb && pa <= pc) return left;
    if (pb <= pc) return up;
    return upleft;
}

inline int predict(Filter f, int left, int up, int upleft) {
    switch (f) {
        case kNone: return 0;
        case kLeft: return left;
        case kUp: return up;
        case kAverage: return (left + up) / 2;
        default: return paeth_predict(left, up, upleft);
    }
}

}  // namespace

std::vector<uint8_t> predictive_filter_stream(const std::vector<uint8_t>& gray8, int width, int height) {
    if (width <= 0 || height <= 0 || gray8.size() != static_cast<std::size_t>(width) * height) {
        throw ArgumentError("filter input size mismatch");
    }

    std::vector<uint8_t> out;
    out.reserve(gray8.size() + height);
    std::array<std::vector<uint8_t>, 5> candidates;
    for (auto& c : candidates) c.resize(width);

    for (int y = 0; y < height; ++y) {
        const uint8_t* row = gray8.data() + static_cast<std::size_t>(y) * width;
        const uint8_t* prev = y > 0 ? row - width : nullptr;

        long best_cost = -1;
        int best = kNone;
        for (int f = kNone; f <= kPaeth; ++f) {
            long cost = 0;
            std::vector<uint8_t>& cand = candidates[f];
            for (int x = 0; x < width; ++x) {
                const int left = x > 0 ? row[x - 1] : 0;
                const int up = prev ? prev[x] : 0;
                const int upleft = (x > 0 && prev) ? prev[x - 1] : 0;
                const int r = static_cast<int>(row[x]) - predict(static_cast<Filter>(f), left, up, upleft);
                cost += std::abs(r);
                cand[x] = static_cast<uint8_t>(r & 0xFF);
            }
            if (best_cost < 0 || cost < best_cost) {  // ties keep the earlier filter
                best_cost = cost;
                best = f;
            }
        }
        out.push_back(static_cast<uint8_t>(best));
        out.insert(out.end(), candidates[best].begin(), candidates[best].end());
    }
    return out;
}

std::size_t deflate_size(const std::vector<uint8_t>& bytes) {
    uLongf bound = compressBound(static_cast<uLong>(bytes.size()));
    std::vector<uint8_t> buf(bound);
    const int rc = compress2(buf.data(), &bound, bytes.data(), static_cast<uLong>(bytes.size()), kDeflateLevel);
    if (rc != Z_OK) throw NumericalError("deflate failed with code " + std::to_string(rc));
    return static_cast<std::size_t>(bound);
}

std::size_t lossless_compress_size(const ImageGray& img) {
    std::vector<uint8_t> gray8(img.pixel_count());
    for (std::size_t i = 0; i < gray8.size(); ++i) {
        const double q = std::floor(img.pixels[i] * 255.0 + 0.5);
        gray8[i] = static_cast<uint8_t>(std::clamp(q, 0.0, 255.0));
    }
    return deflate_size(predictive_filter_stream(gray8, img.width, img.height));
}

}  // namespace medmark

// Per-block machinery shared by the parallel embed kernel and its serial
// reference twin. Both must run exactly this arithmetic so their outputs are
// bit-identical; only the loop scheduling differs between them.
#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "medmark/image.hpp"
#include "medmark/transforms.hpp"
#include "medmark/watermark.hpp"

namespace medmark::detail {

// Coefficient response of each pixel in a block's 2bs x 2bs footprint: the
// composition of the Haar synthesis (0.5 with a subband sign per 2x2 corner)
// and one 2-D DCT basis function. Orthonormal, so the same weights analyze
// and synthesize the carrier.
struct CarrierGeometry {
    int block_size = 0;
    int px = 0, py = 0;
    std::vector<double> weight;

    double w(int x, int y) const { return weight[static_cast<std::size_t>(y) * px + x]; }
};

inline int subband_sign(Subband sb, int dx, int dy) {
    switch (sb) {
        case Subband::LL: return 1;
        case Subband::HL: return dx == 0 ? 1 : -1;
        case Subband::LH: return dy == 0 ? 1 : -1;
        default: return (dx == dy) ? 1 : -1;
    }
}

inline CarrierGeometry carrier_geometry(const EmbedConfig& cfg) {
    const int bs = cfg.block_size;
    auto basis = [bs](int k, int j) {
        const double alpha = k == 0 ? std::sqrt(1.0 / bs) : std::sqrt(2.0 / bs);
        return alpha * std::cos(3.14159265358979323846 * (2 * j + 1) * k / (2.0 * bs));
    };

    CarrierGeometry g;
    g.block_size = bs;
    g.px = 2 * bs;
    g.py = 2 * bs;
    g.weight.resize(static_cast<std::size_t>(g.px) * g.py);
    for (int y = 0; y < g.py; ++y) {
        for (int x = 0; x < g.px; ++x) {
            g.weight[static_cast<std::size_t>(y) * g.px + x] =
                0.5 * subband_sign(cfg.subband, x % 2, y % 2) *
                basis(cfg.coeff_row, y / 2) * basis(cfg.coeff_col, x / 2);
        }
    }
    return g;
}

// Carrier coefficient of one block, read straight from (optionally
// quantized) pixels.
inline double carrier_coefficient(const ImageGray& img, const CarrierGeometry& g, int bx, int by,
                                  double quantize_maxval = 0.0) {
    double c = 0.0;
    const int x0 = bx * g.px, y0 = by * g.py;
    for (int y = 0; y < g.py; ++y) {
        for (int x = 0; x < g.px; ++x) {
            double p = img.at(x0 + x, y0 + y);
            if (quantize_maxval > 0.0) {
                p = std::clamp(std::floor(p * quantize_maxval + 0.5), 0.0, quantize_maxval) / quantize_maxval;
            }
            c += g.w(x, y) * p;
        }
    }
    return c;
}

// Signed distance (in step units) from the decoded point to its decision
// boundary; negative means the bit decodes wrong.
inline double decode_margin(double coeff, double step, int bit) {
    const double frac = coeff / step - std::floor(coeff / step);
    if (bit == 1) {
        return frac >= 0.5 ? std::min(frac - 0.5, 1.0 - frac) : -std::min(0.5 - frac, frac);
    }
    return frac < 0.5 ? std::min(0.5 - frac, frac) : -std::min(frac - 0.5, 1.0 - frac);
}

// Dither point for this bit nearest to the current coefficient.
inline double nearest_target(double coeff, double step, int bit) {
    const double dither = bit ? 0.75 : 0.25;
    const double base = std::floor(coeff / step);
    double best = (base + dither) * step;
    for (const double q : {base - 1.0, base + 1.0}) {
        const double cand = (q + dither) * step;
        if (std::abs(cand - coeff) < std::abs(best - coeff)) best = cand;
    }
    return best;
}

constexpr double kRefineMargin = 0.08;  // required post-quantization margin, in step units

// Steers a block whose stored (integer) pixels decode wrong or too close to
// the boundary: single quantizer-level adjustments, one pixel at a time,
// alternating opposite-sign weights so the block mean stays balanced. Each
// level shift moves the coefficient by exactly w/maxval, so the walk tracks
// the stored coefficient without re-reading the block. Sparse level flips
// cost far less compressed-size entropy than re-applying the dense QIM
// pattern would.
inline void pixel_level_fix(ImageGray& marked, const CarrierGeometry& g, int bx, int by, double step,
                            int bit, double maxval) {
    std::vector<std::size_t> pos, neg;
    for (std::size_t i = 0; i < g.weight.size(); ++i) {
        (g.weight[i] > 0 ? pos : neg).push_back(i);
    }
    if (pos.empty() || neg.empty()) return;

    const int x0 = bx * g.px, y0 = by * g.py;
    auto bump = [&](std::size_t i, int dir) -> bool {
        const int x = x0 + static_cast<int>(i % g.px);
        const int y = y0 + static_cast<int>(i / g.px);
        const double v = marked.at(x, y);
        if (v < 0.0 || v > 1.0) return false;  // clamped pixels no longer track level shifts
        const double lvl = std::floor(v * maxval + 0.5);
        if (lvl + dir < 0.0 || lvl + dir > maxval) return false;
        marked.at(x, y) += dir / maxval;
        return true;
    };

    double coeff = carrier_coefficient(marked, g, bx, by, maxval);
    const double target = nearest_target(coeff, step, bit);

    std::size_t pi = 0, ni = 0;
    for (int iter = 0; iter < 512; ++iter) {
        if (decode_margin(coeff, step, bit) >= kRefineMargin) return;
        const int dir = target > coeff ? 1 : -1;
        bool moved = false;
        if (iter % 2 == 0) {
            for (std::size_t k = 0; k < pos.size() && !moved; ++k) {
                const std::size_t i = pos[pi++ % pos.size()];
                moved = bump(i, dir);
                if (moved) coeff += dir * g.weight[i] / maxval;
            }
        } else {
            for (std::size_t k = 0; k < neg.size() && !moved; ++k) {
                const std::size_t i = neg[ni++ % neg.size()];
                moved = bump(i, -dir);
                if (moved) coeff += -dir * g.weight[i] / maxval;
            }
        }
        if (!moved) return;  // saturated block; the vote majority absorbs it
    }
}

}  // namespace medmark::detail

#include "medmark/reference.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include "watermark_detail.hpp"

namespace medmark::reference {

std::vector<double> dct2_forward_direct(const std::vector<double>& block, int n) {
    std::vector<double> out(static_cast<std::size_t>(n) * n, 0.0);
    const double a0 = std::sqrt(1.0 / n);
    const double ak = std::sqrt(2.0 / n);
    for (int ku = 0; ku < n; ++ku) {
        for (int kv = 0; kv < n; ++kv) {
            double s = 0.0;
            for (int y = 0; y < n; ++y) {
                for (int x = 0; x < n; ++x) {
                    s += block[static_cast<std::size_t>(y) * n + x] *
                         std::cos(std::numbers::pi * (2 * y + 1) * ku / (2.0 * n)) *
                         std::cos(std::numbers::pi * (2 * x + 1) * kv / (2.0 * n));
                }
            }
            out[static_cast<std::size_t>(ku) * n + kv] = (ku == 0 ? a0 : ak) * (kv == 0 ? a0 : ak) * s;
        }
    }
    return out;
}

std::vector<double> dct2_inverse_direct(const std::vector<double>& coeffs, int n) {
    std::vector<double> out(static_cast<std::size_t>(n) * n, 0.0);
    const double a0 = std::sqrt(1.0 / n);
    const double ak = std::sqrt(2.0 / n);
    for (int y = 0; y < n; ++y) {
        for (int x = 0; x < n; ++x) {
            double s = 0.0;
            for (int ku = 0; ku < n; ++ku) {
                for (int kv = 0; kv < n; ++kv) {
                    s += (ku == 0 ? a0 : ak) * (kv == 0 ? a0 : ak) *
                         coeffs[static_cast<std::size_t>(ku) * n + kv] *
                         std::cos(std::numbers::pi * (2 * y + 1) * ku / (2.0 * n)) *
                         std::cos(std::numbers::pi * (2 * x + 1) * kv / (2.0 * n));
                }
            }
            out[static_cast<std::size_t>(y) * n + x] = s;
        }
    }
    return out;
}

SubbandDecomposition dwt_haar_forward_serial(const ImageGray& img) {
    const int hw = (img.width + 1) / 2;
    const int hh = (img.height + 1) / 2;

    SubbandDecomposition sub;
    sub.original_width = img.width;
    sub.original_height = img.height;
    sub.ll = Plane(hw, hh);
    sub.lh = Plane(hw, hh);
    sub.hl = Plane(hw, hh);
    sub.hh = Plane(hw, hh);

    auto sample = [&](int x, int y) {
        return img.at(std::min(x, img.width - 1), std::min(y, img.height - 1));
    };
    for (int by = 0; by < hh; ++by) {
        for (int bx = 0; bx < hw; ++bx) {
            const double a = sample(2 * bx, 2 * by);
            const double b = sample(2 * bx + 1, 2 * by);
            const double c = sample(2 * bx, 2 * by + 1);
            const double d = sample(2 * bx + 1, 2 * by + 1);
            sub.ll.at(bx, by) = (a + b + c + d) * 0.5;
            sub.hl.at(bx, by) = (a - b + c - d) * 0.5;
            sub.lh.at(bx, by) = (a + b - c - d) * 0.5;
            sub.hh.at(bx, by) = (a - b - c + d) * 0.5;
        }
    }
    return sub;
}

ImageGray dwt_haar_inverse_serial(const SubbandDecomposition& sub) {
    ImageGray out(sub.original_width, sub.original_height);
    for (int by = 0; by < sub.ll.height; ++by) {
        for (int bx = 0; bx < sub.ll.width; ++bx) {
            const double s = sub.ll.at(bx, by);
            const double h = sub.hl.at(bx, by);
            const double v = sub.lh.at(bx, by);
            const double dd = sub.hh.at(bx, by);
            const double vals[4] = {
                (s + h + v + dd) * 0.5, (s - h + v - dd) * 0.5,
                (s + h - v - dd) * 0.5, (s - h - v + dd) * 0.5,
            };
            const int x = 2 * bx, y = 2 * by;
            out.at(x, y) = vals[0];
            if (x + 1 < out.width) out.at(x + 1, y) = vals[1];
            if (y + 1 < out.height) out.at(x, y + 1) = vals[2];
            if (x + 1 < out.width && y + 1 < out.height) out.at(x + 1, y + 1) = vals[3];
        }
    }
    return out;
}

ImageGray embed_serial(const ImageGray& img, const WatermarkPayload& payload, const EmbedConfig& cfg) {
    cfg.validate();
    if (payload.bits.empty()) throw ArgumentError("payload has no bits");

    SubbandDecomposition sub = dwt_haar_forward_serial(img);
    Plane& plane = subband_plane(sub, cfg.subband);
    const int bs = cfg.block_size;
    const int bw = plane.width / bs;
    const int bh = plane.height / bs;
    const std::size_t capacity = static_cast<std::size_t>(std::max(bw, 0)) * std::max(bh, 0);
    if (capacity < payload.bits.size()) throw CapacityError(capacity, payload.bits.size());

    // same per-block arithmetic as the parallel kernel; only the scheduling
    // differs, so results must match bit for bit
    const Dct2 dct(bs);
    std::vector<std::uint8_t> block_bit(capacity);
    std::vector<double> block(static_cast<std::size_t>(bs) * bs);
    std::vector<double> coeffs(block.size());
    for (std::size_t i = 0; i < capacity; ++i) {
        const int bx = static_cast<int>(i % bw);
        const int by = static_cast<int>(i / bw);
        for (int y = 0; y < bs; ++y) {
            for (int x = 0; x < bs; ++x) block[static_cast<std::size_t>(y) * bs + x] = plane.at(bx * bs + x, by * bs + y);
        }
        dct.forward(block.data(), coeffs.data());
        const std::size_t ci = static_cast<std::size_t>(cfg.coeff_row) * bs + cfg.coeff_col;
        const int bit = payload.bits[i % payload.bits.size()];
        block_bit[i] = static_cast<std::uint8_t>(bit);
        coeffs[ci] = qim_quantize(coeffs[ci], cfg.quant_step, bit);
        dct.inverse(coeffs.data(), block.data());
        for (int y = 0; y < bs; ++y) {
            for (int x = 0; x < bs; ++x) plane.at(bx * bs + x, by * bs + y) = block[static_cast<std::size_t>(y) * bs + x];
        }
    }

    ImageGray out = dwt_haar_inverse_serial(sub);

    // serial twin of the quantization refinement in embed()
    const double maxval = img.source_bit_depth == 16 ? 65535.0 : 255.0;
    const detail::CarrierGeometry g = detail::carrier_geometry(cfg);
    const double s = cfg.quant_step;
    for (std::size_t i = 0; i < capacity; ++i) {
        const int bx = static_cast<int>(i % bw);
        const int by = static_cast<int>(i / bw);
        if ((bx + 1) * g.px > out.width || (by + 1) * g.py > out.height) continue;
        const double coeff = detail::carrier_coefficient(out, g, bx, by, maxval);
        if (detail::decode_margin(coeff, s, block_bit[i]) < detail::kRefineMargin) {
            detail::pixel_level_fix(out, g, bx, by, s, block_bit[i], maxval);
        }
    }

    out.clamp01();
    out.source_bit_depth = img.source_bit_depth;
    return out;
}

std::vector<double> nearest_neighbor_distances_serial(const FeatureSet& queries, const FeatureSet& base,
                                                      bool exclude_self) {
    std::vector<double> out(queries.n);
    for (std::size_t i = 0; i < queries.n; ++i) {
        double best = std::numeric_limits<double>::infinity();
        for (std::size_t j = 0; j < base.n; ++j) {
            if (exclude_self && j == i) continue;
            double acc = 0.0;
            for (std::size_t k = 0; k < queries.d; ++k) {
                const double diff = queries.row(i)[k] - base.row(j)[k];
                acc += diff * diff;
            }
            best = std::min(best, acc);
        }
        out[i] = std::sqrt(best);
    }
    return out;
}

}  // namespace medmark::reference

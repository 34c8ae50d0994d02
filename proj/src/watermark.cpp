#include "medmark/watermark.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <limits>

#include "watermark_detail.hpp"

namespace medmark {

namespace {

bool is_valid_utf8(const std::string& s) {
    std::size_t i = 0;
    const auto* b = reinterpret_cast<const unsigned char*>(s.data());
    const std::size_t n = s.size();
    while (i < n) {
        const unsigned char c = b[i];
        std::size_t len;
        unsigned char lo = 0x80, hi = 0xBF;
        if (c <= 0x7F) { i += 1; continue; }
        else if (c >= 0xC2 && c <= 0xDF) len = 2;
        else if (c == 0xE0) { len = 3; lo = 0xA0; }
        else if (c >= 0xE1 && c <= 0xEC) len = 3;
        else if (c == 0xED) { len = 3; hi = 0x9F; }
        else if (c >= 0xEE && c <= 0xEF) len = 3;
        else if (c == 0xF0) { len = 4; lo = 0x90; }
        else if (c >= 0xF1 && c <= 0xF3) len = 4;
        else if (c == 0xF4) { len = 4; hi = 0x8F; }
        else return false;
        if (i + len > n) return false;
        if (b[i + 1] < lo || b[i + 1] > hi) return false;
        for (std::size_t k = 2; k < len; ++k) {
            if (b[i + k] < 0x80 || b[i + k] > 0xBF) return false;
        }
        i += len;
    }
    return true;
}

// Per-block vote tallies at each payload bit position.
struct VoteTally {
    std::vector<std::uint32_t> ones;
    std::vector<std::uint32_t> total;

    explicit VoteTally(std::size_t positions) : ones(positions, 0), total(positions, 0) {}

    std::uint8_t majority(std::size_t p) const {
        // tie goes to 1
        return 2 * ones[p] >= total[p] ? 1 : 0;
    }
};

VoteTally tally_votes(const std::vector<std::uint8_t>& block_bits, std::size_t bit_length) {
    VoteTally t(bit_length);
    for (std::size_t i = 0; i < block_bits.size(); ++i) {
        const std::size_t p = i % bit_length;
        t.ones[p] += block_bits[i];
        t.total[p] += 1;
    }
    return t;
}

double vote_agreement(const VoteTally& t) {
    std::uint64_t agree = 0, total = 0;
    for (std::size_t p = 0; p < t.total.size(); ++p) {
        agree += std::max<std::uint64_t>(t.ones[p], t.total[p] - t.ones[p]);
        total += t.total[p];
    }
    return total == 0 ? 0.0 : static_cast<double>(agree) / static_cast<double>(total);
}

int min_votes(const VoteTally& t) {
    std::uint32_t m = t.total.empty() ? 0 : *std::min_element(t.total.begin(), t.total.end());
    return static_cast<int>(m);
}

std::vector<std::uint8_t> majority_bits(const VoteTally& t) {
    std::vector<std::uint8_t> bits(t.total.size());
    for (std::size_t p = 0; p < bits.size(); ++p) bits[p] = t.majority(p);
    return bits;
}

// Reads the raw QIM bit of every full block of the chosen subband, row-major.
std::vector<std::uint8_t> read_block_bits(const ImageGray& img, const EmbedConfig& cfg) {
    cfg.validate();
    const SubbandDecomposition sub = dwt_haar_forward(img);
    const Plane& plane = subband_plane(sub, cfg.subband);
    const int bs = cfg.block_size;
    const int bw = plane.width / bs;
    const int bh = plane.height / bs;
    if (bw <= 0 || bh <= 0) throw ArgumentError("image too small for one carrier block");

    const Dct2 dct(bs);
    const std::size_t nblocks = static_cast<std::size_t>(bw) * bh;
    std::vector<std::uint8_t> bits(nblocks);
    const double s = cfg.quant_step;

#pragma omp parallel
    {
        std::vector<double> block(static_cast<std::size_t>(bs) * bs);
        std::vector<double> coeffs(block.size());
#pragma omp for schedule(static)
        for (long long i = 0; i < static_cast<long long>(nblocks); ++i) {
            const int bx = static_cast<int>(i % bw);
            const int by = static_cast<int>(i / bw);
            for (int y = 0; y < bs; ++y) {
                for (int x = 0; x < bs; ++x) {
                    block[static_cast<std::size_t>(y) * bs + x] = plane.at(bx * bs + x, by * bs + y);
                }
            }
            dct.forward(block.data(), coeffs.data());
            const double c = coeffs[static_cast<std::size_t>(cfg.coeff_row) * bs + cfg.coeff_col];
            const double frac = c / s - std::floor(c / s);
            bits[static_cast<std::size_t>(i)] = frac >= 0.5 ? 1 : 0;
        }
    }
    return bits;
}

std::optional<std::string> decode_from_tally(const VoteTally& t) {
    return decode_payload(majority_bits(t));
}

// The plain QIM pipeline moves each carrier coefficient onto its dither
// lattice, but the per-pixel perturbation can be smaller than half an 8-bit
// quantization level. Round-half-up on save then erases or distorts it (the
// default carrier basis has uniform magnitude, so a whole block rounds in
// lockstep) and a reloaded image can decode wrong bits. This pass checks
// every block against the image quantized at its storage depth and steers
// failing blocks back into the decode window one pixel level at a time.
void refine_against_quantization(ImageGray& marked, const EmbedConfig& cfg,
                                 const std::vector<std::uint8_t>& block_bit, int bw, int bh,
                                 int bit_depth) {
    const double maxval = bit_depth == 16 ? 65535.0 : 255.0;
    const detail::CarrierGeometry g = detail::carrier_geometry(cfg);
    const double s = cfg.quant_step;
    const auto total = static_cast<long long>(block_bit.size());

    // blocks whose pixel footprint spills past the (padded) image edge keep
    // the plain pipeline; their votes ride on the majority
    auto in_bounds = [&](long long i) {
        const int bx = static_cast<int>(i % bw);
        const int by = static_cast<int>(i / bw);
        return (bx + 1) * g.px <= marked.width && (by + 1) * g.py <= marked.height;
    };

#pragma omp parallel for schedule(static)
    for (long long i = 0; i < total; ++i) {
        if (!in_bounds(i)) continue;
        const int bx = static_cast<int>(i % bw);
        const int by = static_cast<int>(i / bw);
        const double coeff = detail::carrier_coefficient(marked, g, bx, by, maxval);
        if (detail::decode_margin(coeff, s, block_bit[static_cast<std::size_t>(i)]) < detail::kRefineMargin) {
            detail::pixel_level_fix(marked, g, bx, by, s, block_bit[static_cast<std::size_t>(i)], maxval);
        }
    }
    (void)bh;
}

}  // namespace

std::vector<uint8_t> encode_payload(const std::string& text) {
    if (text.size() > 65535) throw ArgumentError("payload text exceeds 65535 bytes");
    std::vector<uint8_t> bits;
    bits.reserve(16 + 8 * text.size());
    const std::size_t len = text.size();
    for (int i = 15; i >= 0; --i) bits.push_back(static_cast<uint8_t>((len >> i) & 1));
    for (unsigned char byte : text) {
        for (int i = 7; i >= 0; --i) bits.push_back(static_cast<uint8_t>((byte >> i) & 1));
    }
    return bits;
}

std::optional<std::string> decode_payload(const std::vector<uint8_t>& bits) {
    if (bits.size() < 16 || (bits.size() - 16) % 8 != 0) return std::nullopt;
    std::size_t header = 0;
    for (int i = 0; i < 16; ++i) header = (header << 1) | (bits[i] & 1);
    if (header != (bits.size() - 16) / 8) return std::nullopt;
    std::string text(header, '\0');
    for (std::size_t b = 0; b < header; ++b) {
        unsigned char byte = 0;
        for (int i = 0; i < 8; ++i) byte = static_cast<unsigned char>((byte << 1) | (bits[16 + 8 * b + i] & 1));
        text[b] = static_cast<char>(byte);
    }
    if (!is_valid_utf8(text)) return std::nullopt;
    return text;
}

WatermarkPayload WatermarkPayload::from_text(const std::string& text) {
    WatermarkPayload p;
    p.text = text;
    p.bits = encode_payload(text);
    return p;
}

void EmbedConfig::validate() const {
    if (block_size < 2) throw ArgumentError("block size must be at least 2");
    if (quant_step <= 0.0) throw ArgumentError("quantization step must be positive");
    if (coeff_row < 0 || coeff_row >= block_size || coeff_col < 0 || coeff_col >= block_size) {
        throw ArgumentError("carrier coefficient outside block");
    }
    if (coeff_row == 0 && coeff_col == 0) throw ArgumentError("carrier must not be the DC coefficient");
}

std::size_t watermark_capacity(int width, int height, const EmbedConfig& cfg) {
    cfg.validate();
    const int hw = (width + 1) / 2;
    const int hh = (height + 1) / 2;
    return static_cast<std::size_t>(hw / cfg.block_size) * static_cast<std::size_t>(hh / cfg.block_size);
}

double qim_quantize(double coeff, double step, int bit) {
    const double q = std::floor(coeff / step);
    return (q + (bit ? 0.75 : 0.25)) * step;
}

ImageGray embed(const ImageGray& img, const WatermarkPayload& payload, const EmbedConfig& cfg) {
    cfg.validate();
    if (payload.bits.empty()) throw ArgumentError("payload has no bits");

    SubbandDecomposition sub = dwt_haar_forward(img);
    Plane& plane = subband_plane(sub, cfg.subband);
    const int bs = cfg.block_size;
    const int bw = plane.width / bs;
    const int bh = plane.height / bs;
    const std::size_t capacity = static_cast<std::size_t>(std::max(bw, 0)) * std::max(bh, 0);
    if (capacity < payload.bits.size()) throw CapacityError(capacity, payload.bits.size());

    const Dct2 dct(bs);
    const std::size_t coeff_idx = static_cast<std::size_t>(cfg.coeff_row) * bs + cfg.coeff_col;
    const std::size_t bit_count = payload.bits.size();
    std::vector<std::uint8_t> block_bit(capacity);

#pragma omp parallel
    {
        std::vector<double> block(static_cast<std::size_t>(bs) * bs);
        std::vector<double> coeffs(block.size());
#pragma omp for schedule(static)
        for (long long i = 0; i < static_cast<long long>(capacity); ++i) {
            const int bx = static_cast<int>(i % bw);
            const int by = static_cast<int>(i / bw);
            for (int y = 0; y < bs; ++y) {
                for (int x = 0; x < bs; ++x) {
                    block[static_cast<std::size_t>(y) * bs + x] = plane.at(bx * bs + x, by * bs + y);
                }
            }
            dct.forward(block.data(), coeffs.data());

            const int bit = payload.bits[static_cast<std::size_t>(i) % bit_count];
            block_bit[static_cast<std::size_t>(i)] = static_cast<std::uint8_t>(bit);
            coeffs[coeff_idx] = qim_quantize(coeffs[coeff_idx], cfg.quant_step, bit);

            dct.inverse(coeffs.data(), block.data());
            for (int y = 0; y < bs; ++y) {
                for (int x = 0; x < bs; ++x) {
                    plane.at(bx * bs + x, by * bs + y) = block[static_cast<std::size_t>(y) * bs + x];
                }
            }
        }
    }

    ImageGray out = dwt_haar_inverse(sub);
    refine_against_quantization(out, cfg, block_bit, bw, bh, img.source_bit_depth);
    out.clamp01();
    out.source_bit_depth = img.source_bit_depth;
    return out;
}

DetectionResult extract(const ImageGray& img, const EmbedConfig& cfg,
                        std::optional<std::size_t> payload_bit_length, double threshold) {
    const std::vector<std::uint8_t> block_bits = read_block_bits(img, cfg);
    const std::size_t capacity = block_bits.size();

    DetectionResult res;
    if (payload_bit_length) {
        const std::size_t bit_len = *payload_bit_length;
        if (bit_len < 16 || bit_len > capacity) return res;  // nothing decodable at this length
        const VoteTally t = tally_votes(block_bits, bit_len);
        res.decoded_text = decode_from_tally(t);
        res.bit_accuracy = vote_agreement(t);
        res.votes_per_bit = min_votes(t);
        res.detected = res.decoded_text.has_value() && res.bit_accuracy >= threshold;
        return res;
    }

    // Length unknown: candidate lengths 16+8k; accept the first k whose voted
    // header decodes to k with a valid UTF-8 body.
    const std::size_t max_k = capacity < 16 ? 0 : std::min<std::size_t>(1024, (capacity - 16) / 8);
    for (std::size_t k = 0; capacity >= 16 && k <= max_k; ++k) {
        const std::size_t bit_len = 16 + 8 * k;
        if (bit_len > capacity) break;
        const VoteTally t = tally_votes(block_bits, bit_len);
        std::size_t header = 0;
        for (int i = 0; i < 16; ++i) header = (header << 1) | t.majority(i);
        if (header != k) continue;
        auto text = decode_from_tally(t);
        if (!text) continue;
        res.decoded_text = std::move(text);
        res.bit_accuracy = vote_agreement(t);
        res.votes_per_bit = min_votes(t);
        res.detected = res.bit_accuracy >= threshold;
        return res;
    }
    return res;  // no consistent header: failure result, not an error
}

DetectionResult detect(const ImageGray& img, const WatermarkPayload& expected,
                       const EmbedConfig& cfg, double threshold) {
    const std::vector<std::uint8_t> block_bits = read_block_bits(img, cfg);
    const std::size_t bit_len = expected.bits.size();
    if (bit_len == 0) throw ArgumentError("expected payload has no bits");

    DetectionResult res;
    if (bit_len > block_bits.size()) {
        // unvoted positions count as mismatches
        res.detected = res.bit_accuracy >= threshold;
        return res;
    }
    const VoteTally t = tally_votes(block_bits, bit_len);
    std::size_t matches = 0;
    for (std::size_t p = 0; p < bit_len; ++p) {
        if (t.majority(p) == expected.bits[p]) ++matches;
    }
    res.bit_accuracy = static_cast<double>(matches) / static_cast<double>(bit_len);
    res.decoded_text = decode_from_tally(t);
    res.votes_per_bit = min_votes(t);
    res.detected = res.bit_accuracy >= threshold;
    return res;
}

ImageGray residual(const ImageGray& original, const ImageGray& watermarked) {
    if (original.width != watermarked.width || original.height != watermarked.height) {
        throw ArgumentError("residual inputs have mismatched dimensions");
    }
    ImageGray out(original.width, original.height, 0.0, original.source_bit_depth);
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < out.pixel_count(); ++i) {
        const double d = watermarked.pixels[i] - original.pixels[i];
        out.pixels[i] = d;
        lo = std::min(lo, d);
        hi = std::max(hi, d);
    }
    if (hi == lo) {
        std::fill(out.pixels.begin(), out.pixels.end(), 0.5);
    } else {
        const double span = hi - lo;
        for (double& p : out.pixels) p = (p - lo) / span;
    }
    return out;
}

}  // namespace medmark

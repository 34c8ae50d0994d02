#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "medmark/image.hpp"
#include "medmark/transforms.hpp"

namespace medmark {

// Text payload and its bit encoding: a 16-bit big-endian byte-length header
// followed by the UTF-8 bytes, most-significant bit first.
struct WatermarkPayload {
    std::string text;
    std::vector<uint8_t> bits;

    static WatermarkPayload from_text(const std::string& text);
};

// encode: header + body layout above; text must be at most 65535 bytes.
std::vector<uint8_t> encode_payload(const std::string& text);

// decode: returns nullopt when the header length disagrees with the bit
// count or the body is not valid UTF-8.
std::optional<std::string> decode_payload(const std::vector<uint8_t>& bits);

struct EmbedConfig {
    int block_size = 4;          // DCT block edge in the chosen subband
    int coeff_row = 2;           // carrier coefficient, never (0,0)
    int coeff_col = 2;
    double quant_step = 0.036;   // QIM step; 9/255 after [0,1] scaling
    Subband subband = Subband::LL;

    void validate() const;
};

struct DetectionResult {
    std::optional<std::string> decoded_text;
    double bit_accuracy = 0.0;   // see extract()/detect() for the scoring rule
    bool detected = false;       // bit_accuracy >= threshold
    int votes_per_bit = 0;       // minimum repetition count over positions
};

// Number of embeddable bits: one per full block_size x block_size block of
// the chosen subband plane.
std::size_t watermark_capacity(int width, int height, const EmbedConfig& cfg = {});

// The QIM rule: with q = floor(coeff/step), bit 0 -> (q+0.25)*step and
// bit 1 -> (q+0.75)*step.
double qim_quantize(double coeff, double step, int bit);

// DWT -> blockwise DCT -> QIM on the carrier coefficient -> inverse chain,
// clamped to [0,1]. Payload bits are assigned cyclically, block index mod
// payload length, so each bit is repeated floor or ceil of capacity/length
// times. The QIM step is then re-applied against the image quantized at its
// source bit depth until every block also decodes correctly after a
// save/load round trip. Throws CapacityError when the payload does not fit.
ImageGray embed(const ImageGray& img, const WatermarkPayload& payload, const EmbedConfig& cfg = {});

// Blind extraction: recomputes the transform chain and reads one bit per
// block (1 iff frac(c/s) >= 0.5), then majority-votes per payload position.
// When payload_bit_length is known the decoded text comes straight from the
// votes; otherwise candidate lengths 16+8k, k=0..1024, are tried and the
// first whose voted header equals k (and whose body is valid UTF-8) wins.
// bit_accuracy here is the vote agreement rate: the fraction of block votes
// that match their position's majority bit. An inconsistent header yields a
// failure result (no text, detected=false), not an error.
DetectionResult extract(const ImageGray& img, const EmbedConfig& cfg = {},
                        std::optional<std::size_t> payload_bit_length = std::nullopt,
                        double threshold = 0.95);

// Known-payload verification: bit_accuracy is the fraction of payload
// positions whose majority-voted bit equals the expected bit.
DetectionResult detect(const ImageGray& img, const WatermarkPayload& expected,
                       const EmbedConfig& cfg = {}, double threshold = 0.95);

// Min-max normalized difference (watermarked - original); a zero difference
// maps to a constant 0.5 image.
ImageGray residual(const ImageGray& original, const ImageGray& watermarked);

}  // namespace medmark

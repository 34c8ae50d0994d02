#pragma once

#include <string>
#include <vector>

#include "medmark/image.hpp"

namespace medmark {

// n x d row-major feature matrix with one source id per row.
struct FeatureSet {
    std::size_t n = 0;
    std::size_t d = 0;
    std::vector<double> values;    // n * d
    std::vector<std::string> ids;  // n

    const double* row(std::size_t i) const { return values.data() + i * d; }
    double* row(std::size_t i) { return values.data() + i * d; }

    void validate() const;
};

// Deterministic stand-in feature extractor: a g x g grid of block means
// concatenated with a 32-bin intensity histogram normalized to sum 1.
// out_dim must be g^2 + 32 for some integer g >= 1 (default 16^2+32 = 288)
// and the image must be at least g x g.
std::vector<double> extract_features_builtin(const ImageGray& img, std::size_t out_dim = 288);

// MDMKFEAT v1 container: magic "MDMKFEAT", version byte 1, n and d as
// little-endian u32, n*d little-endian f64 row-major, then n ids each
// prefixed with a little-endian u32 byte length. Round-trips bit-exactly.
void write_features(const FeatureSet& fs, const std::string& path);
FeatureSet read_features(const std::string& path);

}  // namespace medmark

#pragma once

#include <optional>
#include <string>
#include <vector>

#include "medmark/image.hpp"

namespace medmark {

struct ManifestEntry {
    std::string path;  // relative to the manifest root
    std::optional<std::string> label;
};

// Deterministic listing of a dataset tree: entries sorted lexicographically
// by relative path, no duplicates.
struct DatasetManifest {
    std::string root;
    std::vector<ManifestEntry> entries;

    std::string full_path(std::size_t i) const;
};

// Decodes PNG (8/16-bit, grayscale or RGB) or PGM (P2/P5). RGB is converted
// to luma with BT.601 weights; samples are scaled to [0,1] by 2^depth - 1
// and clamped.
ImageGray load_image(const std::string& path);

// Quantizes with round-half-up to the requested depth and writes PNG or PGM
// (chosen by extension, PNG by default). Round-trips with load_image up to
// one quantization step.
void save_image(const ImageGray& img, const std::string& path, int bit_depth = 8);

// Bilinear resampling with half-pixel-centered coordinates. Constant images
// stay exactly constant and outputs never leave [min(input), max(input)].
ImageGray resize_bilinear(const ImageGray& img, int new_width, int new_height);

// Recursively enumerates supported images under root, sorted by relative
// path. When label_from_subdir is set, the first-level directory name is the
// class label.
DatasetManifest scan_dataset(const std::string& root, bool label_from_subdir = false);

// Manifest <-> JSON: {"root": str, "entries": [{"path": str, "label": str|null}]}
std::string manifest_to_json(const DatasetManifest& m);
DatasetManifest manifest_from_json(const std::string& json_text);

}  // namespace medmark

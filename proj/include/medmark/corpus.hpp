#pragma once

#include <cstdint>
#include <string>

#include "medmark/image.hpp"

namespace medmark {

// Procedural 512x512 grayscale phantoms for desk-scale experiments: a smooth
// gradient background, soft-edged ellipse "anatomy", low-frequency filtered
// noise and fine sensor noise, in two pseudo-classes with overlapping but
// distinct parameter ranges. Identical (seed, index, class) always yields an
// identical image; no libc RNG state is involved.
ImageGray gen_corpus_image(std::uint64_t seed, std::uint64_t index, int pseudo_class,
                           int width = 512, int height = 512);

// Writes n images split ceil(n/2)/floor(n/2) into out_dir/classA and
// out_dir/classB as 8-bit PNGs. Byte-identical for identical seeds.
void gen_corpus(const std::string& out_dir, std::uint64_t n, std::uint64_t seed);

}  // namespace medmark

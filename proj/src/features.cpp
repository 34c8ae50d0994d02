#include "medmark/features.hpp"

#include <cmath>
#include <cstring>
#include <fstream>

#include "medmark/errors.hpp"

namespace medmark {

namespace {

constexpr char kMagic[8] = {'M', 'D', 'M', 'K', 'F', 'E', 'A', 'T'};
constexpr uint8_t kVersion = 1;
constexpr std::size_t kHistogramBins = 32;

void write_u32le(std::ostream& out, std::uint32_t v) {
    const unsigned char b[4] = {
        static_cast<unsigned char>(v & 0xFF),
        static_cast<unsigned char>((v >> 8) & 0xFF),
        static_cast<unsigned char>((v >> 16) & 0xFF),
        static_cast<unsigned char>((v >> 24) & 0xFF),
    };
    out.write(reinterpret_cast<const char*>(b), 4);
}

std::uint32_t read_u32le(std::istream& in) {
    unsigned char b[4];
    in.read(reinterpret_cast<char*>(b), 4);
    if (!in) throw FormatError("truncated feature file");
    return static_cast<std::uint32_t>(b[0]) | (static_cast<std::uint32_t>(b[1]) << 8) |
           (static_cast<std::uint32_t>(b[2]) << 16) | (static_cast<std::uint32_t>(b[3]) << 24);
}

void write_f64le(std::ostream& out, double v) {
    std::uint64_t u;
    std::memcpy(&u, &v, 8);
    unsigned char b[8];
    for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>((u >> (8 * i)) & 0xFF);
    out.write(reinterpret_cast<const char*>(b), 8);
}

double read_f64le(std::istream& in) {
    unsigned char b[8];
    in.read(reinterpret_cast<char*>(b), 8);
    if (!in) throw FormatError("truncated feature file");
    std::uint64_t u = 0;
    for (int i = 0; i < 8; ++i) u |= static_cast<std::uint64_t>(b[i]) << (8 * i);
    double v;
    std::memcpy(&v, &u, 8);
    return v;
}

}  // namespace

void FeatureSet::validate() const {
    if (n < 1) throw ArgumentError("feature set must have at least one row");
    if (values.size() != n * d) throw ArgumentError("feature matrix size mismatch");
    if (ids.size() != n) throw ArgumentError("feature id count mismatch");
    for (double v : values) {
        if (!std::isfinite(v)) throw ArgumentError("feature matrix contains non-finite values");
    }
}

std::vector<double> extract_features_builtin(const ImageGray& img, std::size_t out_dim) {
    if (out_dim <= kHistogramBins) throw ArgumentError("feature dimension must exceed 32");
    const std::size_t g2 = out_dim - kHistogramBins;
    const std::size_t g = static_cast<std::size_t>(std::llround(std::sqrt(static_cast<double>(g2))));
    if (g < 1 || g * g != g2) throw ArgumentError("feature dimension must be g*g + 32");
    if (static_cast<std::size_t>(img.width) < g || static_cast<std::size_t>(img.height) < g) {
        throw ArgumentError("image smaller than the feature grid");
    }

    std::vector<double> out(out_dim, 0.0);

    // g x g grid of block means; cell boundaries at floor(i*extent/g)
    const int gi = static_cast<int>(g);
    for (int cy = 0; cy < gi; ++cy) {
        const int y0 = static_cast<int>(static_cast<std::int64_t>(cy) * img.height / gi);
        const int y1 = static_cast<int>(static_cast<std::int64_t>(cy + 1) * img.height / gi);
        for (int cx = 0; cx < gi; ++cx) {
            const int x0 = static_cast<int>(static_cast<std::int64_t>(cx) * img.width / gi);
            const int x1 = static_cast<int>(static_cast<std::int64_t>(cx + 1) * img.width / gi);
            double sum = 0.0;
            for (int y = y0; y < y1; ++y) {
                for (int x = x0; x < x1; ++x) sum += img.at(x, y);
            }
            out[static_cast<std::size_t>(cy) * g + cx] = sum / (static_cast<double>(y1 - y0) * (x1 - x0));
        }
    }

    // 32-bin intensity histogram, normalized to sum 1
    double* hist = out.data() + g2;
    for (double p : img.pixels) {
        int bin = static_cast<int>(p * static_cast<double>(kHistogramBins));
        bin = std::clamp(bin, 0, static_cast<int>(kHistogramBins) - 1);
        hist[bin] += 1.0;
    }
    const double inv = 1.0 / static_cast<double>(img.pixel_count());
    for (std::size_t i = 0; i < kHistogramBins; ++i) hist[i] *= inv;

    return out;
}

void write_features(const FeatureSet& fs, const std::string& path) {
    fs.validate();
    if (fs.n > 0xFFFFFFFFull || fs.d > 0xFFFFFFFFull) throw ArgumentError("feature set too large for format");

    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open for writing: " + path);

    out.write(kMagic, 8);
    out.put(static_cast<char>(kVersion));
    write_u32le(out, static_cast<std::uint32_t>(fs.n));
    write_u32le(out, static_cast<std::uint32_t>(fs.d));
    for (double v : fs.values) write_f64le(out, v);
    for (const std::string& id : fs.ids) {
        write_u32le(out, static_cast<std::uint32_t>(id.size()));
        out.write(id.data(), static_cast<std::streamsize>(id.size()));
    }
    if (!out) throw IoError("write failed: " + path);
}

FeatureSet read_features(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open: " + path);

    char magic[8];
    in.read(magic, 8);
    if (!in || std::memcmp(magic, kMagic, 8) != 0) throw FormatError("not a MDMKFEAT file: " + path);
    const int version = in.get();
    if (version != kVersion) throw FormatError("unsupported MDMKFEAT version in " + path);

    FeatureSet fs;
    fs.n = read_u32le(in);
    fs.d = read_u32le(in);
    if (fs.n < 1) throw FormatError("feature file has no rows: " + path);
    if (fs.d < 1) throw FormatError("feature file has zero dimensionality: " + path);

    fs.values.resize(fs.n * fs.d);
    for (double& v : fs.values) v = read_f64le(in);
    fs.ids.resize(fs.n);
    for (std::string& id : fs.ids) {
        const std::uint32_t len = read_u32le(in);
        id.resize(len);
        in.read(id.data(), len);
        if (!in) throw FormatError("truncated feature file: " + path);
    }
    fs.validate();
    return fs;
}

}  // namespace medmark

#include "medmark/image_io.hpp"

#include <png.h>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

namespace fs = std::filesystem;

namespace medmark {

namespace {

constexpr double kLumaR = 0.299;
constexpr double kLumaG = 0.587;
constexpr double kLumaB = 0.114;

std::string lower_ext(const std::string& path) {
    std::string ext = fs::path(path).extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return ext;
}

bool is_supported_ext(const std::string& path) {
    const std::string ext = lower_ext(path);
    return ext == ".png" || ext == ".pgm";
}

struct FileCloser {
    void operator()(std::FILE* f) const {
        if (f) std::fclose(f);
    }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

// ---- PNG ----------------------------------------------------------------

ImageGray load_png(const std::string& path, std::FILE* f) {
    png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    if (!png) throw IoError("libpng init failed for " + path);
    png_infop info = png_create_info_struct(png);
    if (!info) {
        png_destroy_read_struct(&png, nullptr, nullptr);
        throw IoError("libpng init failed for " + path);
    }

    std::vector<png_byte> data;
    std::vector<png_bytep> rows;
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw FormatError("corrupt PNG: " + path);
    }

    png_init_io(png, f);
    png_read_info(png, info);

    const png_uint_32 width = png_get_image_width(png, info);
    const png_uint_32 height = png_get_image_height(png, info);
    const int depth = png_get_bit_depth(png, info);
    const int color = png_get_color_type(png, info);

    if (depth != 8 && depth != 16) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw FormatError("unsupported PNG bit depth " + std::to_string(depth) + " in " + path);
    }
    if (color != PNG_COLOR_TYPE_GRAY && color != PNG_COLOR_TYPE_RGB) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw FormatError("unsupported PNG color type " + std::to_string(color) + " in " + path +
                          " (grayscale or RGB required)");
    }

    png_set_interlace_handling(png);
    png_read_update_info(png, info);

    const std::size_t rowbytes = png_get_rowbytes(png, info);
    data.resize(rowbytes * height);
    rows.resize(height);
    for (png_uint_32 y = 0; y < height; ++y) rows[y] = data.data() + y * rowbytes;
    png_read_image(png, rows.data());
    png_read_end(png, nullptr);
    png_destroy_read_struct(&png, &info, nullptr);

    const int channels = (color == PNG_COLOR_TYPE_RGB) ? 3 : 1;
    const double maxval = (depth == 16) ? 65535.0 : 255.0;

    ImageGray img(static_cast<int>(width), static_cast<int>(height), 0.0, depth);
    for (png_uint_32 y = 0; y < height; ++y) {
        const png_byte* row = data.data() + y * rowbytes;
        for (png_uint_32 x = 0; x < width; ++x) {
            double samples[3];
            for (int ch = 0; ch < channels; ++ch) {
                const std::size_t idx = (static_cast<std::size_t>(x) * channels + ch) * (depth / 8);
                // PNG stores 16-bit samples big-endian
                samples[ch] = (depth == 16)
                                  ? static_cast<double>((row[idx] << 8) | row[idx + 1])
                                  : static_cast<double>(row[idx]);
            }
            const double v = (channels == 3)
                                 ? kLumaR * samples[0] + kLumaG * samples[1] + kLumaB * samples[2]
                                 : samples[0];
            img.at(static_cast<int>(x), static_cast<int>(y)) = std::clamp(v / maxval, 0.0, 1.0);
        }
    }
    return img;
}

void save_png(const ImageGray& img, const std::string& path, int bit_depth) {
    FilePtr f(std::fopen(path.c_str(), "wb"));
    if (!f) throw IoError("cannot open for writing: " + path);

    png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    if (!png) throw IoError("libpng init failed for " + path);
    png_infop info = png_create_info_struct(png);
    if (!info) {
        png_destroy_write_struct(&png, nullptr);
        throw IoError("libpng init failed for " + path);
    }
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_write_struct(&png, &info);
        throw IoError("PNG write failed: " + path);
    }

    png_init_io(png, f.get());
    // Fixed settings keep outputs byte-identical across runs.
    png_set_compression_level(png, 6);
    png_set_IHDR(png, info, img.width, img.height, bit_depth, PNG_COLOR_TYPE_GRAY,
                 PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
    png_write_info(png, info);

    const double maxval = (bit_depth == 16) ? 65535.0 : 255.0;
    const std::size_t bytes_per_sample = bit_depth / 8;
    std::vector<png_byte> row(static_cast<std::size_t>(img.width) * bytes_per_sample);
    for (int y = 0; y < img.height; ++y) {
        for (int x = 0; x < img.width; ++x) {
            const double q = std::floor(img.at(x, y) * maxval + 0.5);  // round half up
            const long v = std::clamp(static_cast<long>(q), 0L, static_cast<long>(maxval));
            if (bit_depth == 16) {
                row[2 * x] = static_cast<png_byte>((v >> 8) & 0xFF);
                row[2 * x + 1] = static_cast<png_byte>(v & 0xFF);
            } else {
                row[x] = static_cast<png_byte>(v);
            }
        }
        png_write_row(png, row.data());
    }
    png_write_end(png, nullptr);
    png_destroy_write_struct(&png, &info);
}

// ---- PGM ----------------------------------------------------------------

// Reads the next header token, skipping whitespace and '#' comments.
std::string pgm_token(std::istream& in) {
    std::string tok;
    int c;
    while ((c = in.get()) != EOF) {
        if (c == '#') {
            while ((c = in.get()) != EOF && c != '\n') {}
        } else if (!std::isspace(c)) {
            tok.push_back(static_cast<char>(c));
            break;
        }
    }
    while ((c = in.get()) != EOF && !std::isspace(c)) tok.push_back(static_cast<char>(c));
    return tok;
}

ImageGray load_pgm(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open: " + path);

    const std::string magic = pgm_token(in);
    if (magic != "P2" && magic != "P5") throw FormatError("not a PGM file: " + path);

    long width = 0, height = 0, maxval = 0;
    try {
        width = std::stol(pgm_token(in));
        height = std::stol(pgm_token(in));
        maxval = std::stol(pgm_token(in));
    } catch (const std::exception&) {
        throw FormatError("bad PGM header in " + path);
    }
    if (width <= 0 || height <= 0 || maxval <= 0 || maxval > 65535) {
        throw FormatError("bad PGM header in " + path);
    }

    const int depth = maxval <= 255 ? 8 : 16;
    const double scale = depth == 8 ? 255.0 : 65535.0;
    ImageGray img(static_cast<int>(width), static_cast<int>(height), 0.0, depth);

    if (magic == "P2") {
        for (int y = 0; y < img.height; ++y) {
            for (int x = 0; x < img.width; ++x) {
                long v;
                if (!(in >> v)) throw FormatError("truncated PGM data in " + path);
                img.at(x, y) = std::clamp(static_cast<double>(v) / scale, 0.0, 1.0);
            }
        }
    } else {
        // single whitespace already consumed by pgm_token's trailing read
        const std::size_t bps = depth / 8;
        std::vector<unsigned char> row(static_cast<std::size_t>(img.width) * bps);
        for (int y = 0; y < img.height; ++y) {
            in.read(reinterpret_cast<char*>(row.data()), static_cast<std::streamsize>(row.size()));
            if (!in) throw FormatError("truncated PGM data in " + path);
            for (int x = 0; x < img.width; ++x) {
                const long v = depth == 16 ? (row[2 * x] << 8) | row[2 * x + 1] : row[x];
                img.at(x, y) = std::clamp(static_cast<double>(v) / scale, 0.0, 1.0);
            }
        }
    }
    return img;
}

void save_pgm(const ImageGray& img, const std::string& path, int bit_depth) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open for writing: " + path);

    const long maxval = bit_depth == 16 ? 65535 : 255;
    out << "P5\n" << img.width << " " << img.height << "\n" << maxval << "\n";
    const std::size_t bps = bit_depth / 8;
    std::vector<unsigned char> row(static_cast<std::size_t>(img.width) * bps);
    for (int y = 0; y < img.height; ++y) {
        for (int x = 0; x < img.width; ++x) {
            const double q = std::floor(img.at(x, y) * static_cast<double>(maxval) + 0.5);
            const long v = std::clamp(static_cast<long>(q), 0L, maxval);
            if (bit_depth == 16) {
                row[2 * x] = static_cast<unsigned char>((v >> 8) & 0xFF);
                row[2 * x + 1] = static_cast<unsigned char>(v & 0xFF);
            } else {
                row[x] = static_cast<unsigned char>(v);
            }
        }
        out.write(reinterpret_cast<const char*>(row.data()), static_cast<std::streamsize>(row.size()));
    }
    if (!out) throw IoError("write failed: " + path);
}

}  // namespace

std::string DatasetManifest::full_path(std::size_t i) const {
    return (fs::path(root) / entries.at(i).path).string();
}

ImageGray load_image(const std::string& path) {
    FilePtr f(std::fopen(path.c_str(), "rb"));
    if (!f) throw IoError("cannot open: " + path);

    unsigned char sig[8] = {0};
    const std::size_t got = std::fread(sig, 1, sizeof(sig), f.get());
    if (got >= 8 && png_sig_cmp(sig, 0, 8) == 0) {
        std::rewind(f.get());
        return load_png(path, f.get());
    }
    if (got >= 2 && sig[0] == 'P' && (sig[1] == '2' || sig[1] == '5')) {
        f.reset();
        return load_pgm(path);
    }
    throw FormatError("unsupported image format: " + path);
}

void save_image(const ImageGray& img, const std::string& path, int bit_depth) {
    if (bit_depth != 8 && bit_depth != 16) throw ArgumentError("bit depth must be 8 or 16");
    if (img.width <= 0 || img.height <= 0 || img.pixel_count() != static_cast<std::size_t>(img.width) * img.height) {
        throw ArgumentError("invalid image");
    }
    if (lower_ext(path) == ".pgm") {
        save_pgm(img, path, bit_depth);
    } else {
        save_png(img, path, bit_depth);
    }
}

ImageGray resize_bilinear(const ImageGray& img, int new_width, int new_height) {
    if (new_width <= 0 || new_height <= 0) throw ArgumentError("resize dimensions must be positive");
    if (new_width == img.width && new_height == img.height) return img;

    ImageGray out(new_width, new_height, 0.0, img.source_bit_depth);
    const double sx = static_cast<double>(img.width) / new_width;
    const double sy = static_cast<double>(img.height) / new_height;

#pragma omp parallel for schedule(static)
    for (int oy = 0; oy < new_height; ++oy) {
        double fy = (oy + 0.5) * sy - 0.5;
        fy = std::clamp(fy, 0.0, static_cast<double>(img.height - 1));
        const int y0 = static_cast<int>(fy);
        const int y1 = std::min(y0 + 1, img.height - 1);
        const double wy = fy - y0;
        for (int ox = 0; ox < new_width; ++ox) {
            double fx = (ox + 0.5) * sx - 0.5;
            fx = std::clamp(fx, 0.0, static_cast<double>(img.width - 1));
            const int x0 = static_cast<int>(fx);
            const int x1 = std::min(x0 + 1, img.width - 1);
            const double wx = fx - x0;
            // nested lerps keep constants exact and stay inside [min,max]
            const double top = img.at(x0, y0) + wx * (img.at(x1, y0) - img.at(x0, y0));
            const double bot = img.at(x0, y1) + wx * (img.at(x1, y1) - img.at(x0, y1));
            out.at(ox, oy) = top + wy * (bot - top);
        }
    }
    return out;
}

DatasetManifest scan_dataset(const std::string& root, bool label_from_subdir) {
    if (!fs::is_directory(root)) throw IoError("not a directory: " + root);

    DatasetManifest m;
    m.root = root;
    for (const auto& entry : fs::recursive_directory_iterator(root)) {
        if (!entry.is_regular_file()) continue;
        const std::string name = entry.path().filename().string();
        if (!is_supported_ext(name)) continue;
        ManifestEntry e;
        e.path = entry.path().lexically_relative(root).generic_string();
        if (label_from_subdir) {
            const fs::path rel(e.path);
            if (rel.has_parent_path()) e.label = rel.begin()->string();
        }
        m.entries.push_back(std::move(e));
    }
    std::sort(m.entries.begin(), m.entries.end(),
              [](const ManifestEntry& a, const ManifestEntry& b) { return a.path < b.path; });
    return m;
}

std::string manifest_to_json(const DatasetManifest& m) {
    nlohmann::json j;
    j["root"] = m.root;
    j["entries"] = nlohmann::json::array();
    for (const auto& e : m.entries) {
        nlohmann::json je;
        je["path"] = e.path;
        je["label"] = e.label ? nlohmann::json(*e.label) : nlohmann::json(nullptr);
        j["entries"].push_back(je);
    }
    return j.dump(2);
}

DatasetManifest manifest_from_json(const std::string& json_text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(json_text);
    } catch (const nlohmann::json::exception& e) {
        throw FormatError(std::string("bad manifest JSON: ") + e.what());
    }
    DatasetManifest m;
    try {
        m.root = j.at("root").get<std::string>();
        for (const auto& je : j.at("entries")) {
            ManifestEntry e;
            e.path = je.at("path").get<std::string>();
            if (je.contains("label") && !je.at("label").is_null()) {
                e.label = je.at("label").get<std::string>();
            }
            m.entries.push_back(std::move(e));
        }
    } catch (const nlohmann::json::exception& e) {
        throw FormatError(std::string("bad manifest JSON: ") + e.what());
    }
    return m;
}

}  // namespace medmark

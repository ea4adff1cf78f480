#include "parttrack/pgm_io.hpp"

#include <cmath>
#include <cstdint>
#include <fstream>
#include <vector>

namespace parttrack {

namespace {

void write_header(std::ofstream& out, int width, int height, int maxval) {
    out << "P5\n" << width << " " << height << "\n" << maxval << "\n";
}

// Reads one whitespace-delimited token, skipping '#' comment lines.
std::string next_token(std::istream& in) {
    std::string tok;
    int c;
    while ((c = in.get()) != EOF) {
        if (c == '#') {
            while ((c = in.get()) != EOF && c != '\n') {}
            continue;
        }
        if (!std::isspace(c)) {
            tok.push_back(static_cast<char>(c));
            break;
        }
    }
    while ((c = in.get()) != EOF && !std::isspace(c)) tok.push_back(static_cast<char>(c));
    return tok;
}

struct PgmHeader {
    int width = 0;
    int height = 0;
    int maxval = 0;
};

PgmHeader read_header(std::istream& in, const std::string& path) {
    if (next_token(in) != "P5") throw IoError(path + ": not a binary PGM (P5) file");
    PgmHeader h;
    try {
        h.width = std::stoi(next_token(in));
        h.height = std::stoi(next_token(in));
        h.maxval = std::stoi(next_token(in));
    } catch (const std::exception&) {
        throw IoError(path + ": malformed PGM header");
    }
    if (h.width <= 0 || h.height <= 0) throw IoError(path + ": bad PGM dimensions");
    return h;
}

}  // namespace

void write_depth_pgm(const std::string& path, const DepthImage& img) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open for writing: " + path);
    write_header(out, img.width(), img.height(), 65535);
    std::vector<unsigned char> buf;
    buf.reserve(img.data().size() * 2);
    for (float d : img.data()) {
        const auto mm = static_cast<std::uint16_t>(std::lround(d * 1000.0));
        buf.push_back(static_cast<unsigned char>(mm >> 8));
        buf.push_back(static_cast<unsigned char>(mm & 0xff));
    }
    out.write(reinterpret_cast<const char*>(buf.data()), static_cast<std::streamsize>(buf.size()));
    if (!out) throw IoError("write failed: " + path);
}

DepthImage read_depth_pgm(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open: " + path);
    const PgmHeader h = read_header(in, path);
    if (h.maxval != 65535) throw IoError(path + ": depth PGM must have maxval 65535");
    const std::size_t n = static_cast<std::size_t>(h.width) * h.height;
    std::vector<unsigned char> buf(n * 2);
    in.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(buf.size()));
    if (static_cast<std::size_t>(in.gcount()) != buf.size()) {
        throw IoError(path + ": truncated depth raster");
    }
    std::vector<float> depths(n);
    for (std::size_t i = 0; i < n; ++i) {
        const std::uint16_t mm = static_cast<std::uint16_t>((buf[2 * i] << 8) | buf[2 * i + 1]);
        if (mm > 10000) throw IoError(path + ": depth sample beyond 10 m");
        depths[i] = static_cast<float>(mm) / 1000.0f;
    }
    return DepthImage(h.width, h.height, std::move(depths));
}

void write_label_pgm(const std::string& path, const LabelImage& img) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open for writing: " + path);
    write_header(out, img.width(), img.height(), 255);
    out.write(reinterpret_cast<const char*>(img.data().data()),
              static_cast<std::streamsize>(img.data().size()));
    if (!out) throw IoError("write failed: " + path);
}

LabelImage read_label_pgm(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open: " + path);
    const PgmHeader h = read_header(in, path);
    if (h.maxval != 255) throw IoError(path + ": label PGM must have maxval 255");
    const std::size_t n = static_cast<std::size_t>(h.width) * h.height;
    std::vector<std::uint8_t> labels(n);
    in.read(reinterpret_cast<char*>(labels.data()), static_cast<std::streamsize>(n));
    if (static_cast<std::size_t>(in.gcount()) != n) {
        throw IoError(path + ": truncated label raster");
    }
    for (std::uint8_t l : labels) {
        if (l > kPartCount) throw IoError(path + ": label value out of range");
    }
    return LabelImage(h.width, h.height, std::move(labels));
}

}  // namespace parttrack

#include "sureshrink/image.hpp"

#include <cctype>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <sstream>

namespace sureshrink {

void validate_image(const GrayImage& img) {
    if (img.width < 1 || img.height < 1)
        throw std::invalid_argument("image dimensions must be at least 1x1");
    if (img.data.size() != static_cast<size_t>(img.width) * img.height)
        throw std::invalid_argument("image data length does not match width*height");
    for (double v : img.data)
        if (!std::isfinite(v))
            throw std::invalid_argument("image contains non-finite values");
}

namespace {

// Header scanning shared by P5/P2: whitespace separates tokens, and a '#'
// starts a comment that runs to the end of its line.
void skip_space_and_comments(const std::string& buf, size_t& pos) {
    while (pos < buf.size()) {
        unsigned char ch = static_cast<unsigned char>(buf[pos]);
        if (std::isspace(ch)) {
            ++pos;
        } else if (ch == '#') {
            while (pos < buf.size() && buf[pos] != '\n') ++pos;
        } else {
            break;
        }
    }
}

long parse_header_int(const std::string& buf, size_t& pos, const char* what) {
    skip_space_and_comments(buf, pos);
    size_t start = pos;
    long value = 0;
    while (pos < buf.size() && std::isdigit(static_cast<unsigned char>(buf[pos]))) {
        value = value * 10 + (buf[pos] - '0');
        if (value > 1000000000L)
            throw PgmHeaderError(std::string("PGM header field out of range: ") + what);
        ++pos;
    }
    if (pos == start)
        throw PgmHeaderError(std::string("PGM header missing numeric field: ") + what);
    return value;
}

}  // namespace

GrayImage load_pgm(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw PgmIoError("cannot open PGM file for reading: " + path);
    std::ostringstream raw;
    raw << in.rdbuf();
    if (in.bad())
        throw PgmIoError("read failure on PGM file: " + path);
    const std::string buf = raw.str();

    if (buf.size() < 2 || buf[0] != 'P' || (buf[1] != '5' && buf[1] != '2'))
        throw PgmHeaderError("not a P5/P2 PGM file: " + path);
    const bool binary = buf[1] == '5';
    size_t pos = 2;

    const long width = parse_header_int(buf, pos, "width");
    const long height = parse_header_int(buf, pos, "height");
    const long maxval = parse_header_int(buf, pos, "maxval");
    if (width < 1 || height < 1)
        throw PgmHeaderError("PGM dimensions must be positive: " + path);
    if (maxval < 1 || maxval > 255)
        throw PgmMaxvalError("PGM maxval outside (0,255]: " + std::to_string(maxval));

    GrayImage img(static_cast<int>(width), static_cast<int>(height));
    const size_t count = img.size();

    if (binary) {
        // Exactly one whitespace byte separates the header from the payload.
        if (pos >= buf.size() || !std::isspace(static_cast<unsigned char>(buf[pos])))
            throw PgmHeaderError("PGM header not terminated by whitespace: " + path);
        ++pos;
        if (buf.size() - pos < count)
            throw PgmTruncatedError("PGM pixel payload truncated: expected " +
                                    std::to_string(count) + " bytes, got " +
                                    std::to_string(buf.size() - pos));
        for (size_t i = 0; i < count; ++i)
            img.data[i] = static_cast<double>(static_cast<uint8_t>(buf[pos + i]));
    } else {
        for (size_t i = 0; i < count; ++i) {
            skip_space_and_comments(buf, pos);
            if (pos >= buf.size())
                throw PgmTruncatedError("PGM pixel payload truncated: expected " +
                                        std::to_string(count) + " samples, got " +
                                        std::to_string(i));
            if (!std::isdigit(static_cast<unsigned char>(buf[pos])))
                throw PgmValueError("PGM ASCII sample is not a number");
            long v = 0;
            while (pos < buf.size() && std::isdigit(static_cast<unsigned char>(buf[pos]))) {
                v = v * 10 + (buf[pos] - '0');
                if (v > maxval)
                    throw PgmValueError("PGM ASCII sample exceeds maxval: " + std::to_string(v));
                ++pos;
            }
            img.data[i] = static_cast<double>(v);
        }
    }
    return img;
}

void save_pgm(const GrayImage& img, const std::string& path) {
    validate_image(img);
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw PgmIoError("cannot open PGM file for writing: " + path);
    out << "P5\n" << img.width << ' ' << img.height << "\n255\n";
    std::string payload(img.size(), '\0');
    for (size_t i = 0; i < img.size(); ++i) {
        double v = img.data[i];
        if (v < 0.0) v = 0.0;
        if (v > 255.0) v = 255.0;
        payload[i] = static_cast<char>(static_cast<uint8_t>(std::lround(v)));
    }
    out.write(payload.data(), static_cast<std::streamsize>(payload.size()));
    out.flush();
    if (!out)
        throw PgmIoError("write failure on PGM file: " + path);
}

GrayImage pad_symmetric(const GrayImage& img, int margin) {
    validate_image(img);
    if (margin < 0)
        throw std::invalid_argument("pad margin must be non-negative");
    if (margin > 0 && (margin >= img.width || margin >= img.height))
        throw std::invalid_argument(
            "pad margin " + std::to_string(margin) +
            " must be smaller than both image dimensions (" +
            std::to_string(img.width) + "x" + std::to_string(img.height) + ")");
    if (margin == 0)
        return img;

    // Mirror without repeating the edge sample: -1 -> 1, n -> n-2.
    auto reflect = [](int i, int n) {
        if (i < 0) return -i;
        if (i >= n) return 2 * n - 2 - i;
        return i;
    };

    GrayImage out(img.width + 2 * margin, img.height + 2 * margin);
    for (int r = 0; r < out.height; ++r) {
        const int sr = reflect(r - margin, img.height);
        for (int c = 0; c < out.width; ++c)
            out.at(r, c) = img.at(sr, reflect(c - margin, img.width));
    }
    return out;
}

}  // namespace sureshrink

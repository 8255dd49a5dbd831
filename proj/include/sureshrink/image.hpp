#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace sureshrink {

// Row-major grayscale raster. Intensities are stored at full double precision
// (nominal range [0,255]); quantization happens only in save_pgm.
struct GrayImage {
    int width = 0;
    int height = 0;
    std::vector<double> data;

    GrayImage() = default;
    GrayImage(int w, int h, double fill = 0.0)
        : width(w), height(h), data(static_cast<size_t>(w) * h, fill) {}

    double& at(int r, int c) { return data[static_cast<size_t>(r) * width + c]; }
    double at(int r, int c) const { return data[static_cast<size_t>(r) * width + c]; }
    size_t size() const { return data.size(); }
    bool same_size(const GrayImage& o) const { return width == o.width && height == o.height; }
};

// PGM failure categories, each thrown as its own type so callers can tell
// them apart.
struct PgmError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct PgmIoError : PgmError {           // file missing / unreadable / unwritable
    using PgmError::PgmError;
};
struct PgmHeaderError : PgmError {       // bad magic or malformed dimensions
    using PgmError::PgmError;
};
struct PgmMaxvalError : PgmError {       // maxval outside (0, 255]
    using PgmError::PgmError;
};
struct PgmTruncatedError : PgmError {    // pixel payload shorter than width*height
    using PgmError::PgmError;
};
struct PgmValueError : PgmError {        // ASCII sample exceeding maxval
    using PgmError::PgmError;
};

// Reads a P5 (binary) or P2 (ASCII) PGM with maxval <= 255. Comment lines
// starting with '#' inside the header are tolerated. Values are converted
// verbatim (no rescaling).
GrayImage load_pgm(const std::string& path);

// Writes canonical "P5\n<w> <h>\n255\n" + payload. Each intensity is clamped
// to [0,255] and then rounded half-away-from-zero, so outputs are
// bit-reproducible across platforms.
void save_pgm(const GrayImage& img, const std::string& path);

// Mirror extension without edge repetition: index -1 maps to 1, -2 to 2, and
// symmetrically past the far edge. Errors when margin >= the corresponding
// image dimension (the reflection would need to fold more than once).
GrayImage pad_symmetric(const GrayImage& img, int margin);

// Throws std::invalid_argument when the image is empty, has inconsistent
// dimensions, or contains non-finite values.
void validate_image(const GrayImage& img);

}  // namespace sureshrink

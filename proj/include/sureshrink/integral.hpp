#pragma once

#include <vector>

#include "sureshrink/image.hpp"

namespace sureshrink {

// Widest floating type the platform offers; summed-area tables accumulate in
// it so rectangle sums keep ~1e-10 relative accuracy even after the
// cancellation in the 4-corner lookup.
using wide_float = long double;

// Summed-area table over an h x w grid. Entry (r, c) holds the sum of the
// source over [0, r) x [0, c); the first row and column are zero.
class IntegralImage {
public:
    IntegralImage() = default;

    // Single sequential pass; completed tables are immutable and safe to
    // query from many threads at once.
    static IntegralImage build(const double* grid, int rows, int cols, int stride);
    static IntegralImage build(const GrayImage& img);
    static IntegralImage build(const std::vector<double>& grid, int rows, int cols);

    int rows() const { return rows_; }
    int cols() const { return cols_; }

    // Sum of the source over the inclusive rectangle [top..bottom] x
    // [left..right]: 4 lookups, 3 adds/subtracts. Bounds are checked.
    wide_float rect_sum(int top, int left, int bottom, int right) const;

    // Unchecked variant for inner loops that have already clipped their
    // rectangles.
    wide_float rect_sum_unchecked(int top, int left, int bottom, int right) const {
        const size_t w = static_cast<size_t>(cols_) + 1;
        return table_[(static_cast<size_t>(bottom) + 1) * w + right + 1]
             - table_[(static_cast<size_t>(top)) * w + right + 1]
             - table_[(static_cast<size_t>(bottom) + 1) * w + left]
             + table_[(static_cast<size_t>(top)) * w + left];
    }

private:
    int rows_ = 0;
    int cols_ = 0;
    std::vector<wide_float> table_;  // (rows_+1) x (cols_+1)
};

}  // namespace sureshrink

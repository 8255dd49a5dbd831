#include "sureshrink/integral.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace sureshrink {

IntegralImage IntegralImage::build(const double* grid, int rows, int cols, int stride) {
    if (rows < 1 || cols < 1)
        throw std::invalid_argument("integral image source must be non-empty");
    IntegralImage ii;
    ii.rows_ = rows;
    ii.cols_ = cols;
    const size_t w = static_cast<size_t>(cols) + 1;
    ii.table_.assign((static_cast<size_t>(rows) + 1) * w, wide_float(0));
    // entry(r+1, c+1) = entry(r, c+1) + row_prefix(r, 0..c)
    for (int r = 0; r < rows; ++r) {
        const double* src = grid + static_cast<size_t>(r) * stride;
        wide_float row_acc = 0;
        const wide_float* above = &ii.table_[static_cast<size_t>(r) * w];
        wide_float* cur = &ii.table_[(static_cast<size_t>(r) + 1) * w];
        for (int c = 0; c < cols; ++c) {
            if (!std::isfinite(src[c]))
                throw std::invalid_argument("integral image source contains non-finite values");
            row_acc += static_cast<wide_float>(src[c]);
            cur[c + 1] = above[c + 1] + row_acc;
        }
    }
    return ii;
}

IntegralImage IntegralImage::build(const GrayImage& img) {
    return build(img.data.data(), img.height, img.width, img.width);
}

IntegralImage IntegralImage::build(const std::vector<double>& grid, int rows, int cols) {
    if (grid.size() != static_cast<size_t>(rows) * cols)
        throw std::invalid_argument("integral image source size mismatch");
    return build(grid.data(), rows, cols, cols);
}

wide_float IntegralImage::rect_sum(int top, int left, int bottom, int right) const {
    if (top < 0 || left < 0 || top > bottom || left > right || bottom >= rows_ || right >= cols_)
        throw std::out_of_range("rect_sum rectangle [" + std::to_string(top) + "," +
                                std::to_string(left) + "]..[" + std::to_string(bottom) + "," +
                                std::to_string(right) + "] out of range for " +
                                std::to_string(rows_) + "x" + std::to_string(cols_));
    return rect_sum_unchecked(top, left, bottom, right);
}

}  // namespace sureshrink

#include "luxp/image.hpp"

#include "luxp/error.hpp"

#include <cmath>
#include <string>

namespace luxp {

void check_sample(ColorSpace space, double value) {
    if (!std::isfinite(value)) fail_validation("non-finite image sample");
    if (space == ColorSpace::SrgbEncoded && (value < 0.0 || value > 1.0))
        fail_validation("sRGB-encoded sample outside [0,1]: " + std::to_string(value));
    if (space == ColorSpace::Linear && value < 0.0)
        fail_validation("linear sample is negative: " + std::to_string(value));
}

ImageBuffer::ImageBuffer(int width, int height, ColorSpace space)
    : ImageBuffer(width, height, space,
                  std::vector<double>(static_cast<std::size_t>(width > 0 ? width : 0) *
                                      (height > 0 ? height : 0) * channels)) {}

ImageBuffer::ImageBuffer(int width, int height, ColorSpace space, std::vector<double> data)
    : width_(width), height_(height), space_(space), data_(std::move(data)) {
    if (width <= 0 || height <= 0)
        fail_validation("image dimensions must be positive, got " + std::to_string(width) + "x" +
                        std::to_string(height));
    if (data_.size() != pixel_count() * channels)
        fail_validation("image data length " + std::to_string(data_.size()) + " does not match " +
                        std::to_string(width) + "x" + std::to_string(height) + "x3");
    for (double v : data_) check_sample(space_, v);
}

void ImageBuffer::set(int x, int y, int c, double value) {
    check_sample(space_, value);
    data_[index(x, y, c)] = value;
}

} // namespace luxp

#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace luxp {

/// SrgbEncoded samples are display values in [0, 1]; Linear samples are
/// non-negative scene-referred radiance (HDR allowed).
enum class ColorSpace { SrgbEncoded, Linear };

/// Row-major interleaved RGB image of doubles. The constructor enforces the
/// dimension and per-space range invariants, so every live buffer is valid.
class ImageBuffer {
public:
    static constexpr int channels = 3;

    ImageBuffer(int width, int height, ColorSpace space);
    ImageBuffer(int width, int height, ColorSpace space, std::vector<double> data);

    int width() const { return width_; }
    int height() const { return height_; }
    ColorSpace space() const { return space_; }
    std::size_t pixel_count() const { return static_cast<std::size_t>(width_) * height_; }

    std::span<const double> data() const { return data_; }

    double at(int x, int y, int c) const { return data_[index(x, y, c)]; }

    /// Writes one sample after checking it against the space's range.
    void set(int x, int y, int c, double value);

    bool same_shape(const ImageBuffer& other) const {
        return width_ == other.width_ && height_ == other.height_;
    }

    bool operator==(const ImageBuffer& other) const = default;

private:
    std::size_t index(int x, int y, int c) const {
        return (static_cast<std::size_t>(y) * width_ + x) * channels + c;
    }

    int width_;
    int height_;
    ColorSpace space_;
    std::vector<double> data_;
};

/// Throws ValidationError if `value` is not a legal sample for `space`.
void check_sample(ColorSpace space, double value);

} // namespace luxp

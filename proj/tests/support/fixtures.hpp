#pragma once

#include "luxp/image.hpp"
#include "luxp/rng.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace fixture {

/// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
public:
    explicit TempDir(const std::string& tag = "luxp");
    ~TempDir();
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    const std::filesystem::path& path() const { return path_; }
    std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

private:
    std::filesystem::path path_;
};

/// Uniform random sRGB image; with `quantize` every sample is a multiple of 1/255.
luxp::ImageBuffer random_image(int w, int h, luxp::Rng& rng, bool quantize = false);

luxp::ImageBuffer constant_image(int w, int h, double r, double g, double b,
                                 luxp::ColorSpace space = luxp::ColorSpace::SrgbEncoded);

/// Smooth image with texture at several scales, useful for VIF/SSIM.
luxp::ImageBuffer textured_image(int w, int h, luxp::Rng& rng);

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, const std::string& text);

} // namespace fixture

#pragma once

#include "luxp/image.hpp"

#include <filesystem>

namespace luxp {

/// What the caller expects to get back. `Any` accepts whatever the file
/// format implies (PNG is display-encoded, .hdr/.pfm are linear).
enum class SpaceHint { Any, SrgbEncoded, Linear };

/// Loads an 8-bit PNG (gray and palette expanded to RGB, alpha dropped), a
/// Radiance RGBE .hdr file, or a PFM file. Format is detected from content.
ImageBuffer load_image(const std::filesystem::path& path, SpaceHint hint = SpaceHint::Any);

/// SrgbEncoded images are written as 8-bit PNG (round(v*255)); Linear images
/// go to .hdr or .pfm according to the path extension.
void save_image(const std::filesystem::path& path, const ImageBuffer& img);

} // namespace luxp

#include "luxp/image_io.hpp"

#include "luxp/error.hpp"

#include <png.h>

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iterator>
#include <sstream>
#include <string>

namespace luxp {

namespace {

enum class Format { Png, Radiance, Pfm };

std::vector<std::uint8_t> read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail_io("cannot open image " + path.string());
    std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    if (in.bad()) fail_io("error while reading " + path.string());
    return bytes;
}

Format detect(const std::vector<std::uint8_t>& bytes, const std::filesystem::path& path) {
    static constexpr std::array<std::uint8_t, 8> png_sig{0x89, 'P', 'N', 'G', '\r', '\n', 0x1A, '\n'};
    if (bytes.size() >= 8 && std::equal(png_sig.begin(), png_sig.end(), bytes.begin())) return Format::Png;
    if (bytes.size() >= 2 && bytes[0] == '#' && bytes[1] == '?') return Format::Radiance;
    if (bytes.size() >= 2 && bytes[0] == 'P' && (bytes[1] == 'F' || bytes[1] == 'f')) return Format::Pfm;
    fail_validation("unsupported image format: " + path.string());
}

ImageBuffer decode_png(const std::vector<std::uint8_t>& bytes, const std::filesystem::path& path) {
    png_image image;
    std::memset(&image, 0, sizeof image);
    image.version = PNG_IMAGE_VERSION;
    if (!png_image_begin_read_from_memory(&image, bytes.data(), bytes.size()))
        fail_validation("cannot decode PNG " + path.string() + ": " + image.message);
    if (image.format & PNG_FORMAT_FLAG_LINEAR) {
        png_image_free(&image);
        fail_validation("unsupported PNG bit depth (16-bit) in " + path.string() + "; expected 8-bit");
    }
    image.format = PNG_FORMAT_RGBA;
    std::vector<std::uint8_t> rgba(PNG_IMAGE_SIZE(image));
    if (!png_image_finish_read(&image, nullptr, rgba.data(), 0, nullptr))
        fail_validation("cannot decode PNG " + path.string() + ": " + image.message);

    const int w = static_cast<int>(image.width), h = static_cast<int>(image.height);
    std::vector<double> data(static_cast<std::size_t>(w) * h * 3);
    for (std::size_t p = 0; p < static_cast<std::size_t>(w) * h; ++p)
        for (int c = 0; c < 3; ++c) data[p * 3 + c] = rgba[p * 4 + c] / 255.0;
    return ImageBuffer(w, h, ColorSpace::SrgbEncoded, std::move(data));
}

void encode_png(const std::filesystem::path& path, const ImageBuffer& img) {
    std::vector<std::uint8_t> rgb(img.pixel_count() * 3);
    auto src = img.data();
    for (std::size_t i = 0; i < rgb.size(); ++i)
        rgb[i] = static_cast<std::uint8_t>(std::lround(std::clamp(src[i], 0.0, 1.0) * 255.0));
    png_image image;
    std::memset(&image, 0, sizeof image);
    image.version = PNG_IMAGE_VERSION;
    image.width = static_cast<png_uint_32>(img.width());
    image.height = static_cast<png_uint_32>(img.height());
    image.format = PNG_FORMAT_RGB;
    if (!png_image_write_to_file(&image, path.c_str(), 0, rgb.data(), 0, nullptr))
        fail_io("cannot write PNG " + path.string() + ": " + image.message);
}

// --- Radiance RGBE -------------------------------------------------------

struct Cursor {
    const std::vector<std::uint8_t>& bytes;
    std::size_t pos = 0;

    bool at_end() const { return pos >= bytes.size(); }

    std::string line() {
        std::string s;
        while (pos < bytes.size() && bytes[pos] != '\n') s += static_cast<char>(bytes[pos++]);
        if (pos < bytes.size()) ++pos;
        return s;
    }

    std::uint8_t byte() {
        if (pos >= bytes.size()) fail_validation("truncated image data");
        return bytes[pos++];
    }
};

void rgbe_to_float(const std::uint8_t* rgbe, double* out) {
    if (rgbe[3] == 0) {
        out[0] = out[1] = out[2] = 0.0;
        return;
    }
    const double f = std::ldexp(1.0, static_cast<int>(rgbe[3]) - (128 + 8));
    for (int c = 0; c < 3; ++c) out[c] = (rgbe[c] + 0.5) * f;
}

void read_scanline(Cursor& cur, int width, std::uint8_t* line) {
    const bool rle = width >= 8 && width < 0x8000 && cur.pos + 4 <= cur.bytes.size() &&
                     cur.bytes[cur.pos] == 2 && cur.bytes[cur.pos + 1] == 2 && !(cur.bytes[cur.pos + 2] & 0x80);
    if (!rle) {
        for (int i = 0; i < width * 4; ++i) line[i] = cur.byte();
        return;
    }
    cur.byte();
    cur.byte();
    const int encoded_width = (cur.byte() << 8) | cur.byte();
    if (encoded_width != width) fail_validation("Radiance scanline width mismatch");
    for (int c = 0; c < 4; ++c) {
        int x = 0;
        while (x < width) {
            int count = cur.byte();
            if (count > 128) {
                count -= 128;
                if (x + count > width) fail_validation("corrupt Radiance run length");
                const std::uint8_t value = cur.byte();
                for (int i = 0; i < count; ++i) line[(x++) * 4 + c] = value;
            } else {
                if (count == 0 || x + count > width) fail_validation("corrupt Radiance run length");
                for (int i = 0; i < count; ++i) line[(x++) * 4 + c] = cur.byte();
            }
        }
    }
}

ImageBuffer decode_radiance(const std::vector<std::uint8_t>& bytes, const std::filesystem::path& path) {
    Cursor cur{bytes};
    cur.line(); // #?RADIANCE or #?RGBE
    while (true) {
        if (cur.at_end()) fail_validation("Radiance header not terminated in " + path.string());
        std::string l = cur.line();
        if (l.empty()) break;
        if (l.rfind("FORMAT=", 0) == 0 && l != "FORMAT=32-bit_rle_rgbe")
            fail_validation("unsupported Radiance format '" + l + "' in " + path.string());
    }
    std::istringstream res(cur.line());
    std::string ya, xa;
    int h = 0, w = 0;
    res >> ya >> h >> xa >> w;
    if (ya != "-Y" || xa != "+X" || w <= 0 || h <= 0)
        fail_validation("unsupported Radiance resolution line in " + path.string());

    std::vector<double> data(static_cast<std::size_t>(w) * h * 3);
    std::vector<std::uint8_t> line(static_cast<std::size_t>(w) * 4);
    for (int y = 0; y < h; ++y) {
        read_scanline(cur, w, line.data());
        for (int x = 0; x < w; ++x) rgbe_to_float(&line[x * 4], &data[(static_cast<std::size_t>(y) * w + x) * 3]);
    }
    return ImageBuffer(w, h, ColorSpace::Linear, std::move(data));
}

void encode_radiance(const std::filesystem::path& path, const ImageBuffer& img) {
    std::ofstream out(path, std::ios::binary);
    if (!out) fail_io("cannot write " + path.string());
    out << "#?RADIANCE\nFORMAT=32-bit_rle_rgbe\n\n-Y " << img.height() << " +X " << img.width() << "\n";
    auto src = img.data();
    std::vector<char> row(static_cast<std::size_t>(img.width()) * 4);
    for (int y = 0; y < img.height(); ++y) {
        for (int x = 0; x < img.width(); ++x) {
            const double* px = &src[(static_cast<std::size_t>(y) * img.width() + x) * 3];
            const double m = std::max({px[0], px[1], px[2]});
            char* e = &row[static_cast<std::size_t>(x) * 4];
            if (m < 1e-32) {
                e[0] = e[1] = e[2] = e[3] = 0;
                continue;
            }
            int exponent = 0;
            const double scale = std::frexp(m, &exponent) * 256.0 / m;
            for (int c = 0; c < 3; ++c) e[c] = static_cast<char>(static_cast<std::uint8_t>(px[c] * scale));
            e[3] = static_cast<char>(exponent + 128);
        }
        out.write(row.data(), static_cast<std::streamsize>(row.size()));
    }
    if (!out) fail_io("error while writing " + path.string());
}

// --- PFM -------------------------------------------------------------------

std::string pfm_token(Cursor& cur) {
    while (!cur.at_end() && std::isspace(cur.bytes[cur.pos])) ++cur.pos;
    std::string tok;
    while (!cur.at_end() && !std::isspace(cur.bytes[cur.pos])) tok += static_cast<char>(cur.bytes[cur.pos++]);
    return tok;
}

ImageBuffer decode_pfm(const std::vector<std::uint8_t>& bytes, const std::filesystem::path& path) {
    Cursor cur{bytes};
    const std::string magic = pfm_token(cur);
    const int channels = magic == "PF" ? 3 : 1;
    int w = 0, h = 0;
    double scale = 0.0;
    try {
        w = std::stoi(pfm_token(cur));
        h = std::stoi(pfm_token(cur));
        scale = std::stod(pfm_token(cur));
    } catch (const std::exception&) {
        fail_validation("malformed PFM header in " + path.string());
    }
    ++cur.pos; // single whitespace after the scale
    if (w <= 0 || h <= 0 || scale == 0.0) fail_validation("malformed PFM header in " + path.string());
    const bool little = scale < 0.0;
    const std::size_t need = static_cast<std::size_t>(w) * h * channels * 4;
    if (bytes.size() < cur.pos + need) fail_validation("truncated PFM data in " + path.string());

    const bool swap = little != (std::endian::native == std::endian::little);
    std::vector<double> data(static_cast<std::size_t>(w) * h * 3);
    const std::uint8_t* p = bytes.data() + cur.pos;
    for (int row = 0; row < h; ++row) {
        const int y = h - 1 - row; // PFM rows run bottom to top
        for (int x = 0; x < w; ++x) {
            for (int c = 0; c < channels; ++c) {
                std::uint32_t bits;
                std::memcpy(&bits, p, 4);
                p += 4;
                if (swap) bits = __builtin_bswap32(bits);
                float v;
                std::memcpy(&v, &bits, 4);
                if (!std::isfinite(v) || v < 0.0f)
                    fail_validation("PFM sample is negative or non-finite in " + path.string());
                const std::size_t base = (static_cast<std::size_t>(y) * w + x) * 3;
                if (channels == 3)
                    data[base + c] = v;
                else
                    data[base] = data[base + 1] = data[base + 2] = v;
            }
        }
    }
    return ImageBuffer(w, h, ColorSpace::Linear, std::move(data));
}

void encode_pfm(const std::filesystem::path& path, const ImageBuffer& img) {
    static_assert(std::endian::native == std::endian::little, "PFM writer assumes a little-endian host");
    std::ofstream out(path, std::ios::binary);
    if (!out) fail_io("cannot write " + path.string());
    out << "PF\n" << img.width() << " " << img.height() << "\n-1.0\n";
    auto src = img.data();
    for (int y = img.height() - 1; y >= 0; --y) {
        for (int x = 0; x < img.width(); ++x)
            for (int c = 0; c < 3; ++c) {
                const float v = static_cast<float>(src[(static_cast<std::size_t>(y) * img.width() + x) * 3 + c]);
                out.write(reinterpret_cast<const char*>(&v), 4);
            }
    }
    if (!out) fail_io("error while writing " + path.string());
}

std::string lower_extension(const std::filesystem::path& path) {
    std::string ext = path.extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
    return ext;
}

} // namespace

ImageBuffer load_image(const std::filesystem::path& path, SpaceHint hint) {
    const auto bytes = read_file(path);
    const Format format = detect(bytes, path);
    ImageBuffer img = format == Format::Png        ? decode_png(bytes, path)
                      : format == Format::Radiance ? decode_radiance(bytes, path)
                                                   : decode_pfm(bytes, path);
    if (hint == SpaceHint::SrgbEncoded && img.space() != ColorSpace::SrgbEncoded)
        fail_validation(path.string() + " holds linear HDR data but an sRGB image was expected");
    if (hint == SpaceHint::Linear && img.space() != ColorSpace::Linear)
        fail_validation(path.string() + " holds 8-bit display data but a linear image was expected");
    return img;
}

void save_image(const std::filesystem::path& path, const ImageBuffer& img) {
    const std::string ext = lower_extension(path);
    if (img.space() == ColorSpace::SrgbEncoded) {
        if (ext != ".png") fail_validation("sRGB images are written as .png, got " + path.string());
        encode_png(path, img);
        return;
    }
    if (ext == ".hdr")
        encode_radiance(path, img);
    else if (ext == ".pfm")
        encode_pfm(path, img);
    else
        fail_validation("linear images are written as .hdr or .pfm, got " + path.string());
}

} // namespace luxp

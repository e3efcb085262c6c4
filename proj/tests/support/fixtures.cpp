#include "fixtures.hpp"

#include <unistd.h>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <sstream>

namespace fixture {

namespace fs = std::filesystem;

TempDir::TempDir(const std::string& tag) {
    static std::atomic<int> counter{0};
    path_ = fs::temp_directory_path() /
            (tag + "-" + std::to_string(::getpid()) + "-" + std::to_string(counter.fetch_add(1)));
    fs::remove_all(path_);
    fs::create_directories(path_);
}

TempDir::~TempDir() {
    std::error_code ec;
    fs::remove_all(path_, ec);
}

luxp::ImageBuffer random_image(int w, int h, luxp::Rng& rng, bool quantize) {
    std::vector<double> data(static_cast<std::size_t>(w) * h * 3);
    for (double& v : data) v = quantize ? static_cast<double>(luxp::uniform_index(rng, 256)) / 255.0 : luxp::uniform01(rng);
    return {w, h, luxp::ColorSpace::SrgbEncoded, std::move(data)};
}

luxp::ImageBuffer constant_image(int w, int h, double r, double g, double b, luxp::ColorSpace space) {
    std::vector<double> data;
    data.reserve(static_cast<std::size_t>(w) * h * 3);
    for (int i = 0; i < w * h; ++i) {
        data.push_back(r);
        data.push_back(g);
        data.push_back(b);
    }
    return {w, h, space, std::move(data)};
}

luxp::ImageBuffer textured_image(int w, int h, luxp::Rng& rng) {
    const double f1 = 0.05 + 0.2 * luxp::uniform01(rng), f2 = 0.3 + 0.5 * luxp::uniform01(rng);
    const double p1 = 6.0 * luxp::uniform01(rng), p2 = 6.0 * luxp::uniform01(rng);
    std::vector<double> data(static_cast<std::size_t>(w) * h * 3);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x)
            for (int c = 0; c < 3; ++c) {
                double v = 0.5 + 0.2 * std::sin(f1 * x + p1 + c) * std::cos(f1 * y - p2) +
                           0.1 * std::sin(f2 * (x + y) + p2 * c) + 0.15 * (luxp::uniform01(rng) - 0.5);
                data[(static_cast<std::size_t>(y) * w + x) * 3 + c] = std::clamp(v, 0.0, 1.0);
            }
    return {w, h, luxp::ColorSpace::SrgbEncoded, std::move(data)};
}

std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

void write_file(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    out << text;
}

} // namespace fixture

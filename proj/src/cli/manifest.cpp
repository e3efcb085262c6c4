#include "luxp/cli.hpp"

#include "luxp/error.hpp"

#include <json.hpp>
#include <openssl/evp.h>

#include <array>
#include <fstream>
#include <memory>

namespace luxp {

std::string sha256_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail_io("cannot read " + path.string());
    std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), EVP_MD_CTX_free);
    if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1) fail_io("SHA-256 unavailable");
    std::array<char, 1 << 16> buf{};
    while (in) {
        in.read(buf.data(), buf.size());
        if (in.gcount() > 0) EVP_DigestUpdate(ctx.get(), buf.data(), static_cast<std::size_t>(in.gcount()));
    }
    if (in.bad()) fail_io("failed reading " + path.string());
    std::array<unsigned char, EVP_MAX_MD_SIZE> digest{};
    unsigned int len = 0;
    EVP_DigestFinal_ex(ctx.get(), digest.data(), &len);
    static constexpr char hex[] = "0123456789abcdef";
    std::string out;
    for (unsigned int i = 0; i < len; ++i) {
        out.push_back(hex[digest[i] >> 4]);
        out.push_back(hex[digest[i] & 0xf]);
    }
    return out;
}

std::filesystem::path manifest_path(const std::filesystem::path& output) {
    return std::filesystem::path(output.string() + ".manifest.json");
}

std::string manifest_json(const RunManifest& m) {
    nlohmann::ordered_json j;
    j["tool"] = "luxp";
    j["version"] = LUXP_VERSION;
    j["command"] = m.command;
    nlohmann::ordered_json config = nlohmann::ordered_json::object();
    for (const auto& [k, v] : m.config) config[k] = v;
    j["config"] = config;
    nlohmann::ordered_json inputs = nlohmann::ordered_json::array();
    for (const auto& p : m.inputs) inputs.push_back({{"path", p.generic_string()}, {"sha256", sha256_file(p)}});
    j["inputs"] = inputs;
    j["seed"] = m.seed ? nlohmann::ordered_json(*m.seed) : nlohmann::ordered_json(nullptr);
    nlohmann::ordered_json outputs = nlohmann::ordered_json::array();
    for (const auto& p : m.outputs) outputs.push_back(p.generic_string());
    j["outputs"] = outputs;
    return j.dump(2) + "\n";
}

void write_manifests(const RunManifest& m) {
    const std::string text = manifest_json(m);
    for (const auto& output : m.outputs) {
        const auto path = manifest_path(output);
        std::ofstream out(path, std::ios::binary);
        if (!out || !(out << text)) fail_io("cannot write " + path.string());
    }
}

} // namespace luxp

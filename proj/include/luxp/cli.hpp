#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace luxp {

/// Provenance written next to every command output as `<output>.manifest.json`.
/// Holds nothing time-dependent, so identical runs give identical manifests.
struct RunManifest {
    std::string command;
    std::vector<std::pair<std::string, std::string>> config; // flag -> value, in flag order
    std::vector<std::filesystem::path> inputs;               // files read, digested on write
    std::optional<std::uint64_t> seed;
    std::vector<std::filesystem::path> outputs;
};

/// Lowercase hex SHA-256 of a file's bytes.
std::string sha256_file(const std::filesystem::path& path);

std::filesystem::path manifest_path(const std::filesystem::path& output);
std::string manifest_json(const RunManifest& manifest);
/// Writes one manifest per output.
void write_manifests(const RunManifest& manifest);

/// Entry point of the `luxp` tool. Returns 0 on success, 1 when input fails
/// validation and 2 on I/O failure; messages go to `err`.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

} // namespace luxp

// manifest.hpp - run manifests and digest sidecars for CLI artifacts.
#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <openssl/evp.h>

#include "json.hpp"

namespace geonet::cli {

inline constexpr const char* kToolVersion = "0.1.0";
inline constexpr const char* kManifestSchema = "geonet.manifest/1";

inline std::string sha256_hex(const std::string& data) {
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(data.data(), data.size(), md, &len, EVP_sha256(), nullptr) != 1) throw std::runtime_error("sha256 failed");
    static const char* hex = "0123456789abcdef";
    std::string out;
    for (unsigned i = 0; i < len; ++i) { out.push_back(hex[md[i] >> 4]); out.push_back(hex[md[i] & 15]); }
    return out;
}

// Collects artifacts for one command, then writes them with a manifest and
// one sidecar per artifact holding the manifest digest.
class RunManifest {
public:
    RunManifest(std::string command, std::uint64_t seed, nlohmann::ordered_json config)
        : command_(std::move(command)), seed_(seed), config_(std::move(config)) {}

    void add(const std::string& name, std::string content) { files_.push_back({name, std::move(content)}); }

    nlohmann::ordered_json to_json() const {
        nlohmann::ordered_json j;
        j["schema"] = kManifestSchema;
        j["command"] = command_;
        j["config"] = config_;
        j["seed"] = seed_;
        j["version"] = kToolVersion;
        j["outputs"] = nlohmann::ordered_json::array();
        for (auto& [name, content] : files_) j["outputs"].push_back({{"file", name}, {"sha256", sha256_hex(content)}, {"bytes", content.size()}});
        return j;
    }

    // Returns the manifest digest.
    std::string write(const std::filesystem::path& dir) const {
        std::filesystem::create_directories(dir);
        std::string manifest = to_json().dump(2) + "\n";
        std::string digest = sha256_hex(manifest);
        put(dir / (command_ + ".manifest.json"), manifest);
        for (auto& [name, content] : files_) {
            put(dir / name, content);
            put(dir / (name + ".manifest.sha256"), digest + "  " + command_ + ".manifest.json\n");
        }
        return digest;
    }

private:
    static void put(const std::filesystem::path& p, const std::string& s) {
        std::ofstream f(p, std::ios::binary);
        if (!f) throw std::runtime_error("cannot write " + p.string());
        f << s;
    }

    std::string command_;
    std::uint64_t seed_;
    nlohmann::ordered_json config_;
    std::vector<std::pair<std::string, std::string>> files_;
};

}  // namespace geonet::cli

#pragma once

// Provenance record written next to every command output. No timestamps or
// host details, so identical runs produce identical manifests.

#include <openssl/evp.h>

#include <array>
#include <cstdio>
#include <fstream>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

#include "biaslang/error.hpp"
#include "biaslang/numerics/container.hpp"

namespace biaslang {

inline const std::string kToolVersion =
    "biaslang 1.0.0 (checkpoint " + std::string(ad::kContainerMagic, 4) + " v" + std::to_string(ad::kContainerVersion) + ")";

inline std::string sha256_hex(std::istream& in) {
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), &EVP_MD_CTX_free);
  if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1) throw Error("sha256 unavailable");
  std::array<char, 1 << 16> buf{};
  while (in) {
    in.read(buf.data(), buf.size());
    if (in.gcount() > 0) EVP_DigestUpdate(ctx.get(), buf.data(), static_cast<std::size_t>(in.gcount()));
  }
  std::array<unsigned char, EVP_MAX_MD_SIZE> md{};
  unsigned int len = 0;
  EVP_DigestFinal_ex(ctx.get(), md.data(), &len);
  std::string hex;
  hex.reserve(len * 2);
  char two[3];
  for (unsigned int i = 0; i < len; ++i) {
    std::snprintf(two, sizeof two, "%02x", md[i]);
    hex += two;
  }
  return hex;
}

inline std::string sha256_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path + " for hashing");
  return sha256_hex(in);
}

struct RunManifest {
  std::string command;
  nlohmann::json config = nlohmann::json::object();
  std::uint64_t seed = 0;
  std::vector<std::pair<std::string, std::string>> inputs;  // path, sha256
  nlohmann::json outputs = nlohmann::json::object();
  std::string tool_version = kToolVersion;

  void add_input(const std::string& path) { inputs.emplace_back(path, sha256_file(path)); }

  nlohmann::json to_json() const {
    nlohmann::json in = nlohmann::json::array();
    for (const auto& [path, digest] : inputs) in.push_back({{"path", path}, {"sha256", digest}});
    return {{"command", command}, {"config", config}, {"seed", seed},
            {"inputs", in},       {"outputs", outputs}, {"tool_version", tool_version}};
  }

  void write(const std::string& path) const {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write manifest " + path);
    out << to_json().dump(2) << '\n';
  }
};

inline std::string manifest_path_for(const std::string& artifact) { return artifact + ".manifest.json"; }

}  // namespace biaslang

#pragma once

// Tensor container ("BLC1"):
//   4 bytes   magic "BLC1"
//   8 bytes   manifest length N, unsigned little-endian
//   N bytes   UTF-8 JSON manifest {"version", "tensors": [{name, shape, offset}], "meta"}
//   ...       float64 little-endian payloads; offsets are relative to the
//             first payload byte

#include <algorithm>
#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

#include "biaslang/error.hpp"
#include "biaslang/numerics/tensor.hpp"

namespace biaslang::ad {

inline constexpr char kContainerMagic[4] = {'B', 'L', 'C', '1'};
inline constexpr int kContainerVersion = 1;

struct NamedTensor {
  std::string name;
  Tensor tensor;
};

struct Container {
  nlohmann::json meta;
  std::vector<NamedTensor> tensors;

  const Tensor& at(const std::string& name) const {
    for (const auto& t : tensors) {
      if (t.name == name) return t.tensor;
    }
    throw FormatError("checkpoint has no tensor '" + name + "'", 0);
  }
};

namespace detail {

inline void put_u64(std::string& out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}

inline std::uint64_t get_u64(const char* p) {
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(static_cast<unsigned char>(p[i])) << (8 * i);
  return v;
}

inline void put_f64(std::string& out, double d) { put_u64(out, std::bit_cast<std::uint64_t>(d)); }

}  // namespace detail

inline std::string encode_container(const nlohmann::json& meta, const std::vector<std::pair<std::string, const Tensor*>>& tensors) {
  nlohmann::json manifest;
  manifest["version"] = kContainerVersion;
  manifest["meta"] = meta;
  manifest["tensors"] = nlohmann::json::array();
  std::uint64_t offset = 0;
  for (const auto& [name, t] : tensors) {
    manifest["tensors"].push_back({{"name", name}, {"shape", t->shape()}, {"offset", offset}});
    offset += 8 * t->size();
  }
  const std::string text = manifest.dump();

  std::string out(kContainerMagic, 4);
  detail::put_u64(out, text.size());
  out += text;
  out.reserve(out.size() + offset);
  for (const auto& entry : tensors) {
    for (double d : entry.second->values()) detail::put_f64(out, d);
  }
  return out;
}

inline Container decode_container(const std::string& bytes) {
  if (bytes.size() < 4 || std::memcmp(bytes.data(), kContainerMagic, 4) != 0) {
    throw FormatError("not a BLC1 checkpoint (bad magic)", 0);
  }
  if (bytes.size() < 12) throw IntegrityError("checkpoint truncated inside the header");
  const std::uint64_t manifest_len = detail::get_u64(bytes.data() + 4);
  if (manifest_len > bytes.size() - 12) throw IntegrityError("checkpoint truncated inside the manifest");

  nlohmann::json manifest;
  try {
    manifest = nlohmann::json::parse(bytes.begin() + 12, bytes.begin() + 12 + static_cast<std::ptrdiff_t>(manifest_len));
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("checkpoint manifest is not valid JSON: ") + e.what(), 0);
  }
  if (manifest.value("version", 0) != kContainerVersion) {
    throw FormatError("unsupported checkpoint version " + manifest.value("version", nlohmann::json()).dump(), 0);
  }

  const std::size_t payload_start = 12 + manifest_len;
  const std::size_t payload_len = bytes.size() - payload_start;
  Container out;
  out.meta = manifest.value("meta", nlohmann::json::object());
  std::uint64_t expected_end = 0;
  try {
    for (const auto& entry : manifest.at("tensors")) {
      Shape shape = entry.at("shape").get<Shape>();
      const std::uint64_t offset = entry.at("offset").get<std::uint64_t>();
      const std::uint64_t len = 8 * element_count(shape);
      if (offset + len > payload_len) {
        throw IntegrityError("checkpoint truncated: tensor '" + entry.at("name").get<std::string>() + "' is cut off");
      }
      std::vector<double> data(element_count(shape));
      const char* p = bytes.data() + payload_start + offset;
      for (std::size_t i = 0; i < data.size(); ++i) data[i] = std::bit_cast<double>(detail::get_u64(p + 8 * i));
      out.tensors.push_back({entry.at("name").get<std::string>(), Tensor(std::move(shape), std::move(data))});
      expected_end = std::max(expected_end, offset + len);
    }
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("checkpoint manifest malformed: ") + e.what(), 0);
  }
  if (expected_end != payload_len) throw IntegrityError("checkpoint payload size does not match its manifest");
  return out;
}

inline void write_container(const std::string& path, const nlohmann::json& meta,
                            const std::vector<std::pair<std::string, const Tensor*>>& tensors) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write " + path);
  const std::string bytes = encode_container(meta, tensors);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error("write failed: " + path);
}

inline Container read_container(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return decode_container(ss.str());
}

}  // namespace biaslang::ad

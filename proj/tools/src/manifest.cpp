#include "manifest.hpp"

#include <openssl/evp.h>

#include <stdexcept>

namespace powl2::cli {

std::string sha256_hex(std::string_view bytes) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
    throw std::runtime_error("SHA-256 digest failed");
  }
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  out.reserve(2 * len);
  for (unsigned int i = 0; i < len; ++i) {
    out += kHex[digest[i] >> 4];
    out += kHex[digest[i] & 0xf];
  }
  return out;
}

RunManifest::RunManifest(std::string command, std::string version) {
  doc_["tool"] = "powl";
  doc_["version"] = std::move(version);
  doc_["command"] = std::move(command);
  doc_["flags"] = nlohmann::ordered_json::object();
  doc_["inputs"] = nlohmann::ordered_json::array();
  doc_["outputs"] = nlohmann::ordered_json::array();
}

void RunManifest::input(const std::filesystem::path& path, std::string_view bytes) {
  doc_["inputs"].push_back({{"path", path.generic_string()}, {"sha256", sha256_hex(bytes)}});
}

void RunManifest::output(const std::filesystem::path& path, std::string_view bytes) {
  doc_["outputs"].push_back({{"path", path.generic_string()}, {"sha256", sha256_hex(bytes)}});
}

}  // namespace powl2::cli

#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "json.hpp"

namespace powl2::cli {

std::string sha256_hex(std::string_view bytes);

// Sidecar describing one run: tool version, command, flags, and content hashes
// of inputs and outputs. Contains nothing that varies between identical runs.
class RunManifest {
 public:
  RunManifest(std::string command, std::string version);

  template <typename T>
  void flag(const std::string& name, const T& value) {
    doc_["flags"][name] = value;
  }
  void input(const std::filesystem::path& path, std::string_view bytes);
  void output(const std::filesystem::path& path, std::string_view bytes);

  std::string dump() const { return doc_.dump(2) + "\n"; }

 private:
  nlohmann::ordered_json doc_;
};

}  // namespace powl2::cli

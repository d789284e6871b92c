#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

namespace citemetrics::cli {

std::string sha256_file(const std::filesystem::path& path);

/// Reproducibility record written next to every command's outputs: the
/// parameters that produced them plus a checksum per emitted artifact.
class RunManifest {
 public:
  RunManifest(std::string command, const std::filesystem::path& out_dir);

  nlohmann::json& params() { return params_; }
  void set_corpus_hash(std::string hash) { corpus_hash_ = std::move(hash); }
  void add_output(const std::filesystem::path& path) { outputs_.push_back(path); }

  /// Writes <out_dir>/<name>; default run_manifest.json.
  std::filesystem::path write(const std::string& name = "run_manifest.json") const;

 private:
  std::string command_;
  std::filesystem::path out_dir_;
  nlohmann::json params_;
  std::string corpus_hash_;
  std::vector<std::filesystem::path> outputs_;
};

}  // namespace citemetrics::cli

#include "manifest.hpp"

#include <openssl/evp.h>

#include <fstream>
#include <stdexcept>

#include "citemetrics/version.hpp"

namespace citemetrics::cli {

std::string sha256_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open for hashing: " + path.string());

  EVP_MD_CTX* ctx = EVP_MD_CTX_new();
  if (!ctx || EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr) != 1) {
    EVP_MD_CTX_free(ctx);
    throw std::runtime_error("sha256 init failed");
  }
  char buf[1 << 16];
  while (in) {
    in.read(buf, sizeof(buf));
    const std::streamsize got = in.gcount();
    if (got > 0 && EVP_DigestUpdate(ctx, buf, static_cast<std::size_t>(got)) != 1) {
      EVP_MD_CTX_free(ctx);
      throw std::runtime_error("sha256 update failed");
    }
  }
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_DigestFinal_ex(ctx, digest, &len) != 1) {
    EVP_MD_CTX_free(ctx);
    throw std::runtime_error("sha256 final failed");
  }
  EVP_MD_CTX_free(ctx);

  static const char* hex = "0123456789abcdef";
  std::string out;
  out.reserve(2 * len);
  for (unsigned int i = 0; i < len; ++i) {
    out.push_back(hex[digest[i] >> 4]);
    out.push_back(hex[digest[i] & 0xf]);
  }
  return out;
}

RunManifest::RunManifest(std::string command, const std::filesystem::path& out_dir)
    : command_(std::move(command)), out_dir_(out_dir) {}

std::filesystem::path RunManifest::write(const std::string& name) const {
  nlohmann::json doc;
  doc["tool"] = "citemetrics";
  doc["version"] = kVersion;
  doc["command"] = command_;
  doc["params"] = params_;
  if (!corpus_hash_.empty()) doc["corpus_sha256"] = corpus_hash_;
  auto& outputs = doc["outputs"] = nlohmann::json::array();
  for (const auto& path : outputs_) {
    outputs.push_back({{"path", path.filename().string()}, {"sha256", sha256_file(path)}});
  }

  const std::filesystem::path target = out_dir_ / name;
  std::ofstream out(target);
  if (!out) throw std::runtime_error("cannot write manifest: " + target.string());
  out << doc.dump(2) << '\n';
  return target;
}

}  // namespace citemetrics::cli

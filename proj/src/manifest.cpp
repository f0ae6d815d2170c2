#include "microlocal/manifest.hpp"

#include <openssl/evp.h>

#include <array>
#include <fstream>
#include <iterator>
#include <memory>

#include <json.hpp>

#include "microlocal/error.hpp"

namespace microlocal {

std::string sha256_hex(const std::string& bytes) {
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), EVP_MD_CTX_free);
  std::array<unsigned char, EVP_MAX_MD_SIZE> digest{};
  unsigned int len = 0;
  require(ctx && EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) == 1 &&
              EVP_DigestUpdate(ctx.get(), bytes.data(), bytes.size()) == 1 &&
              EVP_DigestFinal_ex(ctx.get(), digest.data(), &len) == 1,
          errors::kFormatError, "SHA-256 computation failed");
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    out.push_back(kHex[digest[i] >> 4]);
    out.push_back(kHex[digest[i] & 15]);
  }
  return out;
}

std::string sha256_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  require(static_cast<bool>(in), errors::kFormatError, "cannot read " + path);
  return sha256_hex(std::string(std::istreambuf_iterator<char>(in), {}));
}

void Manifest::add_artifact(const std::string& path) { artifacts.emplace_back(path, sha256_file(path)); }

void Manifest::write(const std::string& path) const {
  nlohmann::ordered_json j;
  j["tool"] = "microlocal";
  j["version"] = kVersion;
  j["subcommand"] = subcommand;
  j["config"] = config_path;
  j["config_sha256"] = config_hash;
  j["seed"] = seed;
  j["threads"] = threads;
  j["wall_seconds"] = wall_seconds;
  auto& list = j["artifacts"] = nlohmann::ordered_json::array();
  for (const auto& [p, h] : artifacts) list.push_back({{"path", p}, {"sha256", h}});
  std::ofstream out(path, std::ios::binary);
  require(static_cast<bool>(out), errors::kFormatError, "cannot write " + path);
  out << j.dump(2) << '\n';
}

}  // namespace microlocal

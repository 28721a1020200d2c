#include "manifest.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include <openssl/evp.h>
#include <unistd.h>

#include "dmdroi/error.hpp"

namespace dmdroi::cli {

namespace fs = std::filesystem;

namespace {

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::NotFound, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return std::move(ss).str();
}

}  // namespace

std::string sha256_hex(std::string_view bytes) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
    throw Error(ErrorCode::InvalidArgument, "SHA-256 failed");
  }
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    out += kHex[digest[i] >> 4];
    out += kHex[digest[i] & 0xf];
  }
  return out;
}

std::string sha256_path(const fs::path& path) {
  if (!fs::is_directory(path)) return sha256_hex(read_file(path));
  std::vector<fs::path> files;
  for (const auto& e : fs::directory_iterator(path)) {
    if (e.is_regular_file()) files.push_back(e.path());
  }
  std::sort(files.begin(), files.end());
  std::string combined;
  for (const auto& f : files) {
    combined += f.filename().string() + ":" + sha256_hex(read_file(f)) + "\n";
  }
  return sha256_hex(combined);
}

ArtifactWriter::ArtifactWriter(fs::path out_dir) : out_dir_(std::move(out_dir)) {
  if (out_dir_.empty()) throw Error(ErrorCode::WriteError, "empty output directory");
  std::error_code ec;
  fs::create_directories(out_dir_, ec);
  if (ec || !fs::is_directory(out_dir_)) {
    throw Error(ErrorCode::WriteError, "cannot create output directory " + out_dir_.string());
  }
  staging_ = out_dir_ / (".staging-" + std::to_string(::getpid()));
  fs::remove_all(staging_, ec);
  if (!fs::create_directory(staging_, ec) || ec) {
    throw Error(ErrorCode::WriteError, "cannot create staging directory " + staging_.string());
  }
}

ArtifactWriter::~ArtifactWriter() {
  std::error_code ec;
  fs::remove_all(staging_, ec);
}

fs::path ArtifactWriter::stage(const std::string& name) {
  if (std::find(names_.begin(), names_.end(), name) == names_.end()) names_.push_back(name);
  return staging_ / name;
}

void ArtifactWriter::write_text(const std::string& name, const std::string& text) {
  std::ofstream out(stage(name), std::ios::binary | std::ios::trunc);
  out << text;
  out.close();
  if (!out) throw Error(ErrorCode::WriteError, "failed writing " + name);
}

void ArtifactWriter::record(std::string key, std::string value) {
  manifest_.emplace_back(std::move(key), std::move(value));
}

void ArtifactWriter::commit() {
  std::string manifest;
  for (const auto& [k, v] : manifest_) manifest += k + "=" + v + "\n";
  for (const auto& name : names_) {
    manifest += "artifact." + name + ".sha256=" + sha256_hex(read_file(staging_ / name)) + "\n";
  }
  write_text("run.manifest", manifest);

  for (const auto& name : names_) {
    std::error_code ec;
    fs::rename(staging_ / name, out_dir_ / name, ec);
    if (ec) throw Error(ErrorCode::WriteError, "cannot move " + name + " into " + out_dir_.string());
  }
  committed_ = true;
}

}  // namespace dmdroi::cli

#pragma once

#include <filesystem>
#include <functional>
#include <string>
#include <utility>
#include <vector>

namespace dmdroi::cli {

std::string sha256_hex(std::string_view bytes);

/// Digest of a file, or of every regular file under a directory in
/// lexicographic order (name and contents).
std::string sha256_path(const std::filesystem::path& path);

/// Collects artifacts in a staging directory next to the output and moves
/// them into place only on commit(); an uncommitted writer removes its
/// staging directory.
class ArtifactWriter {
 public:
  explicit ArtifactWriter(std::filesystem::path out_dir);
  ~ArtifactWriter();
  ArtifactWriter(const ArtifactWriter&) = delete;
  ArtifactWriter& operator=(const ArtifactWriter&) = delete;

  /// Path inside the staging directory for an artifact called `name`.
  std::filesystem::path stage(const std::string& name);
  void write_text(const std::string& name, const std::string& text);

  /// Key/value pairs written to `run.manifest`, in insertion order.
  void record(std::string key, std::string value);

  void commit();

 private:
  std::filesystem::path out_dir_;
  std::filesystem::path staging_;
  std::vector<std::string> names_;
  std::vector<std::pair<std::string, std::string>> manifest_;
  bool committed_ = false;
};

}  // namespace dmdroi::cli

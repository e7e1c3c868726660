#pragma once

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "gnat/config.hpp"

namespace gnat {

/// Lower-case hex SHA-256 of the file's raw bytes.
std::string sha256_file(const std::filesystem::path& path);
std::string sha256_hex(std::string_view bytes);

struct StageTiming {
  std::string stage;
  double seconds = 0.0;
};

struct FileDigest {
  std::string path;  // as given to the pipeline
  std::string sha256;
};

struct RunManifest {
  std::string command;
  std::vector<std::pair<std::string, std::string>> config;  // resolved keys
  std::vector<FileDigest> inputs;
  std::vector<FileDigest> outputs;
  std::vector<StageTiming> timings;

  void add_input(const std::filesystem::path& path);
  void add_output(const std::filesystem::path& path);

  std::string to_json() const;
  /// Atomically writes run_manifest.json into `dir`.
  void write(const std::filesystem::path& dir) const;
};

}  // namespace gnat

#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace fidelity::cli {

enum class ManifestRole { Log, Attempt, Layout };

struct ManifestEntry {
  std::filesystem::path path;  // resolved against the manifest's directory
  ManifestRole role = ManifestRole::Log;
};

/// One `<path> <role>` pair per line; blank lines and `#` comments are skipped.
std::vector<ManifestEntry> parse_manifest(std::string_view text, const std::filesystem::path& base);
std::vector<ManifestEntry> read_manifest(const std::filesystem::path& file);
std::string write_manifest(const std::vector<ManifestEntry>& entries, const std::filesystem::path& base);

std::string_view to_string(ManifestRole role);

/// Throws ValidationError when the file cannot be read.
std::string read_text_file(const std::filesystem::path& file);

/// Writes next to the target and renames over it, so readers never see a partial file.
void write_file_atomic(const std::filesystem::path& file, std::string_view content);

}  // namespace fidelity::cli

#include "manifest.hpp"

#include <fstream>
#include <sstream>

#include "fidelity/errors.hpp"

namespace fidelity::cli {

namespace fs = std::filesystem;

std::string_view to_string(ManifestRole role) {
  switch (role) {
    case ManifestRole::Log: return "log";
    case ManifestRole::Attempt: return "attempt";
    case ManifestRole::Layout: return "layout";
  }
  return "log";
}

std::vector<ManifestEntry> parse_manifest(std::string_view text, const fs::path& base) {
  std::vector<ManifestEntry> entries;
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream fields(line);
    std::string path, role, rest;
    if (!(fields >> path)) continue;
    if (!(fields >> role) || (fields >> rest)) throw ParseError(line_no, "manifest lines need '<path> <role>'");
    ManifestEntry e;
    if (role == "log") {
      e.role = ManifestRole::Log;
    } else if (role == "attempt") {
      e.role = ManifestRole::Attempt;
    } else if (role == "layout") {
      e.role = ManifestRole::Layout;
    } else {
      throw ParseError(line_no, "unknown manifest role '" + role + "'");
    }
    const fs::path p(path);
    e.path = p.is_absolute() ? p : base / p;
    entries.push_back(std::move(e));
  }
  return entries;
}

std::vector<ManifestEntry> read_manifest(const fs::path& file) {
  return parse_manifest(read_text_file(file), file.parent_path());
}

std::string write_manifest(const std::vector<ManifestEntry>& entries, const fs::path& base) {
  std::string out;
  for (const auto& e : entries) {
    const fs::path rel = e.path.lexically_relative(base);
    out += (rel.empty() ? e.path : rel).generic_string();
    out += ' ';
    out += to_string(e.role);
    out += '\n';
  }
  return out;
}

std::string read_text_file(const fs::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw ValidationError("cannot read '" + file.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file_atomic(const fs::path& file, std::string_view content) {
  if (file.has_parent_path()) fs::create_directories(file.parent_path());
  fs::path tmp = file;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw ValidationError("cannot write '" + file.string() + "'");
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw ValidationError("short write to '" + file.string() + "'");
  }
  fs::rename(tmp, file);
}

}  // namespace fidelity::cli

#pragma once

#include <map>
#include <string>
#include <string_view>

namespace educoder::ingest {

/// Read-only view over a ZIP archive held in memory. Supports the stored and
/// deflate methods, which is everything spreadsheet applications emit.
/// ZIP64 archives are rejected.
class ZipArchive {
 public:
  explicit ZipArchive(std::string_view bytes);

  [[nodiscard]] bool contains(const std::string& name) const { return entries_.contains(name); }
  /// Inflated contents; throws Error(malformedFile) when absent or corrupt.
  [[nodiscard]] std::string read(const std::string& name) const;

 private:
  struct Entry {
    std::uint16_t method = 0;
    std::uint32_t compressed_size = 0;
    std::uint32_t uncompressed_size = 0;
    std::uint32_t local_header_offset = 0;
  };

  std::string_view bytes_;
  std::map<std::string, Entry> entries_;
};

}  // namespace educoder::ingest

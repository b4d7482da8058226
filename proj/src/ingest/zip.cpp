#include "educoder/ingest/zip.hpp"

#include <zlib.h>

#include <cstdint>

#include "educoder/core/error.hpp"

namespace educoder::ingest {

namespace {

constexpr std::uint32_t kEndOfCentralDir = 0x06054b50;
constexpr std::uint32_t kCentralHeader = 0x02014b50;
constexpr std::uint32_t kLocalHeader = 0x04034b50;

[[noreturn]] void corrupt(const std::string& what) { throw Error(errc::malformed_file, "xlsx: " + what); }

std::uint16_t u16(std::string_view b, std::size_t at) {
  if (at + 2 > b.size()) corrupt("truncated archive");
  return static_cast<std::uint16_t>(static_cast<unsigned char>(b[at]) | (static_cast<unsigned char>(b[at + 1]) << 8));
}

std::uint32_t u32(std::string_view b, std::size_t at) {
  return static_cast<std::uint32_t>(u16(b, at)) | (static_cast<std::uint32_t>(u16(b, at + 2)) << 16);
}

}  // namespace

ZipArchive::ZipArchive(std::string_view bytes) : bytes_(bytes) {
  if (bytes.size() < 22) corrupt("not a zip archive");
  // The end-of-central-directory record sits in the last 22 + 65535 bytes.
  std::size_t eocd = std::string_view::npos;
  const std::size_t lowest = bytes.size() > 22 + 65535 ? bytes.size() - 22 - 65535 : 0;
  for (std::size_t pos = bytes.size() - 22 + 1; pos-- > lowest;) {
    if (u32(bytes, pos) == kEndOfCentralDir) {
      eocd = pos;
      break;
    }
  }
  if (eocd == std::string_view::npos) corrupt("not a zip archive");
  const std::uint16_t count = u16(bytes, eocd + 10);
  const std::uint32_t dir_offset = u32(bytes, eocd + 16);
  if (count == 0xFFFF || dir_offset == 0xFFFFFFFF) corrupt("zip64 archives are not supported");

  std::size_t pos = dir_offset;
  for (std::uint16_t i = 0; i < count; ++i) {
    if (u32(bytes, pos) != kCentralHeader) corrupt("bad central directory");
    Entry e;
    e.method = u16(bytes, pos + 10);
    e.compressed_size = u32(bytes, pos + 20);
    e.uncompressed_size = u32(bytes, pos + 24);
    const std::uint16_t name_len = u16(bytes, pos + 28);
    const std::uint16_t extra_len = u16(bytes, pos + 30);
    const std::uint16_t comment_len = u16(bytes, pos + 32);
    e.local_header_offset = u32(bytes, pos + 42);
    if (pos + 46 + name_len > bytes.size()) corrupt("truncated central directory");
    entries_.emplace(std::string(bytes.substr(pos + 46, name_len)), e);
    pos += 46 + name_len + extra_len + comment_len;
  }
}

std::string ZipArchive::read(const std::string& name) const {
  auto it = entries_.find(name);
  if (it == entries_.end()) corrupt("missing part " + name);
  const Entry& e = it->second;
  const std::size_t lh = e.local_header_offset;
  if (u32(bytes_, lh) != kLocalHeader) corrupt("bad local header for " + name);
  const std::size_t data = lh + 30 + u16(bytes_, lh + 26) + u16(bytes_, lh + 28);
  if (data + e.compressed_size > bytes_.size()) corrupt("truncated entry " + name);
  const std::string_view payload = bytes_.substr(data, e.compressed_size);

  if (e.method == 0) return std::string(payload);
  if (e.method != 8) corrupt("unsupported compression method in " + name);

  std::string out(e.uncompressed_size, '\0');
  z_stream zs{};
  if (inflateInit2(&zs, -MAX_WBITS) != Z_OK) corrupt("inflate init failed");
  zs.next_in = reinterpret_cast<Bytef*>(const_cast<char*>(payload.data()));
  zs.avail_in = static_cast<uInt>(payload.size());
  zs.next_out = reinterpret_cast<Bytef*>(out.data());
  zs.avail_out = static_cast<uInt>(out.size());
  const int rc = inflate(&zs, Z_FINISH);
  inflateEnd(&zs);
  if (rc != Z_STREAM_END || zs.total_out != e.uncompressed_size) corrupt("corrupt deflate stream in " + name);
  return out;
}

}  // namespace educoder::ingest

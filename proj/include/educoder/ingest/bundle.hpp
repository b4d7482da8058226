#pragma once

#include <string_view>

#include "educoder/codec/json_codec.hpp"

namespace educoder::ingest {

/// Reads a bundle written by the store's export. Every cell must validate
/// against the bundle's own codebook and transcript, and every note and flag
/// must sit on an existing line; otherwise Error(integrityFailure). A wrong
/// schemaVersion gives Error(schemaVersionUnsupported).
[[nodiscard]] codec::BundleContents import_annotated_bundle(std::string_view bytes);

}  // namespace educoder::ingest

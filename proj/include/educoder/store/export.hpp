#pragma once

#include <string>

#include "educoder/codec/json_codec.hpp"
#include "educoder/store/store.hpp"

namespace educoder::store {

[[nodiscard]] codec::BundleContents to_bundle(const Snapshot& snapshot);

/// Canonical bundle JSON, schemaVersion first, two-space indent.
[[nodiscard]] std::string export_bundle_json(const Snapshot& snapshot);

/// One row per cell, plus one per (annotator, line) that has a note or flag
/// but no cell. Sorted by (line, code, annotator); CRLF record ends.
[[nodiscard]] std::string export_annotations_csv(const Snapshot& snapshot);

/// Read-only view over imported contents, for offline tools.
[[nodiscard]] Snapshot snapshot_from_bundle(codec::BundleContents contents);

}  // namespace educoder::store

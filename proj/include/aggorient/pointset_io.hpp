#pragma once

#include <filesystem>
#include <iosfwd>

#include "aggorient/geometry.hpp"

namespace aggorient::io {

/// CSV with header `x,y` and one point per row.
PointSet read_csv(const std::filesystem::path& path);
PointSet read_csv(std::istream& in, std::string source_id = {});
void write_csv(const std::filesystem::path& path, const PointSet& ps);
void write_csv(std::ostream& out, const PointSet& ps);

/// Loads a binary mask (PGM P2/P5 or PNG) and returns the coordinates of the
/// nonzero pixels as (row, column) points.
PointSet load_mask(const std::filesystem::path& path);

/// Writes `content` to `path` via a temporary sibling and rename.
void write_atomic(const std::filesystem::path& path, const std::string& content);

}  // namespace aggorient::io

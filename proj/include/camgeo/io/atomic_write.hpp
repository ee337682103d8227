#pragma once

#include <filesystem>
#include <string>
#include <string_view>

namespace camgeo::io {

/// Writes to a sibling temporary file and renames it over `path`, so readers
/// never observe partial output. Throws ValidationError on I/O failure.
void atomic_write(const std::filesystem::path& path, std::string_view bytes);

std::string read_file(const std::filesystem::path& path);

} // namespace camgeo::io

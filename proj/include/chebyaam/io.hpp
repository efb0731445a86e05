#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>

namespace chebyaam {

class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Writes `contents` to `path.tmp` and renames it over `path`.
/// Throws IoError if the file cannot be written.
void write_file_atomically(const std::filesystem::path& path, std::string_view contents);

std::string read_file(const std::filesystem::path& path);

}  // namespace chebyaam

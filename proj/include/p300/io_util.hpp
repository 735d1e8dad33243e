#pragma once

#include <string>

namespace p300 {

// Reads a whole file in binary mode. Throws IoError.
std::string read_file(const std::string& path);

// Writes via a temp file in the same directory plus rename, so readers never
// observe a half-written file. Throws IoError.
void write_file_atomic(const std::string& path, const std::string& content);

}  // namespace p300

#pragma once

#include <string>

namespace mgd {

// Writes via a temp file in the same directory plus rename, so readers never
// observe a truncated artifact.
void atomic_write_text(const std::string& path, const std::string& content);

std::string read_text(const std::string& path);

}  // namespace mgd

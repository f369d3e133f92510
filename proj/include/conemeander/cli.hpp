#pragma once

#include <ostream>
#include <string>

namespace cmeander {

/// Entry point of the cone_meander tool. Returns 0 on success or a passed
/// check, 1 on a failed check or a sampling failure, 2 on usage or config
/// errors.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

/// Writes `content` to `path` through a temporary file and a rename, so
/// readers never see a partial file.
void write_atomic(const std::string& path, const std::string& content);

}  // namespace cmeander

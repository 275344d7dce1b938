#pragma once

#include <string>

#include "nlclaw/core.hpp"

namespace nlclaw {

/// Binary field snapshot: one ASCII header line
///   NLCLAW-FIELD v1 dim=<d> n=<n> L=<length>
/// followed by cell values as little-endian float64 in row-major order.
void write_snapshot(const std::string& path, const Field& f);
Field read_snapshot(const std::string& path);

}  // namespace nlclaw

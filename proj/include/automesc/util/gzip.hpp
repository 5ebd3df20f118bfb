#pragma once

#include <string>
#include <string_view>

namespace automesc::util {

// Throws Error(ChecksumMismatch) when the stream is truncated or fails its CRC.
std::string gunzip(std::string_view compressed);
std::string gzip(std::string_view plain);

} // namespace automesc::util

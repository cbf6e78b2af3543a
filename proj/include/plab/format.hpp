#pragma once

#include <string>

namespace plab {

// shortest decimal that parses back to the same double; "inf"/"-inf" for infinities
std::string fmt_double(double x);

// FNV-1a, hex
std::string fnv1a_hex(const std::string& s);

}  // namespace plab

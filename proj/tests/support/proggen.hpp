#pragma once

#include <cstdint>
#include <string>

namespace soup::testing {

// Seeded random program generator covering the scalar subset the reference
// interpreter handles: 1-3 scalar parameters, integer locals, one optional
// fixed array, arithmetic with all operators, if/else, bounded for/while
// loops and asserts.  The same seed always yields the same source text.
std::string generate_program(uint32_t seed);

} // namespace soup::testing

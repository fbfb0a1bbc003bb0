#pragma once

#include <cstdint>
#include <vector>

#include "soup/ast.hpp"

namespace soup {

// Finite value domains the engine enumerates nondet choices over.  Small by
// default; the extremes keep overflow/oob behavior reachable.
struct DomainConfig {
    int64_t u8_hi = 63;    // u8: 0..u8_hi
    int64_t small_hi = 15; // u32/i32/size_t: 0..small_hi plus type extremes
    int64_t alloc_cap = 16; // harness/model pointee sizes: 1..alloc_cap

    // Domain of nondet_<type>().  size_t additionally covers 0..alloc_cap so
    // that every allocation size up to the cap is reachable.
    std::vector<int64_t> domain_for(Base b) const;
    // Domain for a nondet allocation size in [lo, hi].
    static std::vector<int64_t> size_range(int64_t lo, int64_t hi);
};

// Applies `--domain-cap N`: caps all small ranges at N.
DomainConfig domains_with_cap(int64_t cap);

} // namespace soup

#include "soup/domains.hpp"

#include <limits>

#include "soup/diag.hpp"

namespace soup {

std::vector<int64_t> DomainConfig::domain_for(Base b) const {
    std::vector<int64_t> out;
    switch (b) {
        case Base::U8:
            for (int64_t v = 0; v <= u8_hi; ++v) out.push_back(v);
            return out;
        case Base::U32:
            for (int64_t v = 0; v <= small_hi; ++v) out.push_back(v);
            out.push_back(std::numeric_limits<uint32_t>::max());
            return out;
        case Base::I32:
            for (int64_t v = 0; v <= small_hi; ++v) out.push_back(v);
            out.push_back(std::numeric_limits<int32_t>::min());
            out.push_back(std::numeric_limits<int32_t>::max());
            return out;
        case Base::Size:
            // Covers every allocation size up to the cap, so `malloc(nondet_size())`
            // ranges over 0..alloc_cap plus the far extreme.
            for (int64_t v = 0; v <= std::max(small_hi, alloc_cap); ++v) out.push_back(v);
            out.push_back(std::numeric_limits<uint32_t>::max());
            return out;
        case Base::Void: break;
    }
    throw InternalError("no nondet domain for type void");
}

std::vector<int64_t> DomainConfig::size_range(int64_t lo, int64_t hi) {
    std::vector<int64_t> out;
    for (int64_t v = lo; v <= hi; ++v) out.push_back(v);
    return out;
}

DomainConfig domains_with_cap(int64_t cap) {
    if (cap < 1) throw InputError("domain cap must be >= 1");
    DomainConfig d;
    d.u8_hi = cap;
    d.small_hi = cap;
    d.alloc_cap = cap;
    return d;
}

} // namespace soup

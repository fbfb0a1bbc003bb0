#include "soup/ast.hpp"

#include <algorithm>

#include "soup/diag.hpp"

namespace soup {

const char* base_name(Base b) {
    switch (b) {
        case Base::Void: return "void";
        case Base::U8: return "u8";
        case Base::U32: return "u32";
        case Base::I32: return "i32";
        case Base::Size: return "size_t";
    }
    return "?";
}

std::string type_name(const TypeRef& t) {
    std::string s = base_name(t.base);
    if (t.ptr) s += "*";
    return s;
}

int int_width(Base b) {
    switch (b) {
        case Base::U8: return 8;
        case Base::U32:
        case Base::I32:
        case Base::Size: return 32;
        case Base::Void: break;
    }
    return 0;
}

bool is_signed(Base b) { return b == Base::I32; }

const std::vector<std::shared_ptr<FunctionDef>>* ProjectIndex::candidates(
    const std::string& name) const {
    auto it = by_name.find(name);
    return it == by_name.end() ? nullptr : &it->second;
}

int common_path_prefix(const std::string& a, const std::string& b) {
    size_t n = 0;
    size_t last_sep = 0;
    while (n < a.size() && n < b.size() && a[n] == b[n]) {
        if (a[n] == '/') last_sep = n + 1;
        ++n;
    }
    if (n == a.size() && n == b.size()) return static_cast<int>(n);
    return static_cast<int>(last_sep);
}

const FunctionDef* ProjectIndex::resolve(const std::string& name,
                                         const std::string& from_file) const {
    auto* cands = candidates(name);
    if (!cands || cands->empty()) return nullptr;
    if (cands->size() == 1) return cands->front().get();
    const FunctionDef* best = nullptr;
    int best_len = -1;
    for (const auto& f : *cands) {
        int len = common_path_prefix(f->file, from_file);
        if (len > best_len) {
            best_len = len;
            best = f.get();
        }
    }
    return best;
}

const GlobalVar* ProjectIndex::global(const std::string& name) const {
    for (const auto& g : globals)
        if (g.decl.name == name) return &g;
    return nullptr;
}

} // namespace soup

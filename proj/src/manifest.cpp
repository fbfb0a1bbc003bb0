#include "soup/manifest.hpp"

#include <sstream>

#include "soup/diag.hpp"

namespace soup {

namespace {

std::string join(const std::set<std::string>& xs) {
    std::string out;
    for (const auto& x : xs) {
        if (!out.empty()) out += ", ";
        out += x;
    }
    return out;
}

std::string initspec_text(const InitSpec& is) {
    std::string s;
    if (!is.type.ptr) {
        s = std::string("nondet ") + base_name(is.type.base);
        return s;
    }
    s = std::string("alloc ") + base_name(is.type.base) + " size ";
    if (is.size_fixed)
        s += "fixed " + std::to_string(is.size_lo);
    else
        s += "nondet " + std::to_string(is.size_lo) + " " + std::to_string(is.size_hi);
    if (!is.size_symbol.empty()) s += " as " + is.size_symbol;
    if (!is.assume_not_null) s += " maybe-null";
    return s;
}

std::string pre_text(const PreconditionTerm& p) {
    std::string s = std::string("pre ") + precat_name(p.category) + " " + p.subjects.at(0) +
                    " " + rel_name(p.rel) + " ";
    switch (p.category) {
        case PreCat::PointerNotNull: s += "NULL"; break;
        case PreCat::VariableConstant: s += std::to_string(p.constant.value_or(0)); break;
        case PreCat::VariableVariable: s += p.subjects.at(1); break;
        case PreCat::PointerOffset:
            s += p.subjects.at(1);
            if (p.constant.value_or(0) != 0) s += " + " + std::to_string(*p.constant);
            break;
    }
    return s;
}

} // namespace

std::string serialize_manifest(const UnitProof& proof) {
    std::ostringstream os;
    os << "manifest-version = " << proof.manifest_version << "\n\n";

    os << "[scope]\n";
    os << "entry = " << proof.scope.entry << "\n";
    os << "entry-file = " << proof.scope.entry_file << "\n";
    os << "level = " << proof.scope.level << "\n";
    os << "functions = " << join(proof.scope.functions) << "\n";
    os << "files = " << join(proof.scope.files) << "\n\n";

    os << "[bounds]\n";
    os << "default = " << proof.bounds.default_bound << "\n";
    for (const auto& [id, b] : proof.bounds.bounds) os << id << " = " << b << "\n";
    os << "\n";

    os << "[env]\n";
    for (const auto& is : proof.env.input_model)
        os << "input " << is.param << " = " << initspec_text(is) << "\n";
    for (const auto& [name, v] : proof.env.config_overrides)
        os << "config " << name << " = " << v << "\n";
    for (const auto& p : proof.env.preconditions) os << pre_text(p) << "\n";
    for (const auto& [name, m] : proof.env.function_models) {
        os << "model " << name << " : type" << m.type(proof.env.preconditions) << " {";
        if (!m.ret.type.is_void()) os << " return " << initspec_text(m.ret) << ";";
        for (const auto& h : m.havoc_params) os << " havoc " << h << ";";
        os << " }\n";
    }
    os << "\n";

    os << "[harness]\n";
    os << "---harness---\n";
    os << proof.harness;
    if (!proof.harness.empty() && proof.harness.back() != '\n') os << "\n";
    os << "---harness---\n";
    return os.str();
}

namespace {

struct LineReader {
    std::vector<std::string> lines;
    size_t pos = 0;

    explicit LineReader(const std::string& text) {
        std::string cur;
        for (char c : text) {
            if (c == '\n') {
                lines.push_back(cur);
                cur.clear();
            } else {
                cur += c;
            }
        }
        if (!cur.empty()) lines.push_back(cur);
    }
};

[[noreturn]] void bad(size_t lineno, const std::string& msg) {
    throw InputError("manifest line " + std::to_string(lineno + 1) + ": " + msg);
}

std::string trim(const std::string& s) {
    size_t b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    size_t e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split_ws(const std::string& s) {
    std::vector<std::string> out;
    std::istringstream is(s);
    std::string w;
    while (is >> w) out.push_back(w);
    return out;
}

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : s) {
        if (c == ',') {
            out.push_back(trim(cur));
            cur.clear();
        } else {
            cur += c;
        }
    }
    cur = trim(cur);
    if (!cur.empty()) out.push_back(cur);
    return out;
}

std::vector<std::string> split_on_semi(const std::string& s) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : s) {
        if (c == ';') {
            out.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    if (!trim(cur).empty()) out.push_back(cur);
    return out;
}

int64_t parse_int(const std::string& s, size_t lineno) {
    try {
        size_t used = 0;
        int64_t v = std::stoll(s, &used);
        if (used != s.size()) bad(lineno, "malformed integer '" + s + "'");
        return v;
    } catch (const InputError&) {
        throw;
    } catch (const std::exception&) {
        bad(lineno, "malformed integer '" + s + "'");
    }
}

Base base_from_name(const std::string& s, size_t lineno) {
    for (Base b : {Base::U8, Base::U32, Base::I32, Base::Size})
        if (s == base_name(b)) return b;
    bad(lineno, "unknown type '" + s + "'");
}

// "nondet u8" | "alloc u8 size nondet 1 16 [as sym] [maybe-null]" |
// "alloc u8 size fixed 10 [as sym] [maybe-null]"
InitSpec parse_initspec(const std::vector<std::string>& w, size_t i, size_t lineno) {
    InitSpec is;
    if (i >= w.size()) bad(lineno, "missing initializer");
    if (w[i] == "nondet") {
        if (i + 1 >= w.size()) bad(lineno, "missing type after 'nondet'");
        is.type = {base_from_name(w[i + 1], lineno), false};
        if (i + 2 != w.size()) bad(lineno, "trailing tokens after initializer");
        return is;
    }
    if (w[i] != "alloc") bad(lineno, "expected 'nondet' or 'alloc'");
    if (i + 3 >= w.size()) bad(lineno, "malformed alloc initializer");
    is.type = {base_from_name(w[i + 1], lineno), true};
    if (w[i + 2] != "size") bad(lineno, "expected 'size'");
    size_t j = i + 3;
    if (w[j] == "nondet") {
        if (j + 2 >= w.size()) bad(lineno, "alloc size nondet needs two bounds");
        is.size_fixed = false;
        is.size_lo = parse_int(w[j + 1], lineno);
        is.size_hi = parse_int(w[j + 2], lineno);
        j += 3;
    } else if (w[j] == "fixed") {
        if (j + 1 >= w.size()) bad(lineno, "alloc size fixed needs a value");
        is.size_fixed = true;
        is.size_lo = is.size_hi = parse_int(w[j + 1], lineno);
        j += 2;
    } else {
        bad(lineno, "expected 'nondet' or 'fixed' after 'size'");
    }
    if (is.size_lo < (is.size_fixed ? 1 : 0) || is.size_hi < is.size_lo)
        bad(lineno, "bad allocation size range");
    while (j < w.size()) {
        if (w[j] == "as") {
            if (j + 1 >= w.size()) bad(lineno, "'as' needs a symbol name");
            is.size_symbol = w[j + 1];
            j += 2;
        } else if (w[j] == "maybe-null") {
            is.assume_not_null = false;
            ++j;
        } else {
            bad(lineno, "unexpected token '" + w[j] + "'");
        }
    }
    return is;
}

PreconditionTerm parse_pre(const std::vector<std::string>& w, size_t lineno) {
    // w = {"pre", cat, subj, rel, rest...}
    if (w.size() < 5) bad(lineno, "malformed precondition");
    PreconditionTerm p;
    p.category = precat_from_name(w[1]);
    p.subjects.push_back(w[2]);
    p.rel = rel_from_name(w[3]);
    switch (p.category) {
        case PreCat::PointerNotNull:
            if (w[4] != "NULL" || p.rel != Rel::Ne)
                bad(lineno, "pointer-not-null must be '<ptr> != NULL'");
            break;
        case PreCat::VariableConstant:
            p.constant = parse_int(w[4], lineno);
            break;
        case PreCat::VariableVariable:
            p.subjects.push_back(w[4]);
            break;
        case PreCat::PointerOffset:
            p.subjects.push_back(w[4]);
            if (w.size() == 7 && w[5] == "+")
                p.constant = parse_int(w[6], lineno);
            else if (w.size() != 5)
                bad(lineno, "malformed pointer-offset precondition");
            break;
    }
    if ((p.category == PreCat::PointerNotNull || p.category == PreCat::VariableConstant) &&
        w.size() != 5)
        bad(lineno, "trailing tokens in precondition");
    return p;
}

} // namespace

std::string initspec_to_text(const InitSpec& spec) { return initspec_text(spec); }

InitSpec initspec_from_text(const std::string& text) {
    auto w = split_ws(text);
    return parse_initspec(w, 0, 0);
}

std::string precondition_to_text(const PreconditionTerm& term) { return pre_text(term); }

PreconditionTerm precondition_from_text(const std::string& line) {
    auto w = split_ws(line);
    if (w.empty() || w[0] != "pre") throw InputError("precondition must start with 'pre'");
    return parse_pre(w, 0);
}

UnitProof parse_manifest(const std::string& text) {
    LineReader rd(text);
    UnitProof proof;
    proof.bounds.default_bound = 1;
    bool saw_version = false;
    std::string section;
    // Model-block ret preconditions (subject "ret") convert to ret_of terms and
    // are appended after the explicit pre lines of the [env] section.
    std::vector<PreconditionTerm> model_pres;

    for (size_t i = 0; i < rd.lines.size(); ++i) {
        std::string line = trim(rd.lines[i]);
        if (line.empty() || line[0] == '#') continue;
        if (line.front() == '[' && line.back() == ']') {
            section = line.substr(1, line.size() - 2);
            if (section != "scope" && section != "bounds" && section != "env" &&
                section != "harness")
                bad(i, "unknown section [" + section + "]");
            continue;
        }
        if (!saw_version) {
            auto w = split_ws(line);
            if (w.size() != 3 || w[0] != "manifest-version" || w[1] != "=")
                bad(i, "expected 'manifest-version = <n>' first");
            proof.manifest_version = static_cast<int>(parse_int(w[2], i));
            saw_version = true;
            continue;
        }
        if (section == "scope") {
            auto eq = line.find('=');
            if (eq == std::string::npos) bad(i, "expected 'key = value'");
            std::string key = trim(line.substr(0, eq));
            std::string val = trim(line.substr(eq + 1));
            if (key == "entry") proof.scope.entry = val;
            else if (key == "entry-file") proof.scope.entry_file = val;
            else if (key == "level") proof.scope.level = static_cast<int>(parse_int(val, i));
            else if (key == "functions")
                for (const auto& f : split_list(val)) proof.scope.functions.insert(f);
            else if (key == "files")
                for (const auto& f : split_list(val)) proof.scope.files.insert(f);
            else bad(i, "unknown scope key '" + key + "'");
            continue;
        }
        if (section == "bounds") {
            auto eq = line.find('=');
            if (eq == std::string::npos) bad(i, "expected '<loop> = <bound>'");
            std::string key = trim(line.substr(0, eq));
            int64_t v = parse_int(trim(line.substr(eq + 1)), i);
            if (v < 1) bad(i, "loop bound must be >= 1, got " + std::to_string(v));
            if (key == "default") proof.bounds.default_bound = static_cast<int>(v);
            else proof.bounds.bounds[key] = static_cast<int>(v);
            continue;
        }
        if (section == "env") {
            auto w = split_ws(line);
            if (w.empty()) continue;
            if (w[0] == "input") {
                if (w.size() < 4 || w[2] != "=") bad(i, "expected 'input <param> = <init>'");
                InitSpec is = parse_initspec(w, 3, i);
                is.param = w[1];
                proof.env.input_model.push_back(std::move(is));
            } else if (w[0] == "config") {
                if (w.size() != 4 || w[2] != "=") bad(i, "expected 'config <name> = <int>'");
                proof.env.config_overrides[w[1]] = parse_int(w[3], i);
            } else if (w[0] == "pre") {
                proof.env.preconditions.push_back(parse_pre(w, i));
            } else if (w[0] == "model") {
                // model <name> : typeN { return <init>; havoc <p>; pre ... ; }
                if (w.size() < 5 || w[2] != ":") bad(i, "malformed model line");
                FunctionModel m;
                m.name = w[1];
                auto lb = line.find('{');
                auto rb = line.rfind('}');
                if (lb == std::string::npos || rb == std::string::npos || rb < lb)
                    bad(i, "model body must be on one line in braces");
                std::string body = line.substr(lb + 1, rb - lb - 1);
                for (std::string clause : split_on_semi(body)) {
                    clause = trim(clause);
                    if (clause.empty()) continue;
                    auto cw = split_ws(clause);
                    if (cw[0] == "return") {
                        m.ret = parse_initspec(cw, 1, i);
                    } else if (cw[0] == "havoc") {
                        if (cw.size() != 2) bad(i, "'havoc' needs one parameter name");
                        m.havoc_params.push_back(cw[1]);
                    } else if (cw[0] == "pre") {
                        if (cw.size() >= 3 && cw[2] == "ret") cw[2] = "ret_of(" + m.name + ")";
                        model_pres.push_back(parse_pre(cw, i));
                    } else {
                        bad(i, "unknown model clause '" + cw[0] + "'");
                    }
                }
                proof.env.function_models[m.name] = std::move(m);
            } else {
                bad(i, "unknown env line '" + w[0] + "'");
            }
            continue;
        }
        if (section == "harness") {
            if (line != "---harness---") bad(i, "expected harness fence");
            size_t j = i + 1;
            std::string h;
            bool closed = false;
            for (; j < rd.lines.size(); ++j) {
                if (trim(rd.lines[j]) == "---harness---") {
                    closed = true;
                    break;
                }
                h += rd.lines[j];
                h += "\n";
            }
            if (!closed) bad(i, "unterminated harness block");
            proof.harness = h;
            i = j;
            continue;
        }
        bad(i, "content outside any section");
    }
    if (!saw_version) throw InputError("manifest is missing 'manifest-version'");
    if (proof.scope.entry.empty()) throw InputError("manifest is missing scope entry");
    if (proof.harness.empty()) throw InputError("manifest is missing a harness");
    for (auto& p : model_pres) proof.env.preconditions.push_back(std::move(p));
    return proof;
}

} // namespace soup

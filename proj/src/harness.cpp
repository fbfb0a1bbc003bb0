#include "soup/harness.hpp"

#include <sstream>

#include "soup/callgraph.hpp"
#include "soup/diag.hpp"

namespace soup {

namespace {

const char* nondet_name(Base b) {
    switch (b) {
        case Base::U8: return "nondet_u8";
        case Base::U32: return "nondet_u32";
        case Base::I32: return "nondet_i32";
        case Base::Size: return "nondet_size";
        case Base::Void: break;
    }
    throw InternalError("no nondet intrinsic for void");
}

} // namespace

HarnessResult synthesize_input_model(const FunctionDef& entry, const DomainConfig& domains) {
    HarnessResult out;
    std::ostringstream os;
    os << "void harness() {\n";
    std::vector<std::string> args;
    for (const auto& p : entry.params) {
        InitSpec is;
        is.param = p.name;
        is.type = p.type;
        if (!p.type.ptr) {
            os << "    " << type_name(p.type) << " " << p.name << " = "
               << nondet_name(p.type.base) << "();\n";
        } else {
            is.size_lo = 1;
            is.size_hi = domains.alloc_cap;
            is.size_symbol = p.name + "_size";
            is.assume_not_null = true;
            os << "    size_t " << is.size_symbol << " = nondet_size();\n";
            os << "    assume(" << is.size_symbol << " >= 1);\n";
            os << "    assume(" << is.size_symbol << " <= " << domains.alloc_cap << ");\n";
            os << "    " << type_name(p.type) << " " << p.name << " = malloc("
               << is.size_symbol << ");\n";
            os << "    assume(" << p.name << " != NULL);\n";
        }
        out.inputs.push_back(std::move(is));
        args.push_back(p.name);
    }
    os << "    " << entry.name << "(";
    for (size_t i = 0; i < args.size(); ++i) os << (i ? ", " : "") << args[i];
    os << ");\n}\n";
    out.source = os.str();
    return out;
}

std::map<std::string, FunctionModel> model_external_callees(const VerificationScope& scope,
                                                            const ProjectIndex& index,
                                                            const DomainConfig& domains) {
    std::map<std::string, FunctionModel> models;
    CallGraph cg = build_call_graph(index);
    for (const auto& site : cg.sites) {
        if (!scope.functions.count(site.caller) || !scope.files.count(site.caller_file))
            continue;
        const std::string& callee = site.callee;
        if (scope.functions.count(callee) || models.count(callee)) continue;
        const FunctionDef* def = index.resolve(callee, site.caller_file);
        if (!def)
            throw InputError("cannot model external callee with unknown signature: '" +
                             callee + "'");
        FunctionModel m;
        m.name = callee;
        if (def->ret.is_void()) {
            m.ret.type = {Base::Void, false};
        } else if (!def->ret.ptr) {
            m.ret.type = def->ret;
        } else {
            m.ret.type = def->ret;
            m.ret.size_lo = 1;
            m.ret.size_hi = domains.alloc_cap;
        }
        models[callee] = std::move(m);
    }
    return models;
}

} // namespace soup

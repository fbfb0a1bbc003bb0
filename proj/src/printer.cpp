#include "soup/printer.hpp"

#include <sstream>

#include "soup/callgraph.hpp"
#include "soup/diag.hpp"

namespace soup {

namespace {

int prec_of(BinOp b) {
    switch (b) {
        case BinOp::LOr: return 1;
        case BinOp::LAnd: return 2;
        case BinOp::Eq:
        case BinOp::Ne: return 3;
        case BinOp::Lt:
        case BinOp::Le:
        case BinOp::Gt:
        case BinOp::Ge: return 4;
        case BinOp::Shl:
        case BinOp::Shr: return 5;
        case BinOp::Add:
        case BinOp::Sub: return 6;
        case BinOp::Mul:
        case BinOp::Div:
        case BinOp::Mod: return 7;
    }
    return 0;
}

const char* op_text(BinOp b) {
    switch (b) {
        case BinOp::Add: return "+";
        case BinOp::Sub: return "-";
        case BinOp::Mul: return "*";
        case BinOp::Div: return "/";
        case BinOp::Mod: return "%";
        case BinOp::Shl: return "<<";
        case BinOp::Shr: return ">>";
        case BinOp::Lt: return "<";
        case BinOp::Le: return "<=";
        case BinOp::Gt: return ">";
        case BinOp::Ge: return ">=";
        case BinOp::Eq: return "==";
        case BinOp::Ne: return "!=";
        case BinOp::LAnd: return "&&";
        case BinOp::LOr: return "||";
    }
    return "?";
}

void emit_expr(std::ostream& os, const Expr& e, int parent_prec) {
    switch (e.kind) {
        case ExprKind::IntLit: os << e.ival; return;
        case ExprKind::NullLit: os << "NULL"; return;
        case ExprKind::Ident: os << e.name; return;
        case ExprKind::Unary: {
            const char* op = e.un == UnOp::Neg ? "-" : e.un == UnOp::Not ? "!" : "*";
            os << op;
            os << "(";
            emit_expr(os, *e.a, 0);
            os << ")";
            return;
        }
        case ExprKind::Binary: {
            int p = prec_of(e.bin);
            bool paren = p < parent_prec;
            if (paren) os << "(";
            emit_expr(os, *e.a, p);
            os << " " << op_text(e.bin) << " ";
            emit_expr(os, *e.b, p + 1);
            if (paren) os << ")";
            return;
        }
        case ExprKind::Index:
            emit_expr(os, *e.a, 100);
            os << "[";
            emit_expr(os, *e.b, 0);
            os << "]";
            return;
        case ExprKind::Call: {
            os << e.name << "(";
            bool first = true;
            for (const auto& a : e.args) {
                if (!first) os << ", ";
                first = false;
                emit_expr(os, *a, 0);
            }
            os << ")";
            return;
        }
    }
}

void emit_decl(std::ostream& os, const VarDecl& d) {
    os << type_name(d.type) << " " << d.name;
    if (d.array_len >= 0) os << "[" << d.array_len << "]";
    if (d.init) {
        os << " = ";
        emit_expr(os, *d.init, 0);
    }
    os << ";";
}

void emit_block(std::ostream& os, const std::vector<StmtPtr>& body, int indent);

void emit_stmt(std::ostream& os, const Stmt& s, int indent) {
    std::string pad(static_cast<size_t>(indent) * 4, ' ');
    os << pad;
    switch (s.kind) {
        case StmtKind::Decl:
            emit_decl(os, s.decl);
            os << "\n";
            return;
        case StmtKind::Assign:
            emit_expr(os, *s.lhs, 0);
            os << " = ";
            emit_expr(os, *s.rhs, 0);
            os << ";\n";
            return;
        case StmtKind::If:
            os << "if (";
            emit_expr(os, *s.cond, 0);
            os << ") {\n";
            emit_block(os, s.body, indent + 1);
            os << pad << "}";
            if (!s.els.empty()) {
                os << " else {\n";
                emit_block(os, s.els, indent + 1);
                os << pad << "}";
            }
            os << "\n";
            return;
        case StmtKind::While:
            os << "while (";
            emit_expr(os, *s.cond, 0);
            os << ") {\n";
            emit_block(os, s.body, indent + 1);
            os << pad << "}\n";
            return;
        case StmtKind::For: {
            os << "for (";
            if (s.init_stmt) {
                std::ostringstream tmp;
                emit_stmt(tmp, *s.init_stmt, 0);
                std::string txt = tmp.str();
                // strip trailing "\n" and the statement's own ";"
                while (!txt.empty() && (txt.back() == '\n' || txt.back() == ';')) txt.pop_back();
                os << txt;
            }
            os << "; ";
            emit_expr(os, *s.cond, 0);
            os << "; ";
            if (s.step_stmt) {
                emit_expr(os, *s.step_stmt->lhs, 0);
                os << " = ";
                emit_expr(os, *s.step_stmt->rhs, 0);
            }
            os << ") {\n";
            emit_block(os, s.body, indent + 1);
            os << pad << "}\n";
            return;
        }
        case StmtKind::Return:
            os << "return";
            if (s.cond) {
                os << " ";
                emit_expr(os, *s.cond, 0);
            }
            os << ";\n";
            return;
        case StmtKind::Assume:
        case StmtKind::Assert:
            os << (s.kind == StmtKind::Assume ? "assume(" : "assert(");
            emit_expr(os, *s.cond, 0);
            os << ");\n";
            return;
        case StmtKind::Free:
            os << "free(";
            emit_expr(os, *s.cond, 0);
            os << ");\n";
            return;
        case StmtKind::Memcpy:
        case StmtKind::Memset:
            os << (s.kind == StmtKind::Memcpy ? "memcpy(" : "memset(");
            emit_expr(os, *s.lhs, 0);
            os << ", ";
            emit_expr(os, *s.rhs, 0);
            os << ", ";
            emit_expr(os, *s.n, 0);
            os << ");\n";
            return;
        case StmtKind::CallStmt:
            emit_expr(os, *s.call, 0);
            os << ";\n";
            return;
        case StmtKind::SaturationProbe:
            throw InternalError("saturation probe is not printable source");
    }
}

void emit_block(std::ostream& os, const std::vector<StmtPtr>& body, int indent) {
    for (const auto& s : body) emit_stmt(os, *s, indent);
}

} // namespace

std::string print_expr(const Expr& e) {
    std::ostringstream os;
    emit_expr(os, e, 0);
    return os.str();
}

std::string print_stmt(const Stmt& s, int indent) {
    std::ostringstream os;
    emit_stmt(os, s, indent);
    return os.str();
}

std::string print_function(const FunctionDef& fn) {
    std::ostringstream os;
    os << type_name(fn.ret) << " " << fn.name << "(";
    bool first = true;
    for (const auto& p : fn.params) {
        if (!first) os << ", ";
        first = false;
        os << type_name(p.type) << " " << p.name;
    }
    os << ") {\n";
    emit_block(os, fn.body, 1);
    os << "}\n";
    return os.str();
}

std::string print_unit(const ProjectIndex& index, const std::string& path) {
    std::ostringstream os;
    for (const auto& [name, c] : index.configs) {
        if (c.file != path) continue;
        os << "config " << c.name;
        if (c.candidates) {
            os << " in {";
            bool first = true;
            for (int64_t v : *c.candidates) {
                if (!first) os << ", ";
                first = false;
                os << v;
            }
            os << "}";
        }
        os << " = " << c.value << ";\n";
    }
    for (const auto& g : index.globals) {
        if (g.file != path) continue;
        emit_decl(os, g.decl);
        os << "\n";
    }
    for (const auto& fn : index.functions) {
        if (fn->file != path) continue;
        os << "\n" << print_function(*fn);
    }
    return os.str();
}

} // namespace soup

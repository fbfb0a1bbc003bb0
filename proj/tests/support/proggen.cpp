#include "proggen.hpp"

#include <random>
#include <sstream>
#include <vector>

namespace soup::testing {

namespace {

class Gen {
public:
    explicit Gen(uint32_t seed) : rng_(seed) {}

    std::string program() {
        std::ostringstream out;
        int nparams = pick(1, 3);
        const char* types[] = {"u8", "u32", "i32", "size_t"};
        std::vector<std::string> params;
        out << "i32 f(";
        for (int i = 0; i < nparams; ++i) {
            std::string name(1, static_cast<char>('a' + i));
            if (i) out << ", ";
            out << types[pick(0, 3)] << " " << name;
            params.push_back(name);
            scalars_.push_back(name);
        }
        out << ") {\n";
        out << "    i32 x = " << pick(0, 9) << ";\n";
        scalars_.push_back("x");
        if (chance(2)) {
            arr_len_ = pick(2, 6);
            out << "    u8 arr[" << arr_len_ << "];\n";
        }
        int nstmts = pick(3, 7);
        for (int i = 0; i < nstmts; ++i) stmt(out, 1);
        out << "    return x;\n";
        out << "}\n";
        return out.str();
    }

private:
    std::mt19937 rng_;
    std::vector<std::string> scalars_;
    int arr_len_ = 0;
    int next_local_ = 0;
    int next_loopvar_ = 0;

    int pick(int lo, int hi) {
        return std::uniform_int_distribution<int>(lo, hi)(rng_);
    }
    bool chance(int one_in) { return pick(1, one_in) == 1; }

    std::string indent(int d) { return std::string(static_cast<size_t>(d) * 4, ' '); }

    std::string atom() {
        int r = pick(0, 3);
        if (r == 0) return std::to_string(pick(0, 12));
        return scalars_[static_cast<size_t>(pick(0, static_cast<int>(scalars_.size()) - 1))];
    }

    std::string expr(int depth) {
        if (depth <= 0 || chance(3)) {
            if (arr_len_ > 0 && chance(5)) return "arr[" + atom() + "]";
            return atom();
        }
        const char* ops[] = {"+", "-", "*", "/", "%", "<<", ">>"};
        int op = pick(0, 6);
        std::string lhs = expr(depth - 1);
        std::string rhs;
        if (op >= 3) {
            // Divisor / shift distance: usually a safe constant, sometimes a
            // variable so the properties can fail.
            rhs = chance(3) ? atom() : std::to_string(op >= 5 ? pick(0, 7) : pick(1, 7));
        } else {
            rhs = expr(depth - 1);
        }
        return "(" + lhs + " " + ops[op] + " " + rhs + ")";
    }

    std::string cmp() {
        const char* rels[] = {"<", "<=", ">", ">=", "==", "!="};
        return expr(1) + " " + rels[pick(0, 5)] + " " + expr(1);
    }

    void stmt(std::ostringstream& out, int depth) {
        int r = pick(0, 9);
        if (r <= 2) {
            out << indent(depth) << scalars_[static_cast<size_t>(
                       pick(0, static_cast<int>(scalars_.size()) - 1))]
                << " = " << expr(2) << ";\n";
        } else if (r == 3 && depth == 1) {
            std::string v = "v" + std::to_string(next_local_++);
            const char* types[] = {"u8", "u32", "i32"};
            out << indent(depth) << types[pick(0, 2)] << " " << v << " = " << expr(2)
                << ";\n";
            scalars_.push_back(v);
        } else if (r == 4 && arr_len_ > 0) {
            out << indent(depth) << "arr[" << expr(1) << "] = " << expr(1) << ";\n";
        } else if (r <= 6 && depth < 3) {
            out << indent(depth) << "if (" << cmp() << ") {\n";
            stmt(out, depth + 1);
            if (chance(2)) {
                out << indent(depth) << "} else {\n";
                stmt(out, depth + 1);
            }
            out << indent(depth) << "}\n";
        } else if (r == 7 && depth < 3) {
            std::string i = "i" + std::to_string(next_loopvar_++);
            int k = pick(1, 4);
            out << indent(depth) << "for (i32 " << i << " = 0; " << i << " < " << k << "; "
                << i << " = " << i << " + 1) {\n";
            scalars_.push_back(i);
            stmt(out, depth + 1);
            scalars_.pop_back();
            out << indent(depth) << "}\n";
        } else if (r == 8 && depth < 3) {
            std::string i = "i" + std::to_string(next_loopvar_++);
            int k = pick(1, 4);
            out << indent(depth) << "i32 " << i << " = 0;\n";
            out << indent(depth) << "while (" << i << " < " << k << ") {\n";
            scalars_.push_back(i);
            stmt(out, depth + 1);
            out << indent(depth + 1) << i << " = " << i << " + 1;\n";
            scalars_.pop_back();
            out << indent(depth) << "}\n";
        } else {
            out << indent(depth) << "assert(" << cmp() << ");\n";
        }
    }
};

} // namespace

std::string generate_program(uint32_t seed) { return Gen(seed).program(); }

} // namespace soup::testing

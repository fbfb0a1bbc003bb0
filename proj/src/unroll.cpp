#include "soup/unroll.hpp"

#include "soup/diag.hpp"

namespace soup {

namespace {

StmtPtr expand_loop(const Stmt& loop, const LoopBoundMap& bounds,
                    const std::vector<StmtPtr>& transformed_body);

std::vector<StmtPtr> transform(const std::vector<StmtPtr>& body, const LoopBoundMap& bounds) {
    std::vector<StmtPtr> out;
    for (const auto& s : body) {
        switch (s->kind) {
            case StmtKind::If: {
                auto copy = std::make_shared<Stmt>(*s);
                copy->body = transform(s->body, bounds);
                copy->els = transform(s->els, bounds);
                out.push_back(copy);
                break;
            }
            case StmtKind::While:
            case StmtKind::For: {
                if (s->kind == StmtKind::For && s->init_stmt) out.push_back(s->init_stmt);
                out.push_back(expand_loop(*s, bounds, transform(s->body, bounds)));
                break;
            }
            default:
                out.push_back(s);
                break;
        }
    }
    return out;
}

StmtPtr expand_loop(const Stmt& loop, const LoopBoundMap& bounds,
                    const std::vector<StmtPtr>& transformed_body) {
    int bound = bounds.bound_of(loop.loop_id);
    if (bound < 1) throw InternalError("loop bound below 1 for " + loop.loop_id);

    auto probe = std::make_shared<Stmt>();
    probe->kind = StmtKind::SaturationProbe;
    probe->line = loop.line;
    probe->site = loop.site;
    probe->loop_id = loop.loop_id;

    // Innermost first: If(guard) { probe }
    auto chain = std::make_shared<Stmt>();
    chain->kind = StmtKind::If;
    chain->line = loop.line;
    chain->site = loop.site;
    chain->cond = loop.cond;
    chain->body = {probe};

    for (int k = 0; k < bound; ++k) {
        auto iter = std::make_shared<Stmt>();
        iter->kind = StmtKind::If;
        iter->line = loop.line;
        iter->site = loop.site;
        iter->cond = loop.cond;
        iter->body = transformed_body; // shared across copies; statements are immutable
        if (loop.kind == StmtKind::For && loop.step_stmt)
            iter->body.push_back(loop.step_stmt);
        iter->body.push_back(chain);
        chain = iter;
    }
    return chain;
}

} // namespace

std::vector<StmtPtr> unroll_body(const std::vector<StmtPtr>& body, const LoopBoundMap& bounds) {
    return transform(body, bounds);
}

} // namespace soup

#include "cbnlab/translate.hpp"

namespace cbnlab {
namespace {

bool translate_stmt(const StmtNPtr& s, Program& out, std::string& err);

bool translate_chain(const StmtNPtr& chain, Program& out, std::string& err) {
    StmtNPtr cur = chain;
    while (cur->kind == StmtN::Kind::Seq) {
        if (cur->a->kind == StmtN::Kind::Seq) {
            err = "sequence in head position (input is not canonical)";
            return false;
        }
        if (cur->a->kind != StmtN::Kind::Snil) {
            if (!translate_stmt(cur->a, out, err)) return false;
        }
        cur = cur->b;
    }
    if (cur->kind == StmtN::Kind::Snil) return true;
    return translate_stmt(cur, out, err);
}

bool translate_stmt(const StmtNPtr& s, Program& out, std::string& err) {
    switch (s->kind) {
        case StmtN::Kind::Assign:
            out.push_back(StmtL::assign(s->addr, s->expr));
            return true;
        case StmtN::Kind::If: {
            Program t, f;
            if (!translate_chain(s->a, t, err)) return false;
            if (!translate_chain(s->b, f, err)) return false;
            out.push_back(StmtL::ifelse(s->expr, std::move(t), std::move(f)));
            return true;
        }
        case StmtN::Kind::While: {
            Program b;
            if (!translate_chain(s->a, b, err)) return false;
            out.push_back(StmtL::loop(s->expr, std::move(b)));
            return true;
        }
        case StmtN::Kind::Call:
            out.push_back(StmtL::call(s->fun));
            return true;
        case StmtN::Kind::Throw:
            out.push_back(StmtL::throw_());
            return true;
        case StmtN::Kind::Snil:
            return true;
        case StmtN::Kind::Seq:
            err = "sequence in head position (input is not canonical)";
            return false;
    }
    err = "unreachable statement kind";
    return false;
}

StmtNPtr nested_stmt(const StmtLPtr& s) {
    switch (s->kind) {
        case StmtL::Kind::Assign: return StmtN::assign(s->addr, s->expr);
        case StmtL::Kind::If:
            return StmtN::ifelse(s->expr, translate_to_nested(s->then_block),
                                 translate_to_nested(s->else_block));
        case StmtL::Kind::While: return StmtN::loop(s->expr, translate_to_nested(s->body));
        case StmtL::Kind::Call: return StmtN::call(s->fun);
        case StmtL::Kind::Throw: return StmtN::throw_();
    }
    return StmtN::snil();
}

// Flattens any Seq tree into the ordered non-Snil statements, canonicalizing
// each statement's children along the way.
void flatten(const StmtNPtr& s, std::vector<StmtNPtr>& out) {
    switch (s->kind) {
        case StmtN::Kind::Seq:
            flatten(s->a, out);
            flatten(s->b, out);
            return;
        case StmtN::Kind::Snil: return;
        case StmtN::Kind::If:
            out.push_back(StmtN::ifelse(s->expr, canonicalize(s->a), canonicalize(s->b)));
            return;
        case StmtN::Kind::While:
            out.push_back(StmtN::loop(s->expr, canonicalize(s->a)));
            return;
        default: out.push_back(s); return;
    }
}

} // namespace

TranslateResult translate_to_list(const StmtNPtr& s) {
    Program out;
    std::string err;
    if (!translate_chain(s, out, err)) return {std::nullopt, err};
    return {std::move(out), ""};
}

StmtNPtr translate_to_nested(const Program& p) {
    StmtNPtr tail = StmtN::snil();
    for (auto it = p.rbegin(); it != p.rend(); ++it) tail = StmtN::seq(nested_stmt(*it), tail);
    return tail;
}

StmtNPtr canonicalize(const StmtNPtr& s) {
    std::vector<StmtNPtr> items;
    flatten(s, items);
    StmtNPtr tail = StmtN::snil();
    for (auto it = items.rbegin(); it != items.rend(); ++it) tail = StmtN::seq(*it, tail);
    return tail;
}

} // namespace cbnlab

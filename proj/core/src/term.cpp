#include "cbnlab/term.hpp"

#include <algorithm>
#include <mutex>
#include <unordered_map>

namespace cbnlab {

namespace {

struct Interner {
    std::mutex mu;
    std::unordered_map<std::string, std::uint32_t> ids;
    std::vector<std::string> names;
};

Interner& interner() {
    static Interner inst;
    return inst;
}

using IdSet = std::vector<std::uint32_t>;

bool id_contains(const IdSet& s, std::uint32_t id) {
    return std::binary_search(s.begin(), s.end(), id);
}

IdSet id_union(const IdSet& a, const IdSet& b) {
    if (a.empty()) return b;
    if (b.empty()) return a;
    IdSet out;
    out.reserve(a.size() + b.size());
    std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
    return out;
}

void id_remove(IdSet& s, std::uint32_t id) {
    auto it = std::lower_bound(s.begin(), s.end(), id);
    if (it != s.end() && *it == id) s.erase(it);
}

std::shared_ptr<Term> blank(TermKind k) {
    auto t = std::make_shared<Term>();
    t->kind = k;
    return t;
}

} // namespace

std::uint32_t intern(std::string_view name) {
    auto& I = interner();
    std::lock_guard<std::mutex> g(I.mu);
    auto it = I.ids.find(std::string(name));
    if (it != I.ids.end()) return it->second;
    std::uint32_t id = static_cast<std::uint32_t>(I.names.size());
    I.names.emplace_back(name);
    I.ids.emplace(I.names.back(), id);
    return id;
}

const std::string& intern_name(std::uint32_t id) {
    auto& I = interner();
    std::lock_guard<std::mutex> g(I.mu);
    return I.names.at(id);
}

TermPtr mkVar(std::string name) {
    auto t = blank(TermKind::Var);
    t->fvs = {intern(name)};
    t->name = std::move(name);
    return t;
}

TermPtr mkConst(std::string name) {
    auto t = blank(TermKind::ConstRef);
    t->name = std::move(name);
    return t;
}

TermPtr mkLam(std::string binder, TermPtr body) {
    auto t = blank(TermKind::Lam);
    t->size = 1 + term_size(body);
    t->fvs = body->fvs;
    id_remove(t->fvs, intern(binder));
    t->name = std::move(binder);
    t->a = std::move(body);
    return t;
}

TermPtr mkApp(TermPtr fn, TermPtr arg) {
    auto t = blank(TermKind::App);
    t->size = 1 + term_size(fn) + term_size(arg);
    t->fvs = id_union(fn->fvs, arg->fvs);
    t->a = std::move(fn);
    t->b = std::move(arg);
    return t;
}

TermPtr mkApps(TermPtr fn, const std::vector<TermPtr>& args) {
    TermPtr cur = std::move(fn);
    for (const auto& a : args) cur = mkApp(cur, a);
    return cur;
}

TermPtr mkLet(std::string binder, TermPtr value, TermPtr body) {
    auto t = blank(TermKind::Let);
    t->size = 1 + term_size(value) + term_size(body);
    IdSet inner = body->fvs;
    id_remove(inner, intern(binder));
    t->fvs = id_union(value->fvs, inner);
    t->name = std::move(binder);
    t->a = std::move(value);
    t->b = std::move(body);
    return t;
}

TermPtr mkCtor(std::string tag, std::vector<TermPtr> args) {
    auto t = blank(TermKind::Ctor);
    std::uint64_t sz = 1;
    IdSet fv;
    for (const auto& a : args) {
        sz += term_size(a);
        fv = id_union(fv, a->fvs);
    }
    t->size = sz;
    t->fvs = std::move(fv);
    t->tag = std::move(tag);
    t->ctor_args = std::move(args);
    return t;
}

TermPtr mkMatch(TermPtr scrutinee, std::vector<MatchBranch> branches, TermPtr fallback) {
    auto t = blank(TermKind::Match);
    std::uint64_t sz = 1 + term_size(scrutinee);
    IdSet fv = scrutinee->fvs;
    for (const auto& br : branches) {
        sz += term_size(br.body);
        IdSet inner = br.body->fvs;
        for (const auto& x : br.binders) id_remove(inner, intern(x));
        fv = id_union(fv, inner);
    }
    if (fallback) {
        sz += term_size(fallback);
        fv = id_union(fv, fallback->fvs);
    }
    t->size = sz;
    t->fvs = std::move(fv);
    t->a = std::move(scrutinee);
    t->b = std::move(fallback);
    t->branches = std::move(branches);
    return t;
}

TermPtr mkFix(std::string self, std::vector<std::string> params, std::size_t struct_index,
              TermPtr body) {
    auto t = blank(TermKind::Fix);
    t->size = 1 + term_size(body);
    IdSet fv = body->fvs;
    id_remove(fv, intern(self));
    for (const auto& p : params) id_remove(fv, intern(p));
    t->fvs = std::move(fv);
    t->name = std::move(self);
    t->params = std::move(params);
    t->struct_index = struct_index;
    t->a = std::move(body);
    return t;
}

bool has_free(const TermPtr& t, std::uint32_t id) { return id_contains(t->fvs, id); }

std::string fresh_name(std::string_view base) {
    static std::atomic<std::uint64_t> counter{0};
    std::string out(base);
    std::size_t cut = out.find('$');
    if (cut != std::string::npos) out.resize(cut);
    out += '$';
    out += std::to_string(counter.fetch_add(1, std::memory_order_relaxed));
    return out;
}

namespace {

struct Sub {
    std::uint32_t id;
    TermPtr value;
};

bool relevant(const IdSet& fvs, const std::vector<Sub>& subs) {
    for (const auto& s : subs)
        if (id_contains(fvs, s.id)) return true;
    return false;
}

TermPtr apply_subs(const TermPtr& t, const std::vector<Sub>& subs);

// removes the binder from the substitution and renames it when any live
// replacement term would capture it; returns the effective binder name
std::string under_binder(const std::string& binder, TermPtr& body, std::vector<Sub>& subs) {
    std::uint32_t bid = intern(binder);
    std::vector<Sub> live;
    bool capture = false;
    for (const auto& s : subs) {
        if (s.id == bid) continue;
        if (!id_contains(body->fvs, s.id)) continue;
        live.push_back(s);
        if (id_contains(s.value->fvs, bid)) capture = true;
    }
    subs = std::move(live);
    if (!capture) return binder;
    std::string nb = fresh_name(binder);
    body = apply_subs(body, {Sub{bid, mkVar(nb)}});
    return nb;
}

TermPtr apply_subs(const TermPtr& t, const std::vector<Sub>& subs) {
    if (subs.empty() || !relevant(t->fvs, subs)) return t;
    switch (t->kind) {
        case TermKind::Var: {
            std::uint32_t id = intern(t->name);
            for (const auto& s : subs)
                if (s.id == id) return s.value;
            return t;
        }
        case TermKind::ConstRef: return t;
        case TermKind::App: return mkApp(apply_subs(t->a, subs), apply_subs(t->b, subs));
        case TermKind::Ctor: {
            std::vector<TermPtr> args;
            args.reserve(t->ctor_args.size());
            for (const auto& a : t->ctor_args) args.push_back(apply_subs(a, subs));
            return mkCtor(t->tag, std::move(args));
        }
        case TermKind::Lam: {
            TermPtr body = t->a;
            std::vector<Sub> inner = subs;
            std::string nb = under_binder(t->name, body, inner);
            return mkLam(nb, apply_subs(body, inner));
        }
        case TermKind::Let: {
            TermPtr value = apply_subs(t->a, subs);
            TermPtr body = t->b;
            std::vector<Sub> inner = subs;
            std::string nb = under_binder(t->name, body, inner);
            return mkLet(nb, std::move(value), apply_subs(body, inner));
        }
        case TermKind::Match: {
            TermPtr scrut = apply_subs(t->a, subs);
            std::vector<MatchBranch> brs;
            brs.reserve(t->branches.size());
            for (const auto& br : t->branches) {
                TermPtr body = br.body;
                std::vector<Sub> inner = subs;
                std::vector<std::string> binders = br.binders;
                for (auto& bn : binders) bn = under_binder(bn, body, inner);
                brs.push_back({br.tag, std::move(binders), apply_subs(body, inner)});
            }
            TermPtr def = t->b ? apply_subs(t->b, subs) : nullptr;
            return mkMatch(std::move(scrut), std::move(brs), std::move(def));
        }
        case TermKind::Fix: {
            TermPtr body = t->a;
            std::vector<Sub> inner = subs;
            std::string self = under_binder(t->name, body, inner);
            std::vector<std::string> params = t->params;
            for (auto& p : params) p = under_binder(p, body, inner);
            return mkFix(std::move(self), std::move(params), t->struct_index,
                         apply_subs(body, inner));
        }
    }
    return t;
}

} // namespace

TermPtr substitute(const TermPtr& t, const std::string& x, const TermPtr& v) {
    return apply_subs(t, {Sub{intern(x), v}});
}

TermPtr subst_multi(const TermPtr& t, const std::vector<std::pair<std::string, TermPtr>>& subs) {
    std::vector<Sub> ss;
    ss.reserve(subs.size());
    for (const auto& [x, v] : subs) ss.push_back({intern(x), v});
    return apply_subs(t, ss);
}

namespace {

bool aeq(const TermPtr& l, const TermPtr& r,
         std::vector<std::pair<std::uint32_t, std::uint32_t>>& env) {
    if (l == r && env.empty()) return true;
    if (l->kind != r->kind) return false;
    switch (l->kind) {
        case TermKind::Var: {
            std::uint32_t a = intern(l->name), b = intern(r->name);
            for (auto it = env.rbegin(); it != env.rend(); ++it) {
                bool la = it->first == a, lb = it->second == b;
                if (la || lb) return la && lb;
            }
            return a == b;
        }
        case TermKind::ConstRef: return l->name == r->name;
        case TermKind::App: return aeq(l->a, r->a, env) && aeq(l->b, r->b, env);
        case TermKind::Lam: {
            env.emplace_back(intern(l->name), intern(r->name));
            bool ok = aeq(l->a, r->a, env);
            env.pop_back();
            return ok;
        }
        case TermKind::Let: {
            if (!aeq(l->a, r->a, env)) return false;
            env.emplace_back(intern(l->name), intern(r->name));
            bool ok = aeq(l->b, r->b, env);
            env.pop_back();
            return ok;
        }
        case TermKind::Ctor: {
            if (l->tag != r->tag || l->ctor_args.size() != r->ctor_args.size()) return false;
            for (std::size_t i = 0; i < l->ctor_args.size(); ++i)
                if (!aeq(l->ctor_args[i], r->ctor_args[i], env)) return false;
            return true;
        }
        case TermKind::Match: {
            if (l->branches.size() != r->branches.size()) return false;
            if (static_cast<bool>(l->b) != static_cast<bool>(r->b)) return false;
            if (!aeq(l->a, r->a, env)) return false;
            for (std::size_t i = 0; i < l->branches.size(); ++i) {
                const auto& bl = l->branches[i];
                const auto& br = r->branches[i];
                if (bl.tag != br.tag || bl.binders.size() != br.binders.size()) return false;
                std::size_t pushed = 0;
                for (std::size_t j = 0; j < bl.binders.size(); ++j, ++pushed)
                    env.emplace_back(intern(bl.binders[j]), intern(br.binders[j]));
                bool ok = aeq(bl.body, br.body, env);
                env.resize(env.size() - pushed);
                if (!ok) return false;
            }
            if (l->b && !aeq(l->b, r->b, env)) return false;
            return true;
        }
        case TermKind::Fix: {
            if (l->params.size() != r->params.size() || l->struct_index != r->struct_index)
                return false;
            std::size_t pushed = 0;
            env.emplace_back(intern(l->name), intern(r->name));
            ++pushed;
            for (std::size_t i = 0; i < l->params.size(); ++i, ++pushed)
                env.emplace_back(intern(l->params[i]), intern(r->params[i]));
            bool ok = aeq(l->a, r->a, env);
            env.resize(env.size() - pushed);
            return ok;
        }
    }
    return false;
}

} // namespace

bool alpha_eq(const TermPtr& lhs, const TermPtr& rhs) {
    std::vector<std::pair<std::uint32_t, std::uint32_t>> env;
    return aeq(lhs, rhs, env);
}

std::pair<TermPtr, std::vector<TermPtr>> decompose_app(const TermPtr& t) {
    std::vector<TermPtr> args;
    TermPtr cur = t;
    while (cur->kind == TermKind::App) {
        args.push_back(cur->b);
        cur = cur->a;
    }
    std::reverse(args.begin(), args.end());
    return {cur, std::move(args)};
}

namespace {

void render(const TermPtr& t, std::string& out, std::size_t max_chars) {
    if (out.size() > max_chars) return;
    switch (t->kind) {
        case TermKind::Var: out += t->name; return;
        case TermKind::ConstRef: out += t->name; return;
        case TermKind::Lam:
            out += "(\\";
            out += t->name;
            out += ". ";
            render(t->a, out, max_chars);
            out += ')';
            return;
        case TermKind::App: {
            out += '(';
            render(t->a, out, max_chars);
            out += ' ';
            render(t->b, out, max_chars);
            out += ')';
            return;
        }
        case TermKind::Let:
            out += "(let ";
            out += t->name;
            out += " = ";
            render(t->a, out, max_chars);
            out += " in ";
            render(t->b, out, max_chars);
            out += ')';
            return;
        case TermKind::Ctor: {
            if (t->ctor_args.empty()) {
                out += t->tag;
                return;
            }
            out += '(';
            out += t->tag;
            for (const auto& a : t->ctor_args) {
                out += ' ';
                render(a, out, max_chars);
            }
            out += ')';
            return;
        }
        case TermKind::Match: {
            out += "(match ";
            render(t->a, out, max_chars);
            out += " {";
            bool first = true;
            for (const auto& br : t->branches) {
                if (!first) out += "; ";
                first = false;
                out += br.tag;
                for (const auto& x : br.binders) {
                    out += ' ';
                    out += x;
                }
                out += " -> ";
                render(br.body, out, max_chars);
            }
            if (t->b) {
                if (!first) out += "; ";
                out += "_ -> ";
                render(t->b, out, max_chars);
            }
            out += "})";
            return;
        }
        case TermKind::Fix: {
            out += "(fix ";
            out += t->name;
            for (const auto& p : t->params) {
                out += ' ';
                out += p;
            }
            out += " -> ";
            render(t->a, out, max_chars);
            out += ')';
            return;
        }
    }
}

} // namespace

std::string to_string(const TermPtr& t, std::size_t max_chars) {
    std::string out;
    render(t, out, max_chars);
    if (out.size() > max_chars) {
        out.resize(max_chars);
        out += "...";
    }
    return out;
}

} // namespace cbnlab

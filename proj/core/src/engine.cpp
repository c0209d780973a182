#include "cbnlab/engine.hpp"

#include <atomic>

namespace cbnlab {

const char* rule_name(RuleTag t) {
    switch (t) {
        case RuleTag::Let: return "let";
        case RuleTag::Beta: return "beta";
        case RuleTag::Iota: return "iota";
        case RuleTag::FixUnfold: return "fix";
        case RuleTag::Delta: return "delta";
    }
    return "?";
}

std::uint64_t DefEnv::next_version() {
    static std::atomic<std::uint64_t> v{1};
    return v.fetch_add(1, std::memory_order_relaxed);
}

bool DefEnv::define(const std::string& name, TermPtr body, bool transparent) {
    if (defs_.count(name)) return false;
    const Term* cur = body.get();
    while (cur->kind == TermKind::ConstRef) {
        if (cur->name == name) return false;
        auto it = defs_.find(cur->name);
        if (it == defs_.end()) break;
        cur = it->second.body.get();
    }
    defs_.emplace(name, Def{std::move(body), transparent});
    version_ = next_version();
    return true;
}

const Def* DefEnv::lookup(const std::string& name) const {
    auto it = defs_.find(name);
    return it == defs_.end() ? nullptr : &it->second;
}

namespace {

std::uint64_t make_stamp(const DefEnv& env, const ReductionPolicy& p) {
    std::uint64_t bits = (p.reduce_under_lambda ? 1u : 0u) | (p.reduce_match_branches ? 2u : 0u) |
                         (p.delta == DeltaMode::Always ? 4u : 0u);
    return (env.version() << 3) | bits;
}

const TermPtr& spine_head(const TermPtr& t) {
    const TermPtr* cur = &t;
    while ((*cur)->kind == TermKind::App) cur = &(*cur)->a;
    return *cur;
}

struct Stepper {
    const DefEnv& env;
    const ReductionPolicy& policy;
    std::uint64_t stamp;
    const std::string& interp_head;  // empty when nesting is off

    RuleTag tag = RuleTag::Let;
    std::string rule_const;
    bool has_name = false;
    bool fired_in_branch = false;
    std::uint32_t nesting = 0;
    std::vector<TermPtr> path;

    void reset() {
        has_name = false;
        fired_in_branch = false;
        nesting = 0;
        path.clear();
    }

    bool is_interp_head(const TermPtr& h) const {
        return (h->kind == TermKind::ConstRef || h->kind == TermKind::Fix) &&
               h->name == interp_head;
    }

    std::uint32_t chain_depth(const TermPtr& t) const {
        if (t->kind != TermKind::App) return 0;
        auto [head, args] = decompose_app(t);
        if (!is_interp_head(head)) return 0;
        std::uint32_t best = 0;
        for (const auto& a : args) best = std::max(best, chain_depth(a));
        return 1 + best;
    }

    void fire(RuleTag tg, const std::string* nm, bool in_br, std::uint32_t roots,
              const TermPtr& result) {
        tag = tg;
        if (nm) {
            rule_const = *nm;
            has_name = true;
        }
        fired_in_branch = in_br;
        if (!interp_head.empty()) nesting = roots + chain_depth(result);
    }

    bool delta_demanded(const TermPtr& body, const std::vector<TermPtr>& args) const {
        if (policy.delta == DeltaMode::Always) return true;
        switch (body->kind) {
            case TermKind::Lam: return !args.empty();
            case TermKind::Fix:
                return args.size() > body->struct_index &&
                       args[body->struct_index]->kind == TermKind::Ctor;
            default: return false;
        }
    }

    TermPtr unfold_fix(const TermPtr& fx, const std::vector<TermPtr>& args) const {
        const auto& ps = fx->params;
        std::size_t k = std::min(ps.size(), args.size());
        std::vector<std::pair<std::string, TermPtr>> subs;
        subs.reserve(ps.size() + 1);
        for (std::size_t i = 0; i < k; ++i) subs.emplace_back(ps[i], args[i]);
        std::vector<std::string> wrap;
        for (std::size_t i = k; i < ps.size(); ++i) {
            wrap.push_back(fresh_name(ps[i]));
            subs.emplace_back(ps[i], mkVar(wrap.back()));
        }
        subs.emplace_back(fx->name, fx);
        TermPtr body = subst_multi(fx->a, subs);
        for (std::size_t i = wrap.size(); i-- > 0;) body = mkLam(wrap[i], body);
        if (args.size() > ps.size())
            body = mkApps(body, std::vector<TermPtr>(args.begin() + static_cast<std::ptrdiff_t>(ps.size()), args.end()));
        return body;
    }

    TermPtr search(const TermPtr& t, bool in_branch, bool parent_is_app_fn,
                   std::uint32_t roots_above) {
        if (t->nf_stamp.load(std::memory_order_relaxed) == stamp) return nullptr;
        TermPtr out;
        switch (t->kind) {
            case TermKind::Var: break;
            case TermKind::ConstRef: {
                if (policy.delta == DeltaMode::Always) {
                    if (const Def* d = env.lookup(t->name); d && d->transparent) {
                        out = d->body;
                        fire(RuleTag::Delta, &t->name, in_branch, roots_above, out);
                    }
                }
                break;
            }
            case TermKind::Lam: {
                if (policy.reduce_under_lambda) {
                    if (TermPtr nb = search(t->a, in_branch, false, roots_above))
                        out = mkLam(t->name, nb);
                }
                break;
            }
            case TermKind::Fix: {
                if (policy.reduce_under_lambda) {
                    if (TermPtr nb = search(t->a, in_branch, false, roots_above))
                        out = mkFix(t->name, t->params, t->struct_index, nb);
                }
                break;
            }
            case TermKind::Let: {
                out = substitute(t->b, t->name, t->a);
                fire(RuleTag::Let, nullptr, in_branch, roots_above, out);
                break;
            }
            case TermKind::App: {
                const TermPtr& fn = t->a;
                if (fn->kind == TermKind::Lam) {
                    out = substitute(fn->a, fn->name, t->b);
                    fire(RuleTag::Beta, nullptr, in_branch, roots_above, out);
                    break;
                }
                bool spine_root = !parent_is_app_fn;
                if (spine_root) {
                    auto [head, args] = decompose_app(t);
                    if (head->kind == TermKind::Fix && args.size() > head->struct_index &&
                        args[head->struct_index]->kind == TermKind::Ctor) {
                        out = unfold_fix(head, args);
                        fire(RuleTag::FixUnfold, &head->name, in_branch, roots_above, out);
                        break;
                    }
                    if (head->kind == TermKind::ConstRef) {
                        if (const Def* d = env.lookup(head->name);
                            d && d->transparent && delta_demanded(d->body, args)) {
                            out = mkApps(d->body, args);
                            fire(RuleTag::Delta, &head->name, in_branch, roots_above, out);
                            break;
                        }
                    }
                }
                std::uint32_t droots = roots_above;
                if (spine_root && !interp_head.empty() && is_interp_head(spine_head(t)))
                    ++droots;
                if (TermPtr nf = search(fn, in_branch, true, droots)) {
                    out = mkApp(nf, t->b);
                    break;
                }
                if (TermPtr na = search(t->b, in_branch, false, droots)) {
                    out = mkApp(fn, na);
                    break;
                }
                break;
            }
            case TermKind::Ctor: {
                for (std::size_t i = 0; i < t->ctor_args.size(); ++i) {
                    if (TermPtr na = search(t->ctor_args[i], in_branch, false, roots_above)) {
                        auto as = t->ctor_args;
                        as[i] = na;
                        out = mkCtor(t->tag, std::move(as));
                        break;
                    }
                }
                break;
            }
            case TermKind::Match: {
                const TermPtr& s = t->a;
                if (s->kind == TermKind::Ctor) {
                    const MatchBranch* hit = nullptr;
                    for (const auto& br : t->branches) {
                        if (br.tag == s->tag && br.binders.size() == s->ctor_args.size()) {
                            hit = &br;
                            break;
                        }
                    }
                    if (hit) {
                        std::vector<std::pair<std::string, TermPtr>> subs;
                        subs.reserve(hit->binders.size());
                        for (std::size_t i = 0; i < hit->binders.size(); ++i)
                            subs.emplace_back(hit->binders[i], s->ctor_args[i]);
                        out = subst_multi(hit->body, subs);
                        fire(RuleTag::Iota, nullptr, in_branch, roots_above, out);
                        break;
                    }
                    if (t->b) {
                        out = t->b;
                        fire(RuleTag::Iota, nullptr, in_branch, roots_above, out);
                        break;
                    }
                } else if (s->kind == TermKind::ConstRef) {
                    if (const Def* d = env.lookup(s->name);
                        d && d->transparent &&
                        (policy.delta == DeltaMode::Always || d->body->kind == TermKind::Ctor)) {
                        out = mkMatch(d->body, t->branches, t->b);
                        fire(RuleTag::Delta, &s->name, in_branch, roots_above, out);
                        break;
                    }
                }
                if (TermPtr ns = search(s, in_branch, false, roots_above)) {
                    out = mkMatch(ns, t->branches, t->b);
                    break;
                }
                if (policy.reduce_match_branches) {
                    for (std::size_t i = 0; i < t->branches.size() && !out; ++i) {
                        if (TermPtr nb = search(t->branches[i].body, true, false, roots_above)) {
                            auto brs = t->branches;
                            brs[i].body = nb;
                            out = mkMatch(s, std::move(brs), t->b);
                        }
                    }
                    if (!out && t->b) {
                        if (TermPtr nd = search(t->b, true, false, roots_above))
                            out = mkMatch(s, t->branches, nd);
                    }
                }
                break;
            }
        }
        if (!out) {
            t->nf_stamp.store(stamp, std::memory_order_relaxed);
            return nullptr;
        }
        path.push_back(out);
        return out;
    }
};

} // namespace

SingleStep step_once(const TermPtr& t, const DefEnv& env, const ReductionPolicy& policy) {
    static const std::string no_head;
    Stepper st{env, policy, make_stamp(env, policy), no_head};
    TermPtr nt = st.search(t, false, false, 0);
    if (!nt) return {t, false, RuleTag::Let};
    return {nt, true, st.tag};
}

bool is_normal_form(const TermPtr& t, const DefEnv& env, const ReductionPolicy& policy) {
    static const std::string no_head;
    Stepper st{env, policy, make_stamp(env, policy), no_head};
    return st.search(t, false, false, 0) == nullptr;
}

NormalizeResult normalize(TermPtr t, const DefEnv& env, const NormalizeOptions& opts) {
    Metrics m;
    m.peak_term_size = term_size(t);
    if (opts.record_size_trace) m.size_trace.push_back(term_size(t));
    Stepper st{env, opts.policy, make_stamp(env, opts.policy), opts.nesting_head};
    while (m.steps < opts.max_steps) {
        st.reset();
        TermPtr nt = st.search(t, false, false, 0);
        if (!nt) return {t, std::move(m)};
        t = nt;
        ++m.steps;
        std::uint64_t sz = term_size(t);
        if (sz > m.peak_term_size) m.peak_term_size = sz;
        if (opts.record_size_trace) m.size_trace.push_back(sz);
        if (opts.record_rules) m.rules.push_back(st.tag);
        switch (st.tag) {
            case RuleTag::Delta: ++m.delta_unfolds[st.rule_const]; break;
            case RuleTag::FixUnfold:
                ++m.fix_unfolds[st.rule_const];
                m.fix_unfold_steps[st.rule_const].push_back(m.steps);
                if (st.fired_in_branch) ++m.fix_unfolds_in_branches[st.rule_const];
                break;
            default: break;
        }
        if (opts.on_step) {
            StepEvent ev{m.steps,          st.tag, st.has_name ? &st.rule_const : nullptr,
                         st.fired_in_branch, st.path, sz,
                         st.nesting};
            opts.on_step(ev);
        }
    }
    m.budget_exhausted = true;
    return {t, std::move(m)};
}

} // namespace cbnlab

#include "cbnlab/cost.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <numeric>
#include <set>

namespace cbnlab {

namespace {

using u128 = unsigned __int128;

constexpr u128 kCostCap = static_cast<u128>(1) << 63;

std::optional<std::uint64_t> eval_levels(const StructuralParams& p, bool with_memory) {
    if (p.levels.empty() || p.levels.size() > kMaxCostLevels) return std::nullopt;
    u128 sum = 0;
    u128 prod = 1;
    for (const auto& lv : p.levels) {
        u128 term = lv.es + lv.ds + lv.c_nosub;
        std::size_t nr = std::min(lv.r_counts.size(), lv.r_sizes.size());
        for (std::size_t j = 0; j < nr; ++j)
            term += static_cast<u128>(lv.r_counts[j]) * lv.r_sizes[j];
        if (with_memory)
            term += static_cast<u128>(lv.m_count + lv.a_count) * p.m_size;
        sum += term * prod;
        if (sum > kCostCap) return std::nullopt;
        prod *= std::max<std::uint64_t>(lv.c_sub, 1);
        if (prod > kCostCap) return std::nullopt;
    }
    u128 total = static_cast<u128>(p.num_stmts) * sum + p.program_size;
    if (total > kCostCap) return std::nullopt;
    return static_cast<std::uint64_t>(total);
}

} // namespace

std::optional<std::uint64_t> infor_naive(const StructuralParams& p) {
    return eval_levels(p, false);
}

std::optional<std::uint64_t> infor_memory_aware(const StructuralParams& p) {
    return eval_levels(p, true);
}

std::optional<std::uint64_t> infor_opt(const StructuralParams& p) {
    u128 total = static_cast<u128>(p.e_r) + p.d_r + p.stmt_size;
    if (total > kCostCap) return std::nullopt;
    return static_cast<std::uint64_t>(total);
}

namespace {

bool statement_tagged(const Term* t) {
    if (t->kind != TermKind::Match || t->branches.empty()) return false;
    for (const auto& b : t->branches) {
        bool st = b.tag.rfind("st_", 0) == 0;
        bool sn = b.tag.rfind("sn_", 0) == 0;
        if (!st && !sn) return false;
    }
    return true;
}

const Term* find_statement_match(const TermPtr& root) {
    const Term* found = nullptr;
    std::function<void(const TermPtr&)> walk = [&](const TermPtr& t) {
        if (found) return;
        if (statement_tagged(t.get())) {
            found = t.get();
            return;
        }
        if (t->a) walk(t->a);
        if (t->b) walk(t->b);
        for (const auto& a : t->ctor_args) walk(a);
        for (const auto& brn : t->branches) walk(brn.body);
    };
    walk(root);
    return found;
}

bool is_memory_helper(const std::string& name) {
    auto dot = name.rfind('.');
    std::string base = dot == std::string::npos ? name : name.substr(dot + 1);
    return base == "read" || base == "read2" || base == "write" || base == "write2" ||
           base == "getflag" || base == "setflag";
}

bool is_address_tag(const std::string& tag) {
    if (tag.size() < 3 || tag[0] != 'a' || tag[1] != 'd') return false;
    return std::all_of(tag.begin() + 2, tag.end(), [](char c) { return c >= '0' && c <= '9'; });
}

struct LevelAccum {
    std::uint64_t apps = 0;
    std::set<std::string> refs;
    std::map<std::string, std::pair<std::uint64_t, std::uint64_t>> ctors;  // tag -> (count, size)
    std::uint64_t mem = 0;
    std::uint64_t addr = 0;
    std::vector<const Term*> next_matches;
};

// counts one branch body; nested matches contribute their scrutinees here and
// park their own branches for the next level
void scan_body(const Term* t, LevelAccum& acc, bool* saw_match) {
    if (t->kind == TermKind::Match) {
        if (saw_match) *saw_match = true;
        acc.next_matches.push_back(t);
        scan_body(t->a.get(), acc, nullptr);
        return;
    }
    switch (t->kind) {
        case TermKind::App: acc.apps += 1; break;
        case TermKind::ConstRef:
            acc.refs.insert(t->name);
            if (is_memory_helper(t->name)) acc.mem += 1;
            break;
        case TermKind::Ctor: {
            auto& slot = acc.ctors[t->tag];
            slot.first += 1;
            slot.second = 1 + t->ctor_args.size();
            if (t->tag == "mem") acc.mem += 1;
            if (is_address_tag(t->tag)) acc.addr += 1;
            break;
        }
        default: break;
    }
    if (t->a) scan_body(t->a.get(), acc, saw_match);
    if (t->b) scan_body(t->b.get(), acc, saw_match);
    for (const auto& a : t->ctor_args) scan_body(a.get(), acc, saw_match);
}

LevelParams finish_level(const LevelAccum& acc, std::uint64_t c_nosub, std::uint64_t c_sub) {
    LevelParams lv;
    lv.c_nosub = c_nosub;
    lv.c_sub = c_sub;
    lv.es = acc.apps;
    lv.ds = acc.refs.size();
    for (const auto& [tag, cs] : acc.ctors) {
        lv.r_counts.push_back(cs.first);
        lv.r_sizes.push_back(cs.second);
    }
    lv.m_count = acc.mem;
    lv.a_count = acc.addr;
    return lv;
}

} // namespace

StructuralParams extract_params(const DefEnv& defs, Variant v, const StmtLPtr& sample_stmt) {
    StructuralParams p;
    p.m_size = term_size(encode_memory(init_memory()));
    Program single{sample_stmt};
    p.stmt_size = term_size(encode_program(single, v));
    p.program_size = p.stmt_size;
    p.num_stmts = 1;

    std::string ns = variant_name(v);
    const Def* anchor = nullptr;
    if (v == Variant::Naive || v == Variant::S1) anchor = defs.lookup(ns + ".interp");
    else anchor = defs.lookup(ns + ".dispatch_step");
    if (!anchor) return p;
    TermPtr body = anchor->body;
    while (body->kind == TermKind::Lam || body->kind == TermKind::Fix) body = body->a;
    const Term* stmt_match = find_statement_match(body);
    if (!stmt_match) return p;

    std::vector<const Term*> current{stmt_match};
    while (!current.empty() && p.levels.size() < kMaxCostLevels) {
        LevelAccum acc;
        std::uint64_t c_nosub = 0, c_sub = 0;
        for (const Term* m : current) {
            std::vector<const Term*> bodies;
            for (const auto& brn : m->branches) bodies.push_back(brn.body.get());
            if (m->b) bodies.push_back(m->b.get());
            for (const Term* bb : bodies) {
                bool saw = false;
                scan_body(bb, acc, &saw);
                if (saw) c_sub += 1;
                else c_nosub += 1;
            }
        }
        p.levels.push_back(finish_level(acc, c_nosub, c_sub));
        if (p.levels.size() == 1) {
            p.e_r = p.levels[0].es;
            p.d_r = p.levels[0].ds;
        }
        current = std::move(acc.next_matches);
    }
    return p;
}

std::optional<std::uint64_t> predict_peak(const DefEnv& defs, Variant v, std::uint64_t num_stmts,
                                          std::uint64_t program_size, const StmtLPtr& sample_stmt) {
    StructuralParams p = extract_params(defs, v, sample_stmt);
    p.program_size = program_size;
    switch (v) {
        case Variant::Naive:
            p.num_stmts = num_stmts;
            return infor_memory_aware(p);
        case Variant::S1:
        case Variant::S1S2:
            p.num_stmts = 1;
            return infor_naive(p);
        case Variant::Full: return infor_opt(p);
    }
    return std::nullopt;
}

namespace {

std::vector<double> average_ranks(const std::vector<std::uint64_t>& xs) {
    std::size_t n = xs.size();
    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), 0);
    std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return xs[a] < xs[b]; });
    std::vector<double> ranks(n, 0);
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j + 1 < n && xs[idx[j + 1]] == xs[idx[i]]) ++j;
        double avg = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
        for (std::size_t k = i; k <= j; ++k) ranks[idx[k]] = avg;
        i = j + 1;
    }
    return ranks;
}

} // namespace

std::optional<CompareReport> compare_report(const std::vector<std::uint64_t>& predicted,
                                            const std::vector<std::uint64_t>& measured) {
    if (predicted.size() != measured.size() || predicted.size() < 3) return std::nullopt;
    std::size_t n = predicted.size();
    auto ra = average_ranks(predicted);
    auto rb = average_ranks(measured);
    double ma = 0, mb = 0;
    for (std::size_t i = 0; i < n; ++i) {
        ma += ra[i];
        mb += rb[i];
    }
    ma /= static_cast<double>(n);
    mb /= static_cast<double>(n);
    double cov = 0, va = 0, vb = 0;
    for (std::size_t i = 0; i < n; ++i) {
        cov += (ra[i] - ma) * (rb[i] - mb);
        va += (ra[i] - ma) * (ra[i] - ma);
        vb += (rb[i] - mb) * (rb[i] - mb);
    }
    CompareReport out;
    out.spearman = (va == 0 || vb == 0) ? 0.0 : cov / std::sqrt(va * vb);
    out.points.reserve(n);
    for (std::size_t i = 0; i < n; ++i)
        out.points.push_back(ComparePoint{predicted[i], measured[i], ra[i], rb[i]});
    return out;
}

} // namespace cbnlab

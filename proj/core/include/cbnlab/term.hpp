#pragma once

#include <atomic>
#include <cstdint>
#include <memory>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace cbnlab {

enum class TermKind { Var, ConstRef, Lam, App, Let, Ctor, Match, Fix };

struct Term;
using TermPtr = std::shared_ptr<const Term>;

struct MatchBranch {
    std::string tag;
    std::vector<std::string> binders;
    TermPtr body;
};

struct Term {
    TermKind kind{TermKind::Var};
    std::string name;                   // Var/ConstRef name, Lam/Let binder, Fix self
    std::string tag;                    // Ctor tag
    TermPtr a;                          // Lam body, App fn, Let value, Match scrutinee, Fix body
    TermPtr b;                          // App arg, Let body, Match default branch
    std::vector<TermPtr> ctor_args;     // Ctor
    std::vector<MatchBranch> branches;  // Match
    std::vector<std::string> params;    // Fix
    std::size_t struct_index{0};        // Fix: param whose constructor head enables unfolding

    std::uint64_t size{1};
    std::vector<std::uint32_t> fvs;     // sorted interned ids of free variables

    // engine cache: last fingerprint for which this subtree was verified
    // redex-free (0 = never)
    mutable std::atomic<std::uint64_t> nf_stamp{0};
};

std::uint32_t intern(std::string_view name);
const std::string& intern_name(std::uint32_t id);

TermPtr mkVar(std::string name);
TermPtr mkConst(std::string name);
TermPtr mkLam(std::string binder, TermPtr body);
TermPtr mkApp(TermPtr fn, TermPtr arg);
TermPtr mkApps(TermPtr fn, const std::vector<TermPtr>& args);
TermPtr mkLet(std::string binder, TermPtr value, TermPtr body);
TermPtr mkCtor(std::string tag, std::vector<TermPtr> args = {});
TermPtr mkMatch(TermPtr scrutinee, std::vector<MatchBranch> branches, TermPtr fallback = nullptr);
TermPtr mkFix(std::string self, std::vector<std::string> params, std::size_t struct_index,
              TermPtr body);

inline std::uint64_t term_size(const TermPtr& t) { return t ? t->size : 0; }

bool has_free(const TermPtr& t, std::uint32_t id);
inline bool has_free(const TermPtr& t, std::string_view name) { return has_free(t, intern(name)); }

std::string fresh_name(std::string_view base);

TermPtr substitute(const TermPtr& t, const std::string& x, const TermPtr& v);
TermPtr subst_multi(const TermPtr& t, const std::vector<std::pair<std::string, TermPtr>>& subs);

bool alpha_eq(const TermPtr& lhs, const TermPtr& rhs);

// head of the application spine plus the spine arguments, left to right
std::pair<TermPtr, std::vector<TermPtr>> decompose_app(const TermPtr& t);

std::string to_string(const TermPtr& t, std::size_t max_chars = 100000);

} // namespace cbnlab

#pragma once

#include "cbnlab/term.hpp"

#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <vector>

namespace cbnlab {

enum class RuleTag { Let, Beta, Iota, FixUnfold, Delta };

const char* rule_name(RuleTag t);

struct Def {
    TermPtr body;
    bool transparent = true;
};

class DefEnv {
  public:
    // rejects redefinition and bare reference chains that loop back
    bool define(const std::string& name, TermPtr body, bool transparent = true);
    const Def* lookup(const std::string& name) const;
    std::uint64_t version() const { return version_; }

  private:
    std::map<std::string, Def> defs_;
    std::uint64_t version_ = next_version();
    static std::uint64_t next_version();
};

enum class DeltaMode { DemandDriven, Always };

struct ReductionPolicy {
    bool reduce_under_lambda = false;
    bool reduce_match_branches = true;
    DeltaMode delta = DeltaMode::DemandDriven;
};

struct Metrics {
    std::uint64_t steps = 0;
    std::uint64_t peak_term_size = 0;
    std::vector<std::uint64_t> size_trace;  // size_trace[0] is the initial size
    std::vector<RuleTag> rules;
    std::map<std::string, std::uint64_t> delta_unfolds;
    std::map<std::string, std::uint64_t> fix_unfolds;
    std::map<std::string, std::vector<std::uint64_t>> fix_unfold_steps;
    std::map<std::string, std::uint64_t> fix_unfolds_in_branches;
    bool budget_exhausted = false;
};

struct StepEvent {
    std::uint64_t step;  // 1-based
    RuleTag tag;
    const std::string* name;  // fix/const name for FixUnfold/Delta, else null
    bool in_branch;
    const std::vector<TermPtr>& path;  // rebuilt nodes, redex result first, new root last
    std::uint64_t term_size_after;
    std::uint32_t nesting;  // interp application nesting at the redex (0 when disabled)
};

struct NormalizeOptions {
    ReductionPolicy policy;
    std::uint64_t max_steps = 1000000;
    bool record_size_trace = true;
    bool record_rules = true;
    std::string nesting_head;  // fix/const name whose application chains are measured
    std::function<void(const StepEvent&)> on_step;
};

struct NormalizeResult {
    TermPtr term;
    Metrics metrics;
};

// single leftmost-outermost step; returns the unchanged term when already normal
struct SingleStep {
    TermPtr term;
    bool reduced = false;
    RuleTag tag = RuleTag::Let;
};

SingleStep step_once(const TermPtr& t, const DefEnv& env, const ReductionPolicy& policy);

NormalizeResult normalize(TermPtr t, const DefEnv& env, const NormalizeOptions& opts);

bool is_normal_form(const TermPtr& t, const DefEnv& env, const ReductionPolicy& policy);

} // namespace cbnlab

#pragma once

#include <map>
#include <memory>
#include <string>
#include <vector>

#include "cbnlab/memory.hpp"

namespace cbnlab {

enum class BinOp { Add, Sub, Lt, Eq, And, Or };

const char* op_name(BinOp op);

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

struct Expr {
    enum class Kind { Const, Var, Not, Bin };
    Kind kind;
    Value value{};   // Const
    Address addr{};  // Var
    BinOp op{};      // Bin
    ExprPtr lhs, rhs;

    static ExprPtr constant(Value v);
    static ExprPtr var(Address a);
    static ExprPtr negate(ExprPtr e);
    static ExprPtr bin(BinOp op, ExprPtr l, ExprPtr r);
};

bool equal(const ExprPtr& a, const ExprPtr& b);

struct StmtL;
using StmtLPtr = std::shared_ptr<const StmtL>;
/// Sequencing is the list itself; no Seq constructor exists in this form.
using Program = std::vector<StmtLPtr>;

struct StmtL {
    enum class Kind { Assign, If, While, Call, Throw };
    Kind kind;
    Address addr{};          // Assign target
    ExprPtr expr;            // Assign value / If / While condition
    Program then_block, else_block;  // If
    Program body;            // While
    std::string fun;         // Call

    static StmtLPtr assign(Address a, ExprPtr e);
    static StmtLPtr ifelse(ExprPtr c, Program t, Program e);
    static StmtLPtr loop(ExprPtr c, Program b);
    static StmtLPtr call(std::string f);
    static StmtLPtr throw_();
};

bool equal(const StmtLPtr& a, const StmtLPtr& b);
bool equal(const Program& a, const Program& b);

struct StmtN;
using StmtNPtr = std::shared_ptr<const StmtN>;

/// Nested-sequence form: statements chained with Seq and terminated by Snil.
struct StmtN {
    enum class Kind { Assign, If, While, Call, Throw, Snil, Seq };
    Kind kind;
    Address addr{};
    ExprPtr expr;
    StmtNPtr a, b;  // If(then,else) | While(body,_) | Seq(head,tail)
    std::string fun;

    static StmtNPtr assign(Address a, ExprPtr e);
    static StmtNPtr ifelse(ExprPtr c, StmtNPtr t, StmtNPtr e);
    static StmtNPtr loop(ExprPtr c, StmtNPtr body);
    static StmtNPtr call(std::string f);
    static StmtNPtr throw_();
    static StmtNPtr snil();
    static StmtNPtr seq(StmtNPtr head, StmtNPtr tail);
};

bool equal(const StmtNPtr& a, const StmtNPtr& b);

using FunTable = std::map<std::string, Program>;

std::string print_expr(const ExprPtr& e);
std::string print_stmt(const StmtLPtr& s);
std::string print_program(const Program& p);

/// True when no Seq appears anywhere (lists carry the sequencing).
bool stmtl_has_no_seq(const Program& p);

} // namespace cbnlab

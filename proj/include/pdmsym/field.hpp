#pragma once

#include <map>
#include <memory>
#include <set>
#include <string>
#include <vector>

#include "pdmsym/jet.hpp"

namespace pdm {

enum class FieldKind { Num, Name, Call, Neg, Add, Sub, Mul, Div, Pow };

struct FieldExpr;
using FieldPtr = std::shared_ptr<const FieldExpr>;

// Immutable expression tree for scalar fields. Call nodes cover both built-in
// functions (sqrt, exp, ln, sin, cos, tan, atan) and named function slots
// (F, G, ...); bare names are coordinates, built-in derived symbols, bound
// parameters, or arity-0 slots, resolved at evaluation time.
struct FieldExpr {
    FieldKind kind;
    Rat num;                      // Num
    std::string name;             // Name, Call
    std::vector<FieldPtr> kids;   // operands / call arguments
    int expo = 0;                 // Pow exponent (integer, may be negative)
};

FieldPtr f_num(Rat v);
FieldPtr f_name(std::string n);
FieldPtr f_call(std::string n, std::vector<FieldPtr> args);
FieldPtr f_neg(FieldPtr a);
FieldPtr f_add(FieldPtr a, FieldPtr b);
FieldPtr f_sub(FieldPtr a, FieldPtr b);
FieldPtr f_mul(FieldPtr a, FieldPtr b);
FieldPtr f_div(FieldPtr a, FieldPtr b);
FieldPtr f_pow(FieldPtr a, int e);

bool is_reserved_var(const std::string& n);   // x1 x2 x3 r rt phi theta
bool is_builtin_func(const std::string& n);   // sqrt exp ln sin cos tan atan

struct ParseError : std::runtime_error {
    size_t offset;
    ParseError(size_t off, const std::string& msg)
        : std::runtime_error(msg + " at offset " + std::to_string(off)), offset(off) {}
};

FieldPtr parse_field(const std::string& src);
std::string print_field(const FieldPtr& e);

// Structural equality of expression trees (exact rational comparison on
// literals); used by the parse/print round-trip checks.
bool field_equal(const FieldPtr& a, const FieldPtr& b);

// A function slot: formal argument names plus a body whose remaining free
// names resolve against the same binding. Arity-0 slots are referenced as
// bare names.
struct Slot {
    std::vector<std::string> args;
    FieldPtr body;
};

struct Binding {
    std::map<std::string, Rat> params;
    std::map<std::string, Slot> slots;
};

// Free parameter and slot names of e; the binding-aware overload resolves
// names through b (descending into bound slot bodies) and reports only what
// remains unbound.
std::pair<std::set<std::string>, std::set<std::string>> free_names(const FieldPtr& e);
std::pair<std::set<std::string>, std::set<std::string>> free_names(const FieldPtr& e,
                                                                   const Binding& b);

// Evaluates e at the given point to a jet of the given order. S is double or
// Rat; rational mode raises EvalError on any transcendental, sqrt, or the
// derived symbols r, rt, phi, theta.
template <class S>
Jet<S> eval_field(const FieldPtr& e, const Binding& b, const std::array<S, 3>& point,
                  int order);

// Symbolic partial derivative with respect to x_axis (axis in 1..3). Slot
// calls must be substituted away first; free non-reserved names are treated
// as constants.
FieldPtr field_derivative(const FieldPtr& e, int axis);

// Replaces every slot reference by its bound body with arguments substituted,
// leaving parameters and coordinates untouched.
FieldPtr substitute_slots(const FieldPtr& e, const Binding& b);

}  // namespace pdm

#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "futs/detail/arena.hpp"
#include "futs/model.hpp"
#include "futs/semiring.hpp"
#include "futs/syntax.hpp"

namespace futs::pepa {

enum class Kind { nil, prefix, choice, coop, constant };

/// One node of a hash-consed process term. States of an explored system are
/// exactly these nodes; equality is structural via interning.
struct Term {
    Kind kind = Kind::nil;
    std::string action;                  // prefix
    Rational rate;                       // prefix
    const Term* left = nullptr;          // prefix continuation / choice / coop
    const Term* right = nullptr;         // choice / coop
    std::vector<std::string> coop_set;   // coop, sorted and duplicate-free
    std::string name;                    // constant

    std::string key;
    StateId id;
};

using TermRef = const Term*;

/// Definitions, the action alphabet (first-appearance order) and the arena
/// all parsed and derived terms live in. Move-only.
class PepaEnv {
public:
    TermRef nil();
    TermRef prefix(const std::string& action, Rational rate, TermRef cont);
    TermRef choice(TermRef left, TermRef right);
    TermRef coop(TermRef left, TermRef right, std::vector<std::string> coop_set);
    TermRef constant(const std::string& name);

    /// Registers X := body; redefinition is an error.
    void define(const std::string& name, TermRef body, std::size_t line = 1);

    TermRef lookup(const std::string& name) const;
    const std::vector<std::pair<std::string, TermRef>>& definitions() const { return defs_; }

    /// Actions seen so far; falls back to {"a"} when the source mentions none,
    /// so explored models always have a non-empty label set.
    std::vector<std::string> alphabet() const;

    void note_action(const std::string& action);

    /// Checks that every used constant is defined and every definition body is
    /// prefix-guarded (each constant occurrence below some prefix).
    void check_wellformed(TermRef root = nullptr) const;

    TermRef term_by_id(StateId id) const { return arena_.by_id(id); }

private:
    detail::Arena<Term> arena_;
    std::vector<std::pair<std::string, TermRef>> defs_;
    std::map<std::string, TermRef> def_index_;
    std::map<std::string, std::size_t> def_lines_;
    std::vector<std::string> alphabet_;
    std::set<std::string> alphabet_seen_;
};

struct ParseResult {
    PepaEnv env;
    TermRef root = nullptr;  // null when the source only holds definitions
};

/// Definitions one per line, the final expression (if any) is the root.
ParseResult parse_pepa(const std::string& text);

/// Parses one expression against an existing environment.
TermRef parse_expression(PepaEnv& env, const std::string& text);

/// Canonical concrete syntax; parsing the output yields the same term.
std::string print_term(TermRef t);

/// Apparent rate r_a(P): the total rate at which P can perform action a.
Rational apparent_rate(TermRef p, const std::string& action, const PepaEnv& env);

/// Apparent rate factor on continuations: min{total(f), total(g)} divided by
/// their product, zero when either total is zero.
Rational arf_semantic(const FiniteSupportFn& f, const FiniteSupportFn& g);

/// The unique continuation of p under label delta_a (rational semiring,
/// keyed by arena StateIds).
FiniteSupportFn futs_step(TermRef p, const std::string& action, PepaEnv& env);

struct StandardTransition {
    std::string action;
    Rational rate;
    TermRef target;
    std::uint64_t multiplicity = 1;  // number of distinct derivation trees
};

/// All derivable multi-transitions of p, merged into multiplicities and
/// canonically ordered by (action, rate, target).
std::vector<StandardTransition> standard_transitions(TermRef p, PepaEnv& env);

/// Total conditional transition rate q[P, C, a] over the standard semantics.
Rational q_rate(TermRef p, const std::set<TermRef>& targets, const std::string& action, PepaEnv& env);

struct Explored {
    FutsModel model;
    std::vector<TermRef> states;  // model state index -> term
};

/// Breadth-first reachable restriction of the FuTS semantics; one relation
/// with one label per alphabet action. Throws StateCapExceeded past `cap`.
Explored explore_pepa(TermRef root, PepaEnv& env, std::size_t cap = 10000);
Explored explore_pepa(const std::vector<TermRef>& roots, PepaEnv& env, std::size_t cap = 10000);

struct StandardLts {
    std::vector<TermRef> states;
    std::vector<std::vector<StandardTransition>> transitions;  // per state
};

/// Reachable multi-transition system of the standard semantics.
StandardLts explore_standard(TermRef root, PepaEnv& env, std::size_t cap = 10000);

/// Coarsest strong equivalence of the reachable standard-semantics system,
/// computed from q-rate signatures (no FuTS machinery involved).
Partition strong_equivalence_partition(TermRef root, PepaEnv& env, std::size_t cap = 10000,
                                       std::vector<TermRef>* states_out = nullptr);

}  // namespace futs::pepa

#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "futs/detail/arena.hpp"
#include "futs/model.hpp"
#include "futs/semiring.hpp"
#include "futs/syntax.hpp"

namespace futs::iml {

enum class Kind { nil, act_prefix, rate_prefix, choice, coop, constant };

struct Term {
    Kind kind = Kind::nil;
    std::string action;                  // act_prefix
    Rational rate;                       // rate_prefix
    const Term* left = nullptr;          // prefix continuation / choice / coop
    const Term* right = nullptr;         // choice / coop
    std::vector<std::string> coop_set;   // coop, sorted and duplicate-free
    std::string name;                    // constant

    std::string key;
    StateId id;
};

using TermRef = const Term*;

class ImlEnv {
public:
    TermRef nil();
    TermRef act_prefix(const std::string& action, TermRef cont);
    TermRef rate_prefix(Rational rate, TermRef cont);
    TermRef choice(TermRef left, TermRef right);
    TermRef coop(TermRef left, TermRef right, std::vector<std::string> coop_set);
    TermRef constant(const std::string& name);

    void define(const std::string& name, TermRef body, std::size_t line = 1);
    TermRef lookup(const std::string& name) const;
    const std::vector<std::pair<std::string, TermRef>>& definitions() const { return defs_; }

    std::vector<std::string> alphabet() const;
    void note_action(const std::string& action);
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
    ImlEnv env;
    TermRef root = nullptr;
};

/// Grammar as for PEPA except prefixes: "a.P" for actions, "(3/2).P" for delays.
ParseResult parse_iml(const std::string& text);
TermRef parse_expression(ImlEnv& env, const std::string& text);
std::string print_term(TermRef t);

/// Boolean continuation of p under action a (relation 1).
FiniteSupportFn futs_action_step(TermRef p, const std::string& action, ImlEnv& env);

/// Rational continuation of p under the delay label (relation 2). Delays
/// never synchronize across cooperation.
FiniteSupportFn futs_delay_step(TermRef p, ImlEnv& env);

/// Derivable action transitions, as a set (the boolean side is idempotent).
std::vector<std::pair<std::string, TermRef>> standard_action_transitions(TermRef p, ImlEnv& env);

struct DelayTransition {
    Rational rate;
    TermRef target;
    std::uint64_t multiplicity = 1;
};

/// Derivation-counted Markovian transitions, canonically ordered.
std::vector<DelayTransition> standard_delay_transitions(TermRef p, ImlEnv& env);

/// T(P, a, C): can P reach the set C by an a-transition?
bool t_fn(TermRef p, const std::string& action, const std::set<TermRef>& targets, ImlEnv& env);

/// R(P, C): cumulative Markovian rate from P into the set C.
Rational r_fn(TermRef p, const std::set<TermRef>& targets, ImlEnv& env);

struct Explored {
    FutsModel model;
    std::vector<TermRef> states;
};

/// Two relations: (1, alphabet, bool) and (2, {"delta"}, rational).
Explored explore_iml(TermRef root, ImlEnv& env, std::size_t cap = 10000);
Explored explore_iml(const std::vector<TermRef>& roots, ImlEnv& env, std::size_t cap = 10000);

struct StandardLts {
    std::vector<TermRef> states;
    std::vector<std::vector<std::pair<std::string, TermRef>>> action_transitions;
    std::vector<std::vector<DelayTransition>> delay_transitions;
};

/// Reachable system of the standard SOS (both transition relations).
StandardLts explore_standard(TermRef root, ImlEnv& env, std::size_t cap = 10000);

/// Coarsest strong bisimulation over the standard SOS, from joint T/R
/// signatures (no FuTS machinery involved).
Partition strong_bisimulation_partition(TermRef root, ImlEnv& env, std::size_t cap = 10000,
                                        std::vector<TermRef>* states_out = nullptr);

}  // namespace futs::iml

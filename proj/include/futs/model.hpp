#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <tuple>
#include <vector>

#include "futs/semiring.hpp"

#include "json.hpp"

namespace futs {

class ModelError : public Error {
public:
    using Error::Error;
};

class NotABisimulation : public Error {
public:
    using Error::Error;
};

class TooLarge : public Error {
public:
    using Error::Error;
};

class StateCapExceeded : public Error {
public:
    StateCapExceeded(std::size_t cap, std::size_t explored)
        : Error("state cap of " + std::to_string(cap) + " exceeded after exploring " +
                std::to_string(explored) + " states"),
          cap(cap),
          explored(explored) {}
    std::size_t cap;
    std::size_t explored;
};

/// One transition relation of a model: its 1-based index, its label set and
/// the semiring its continuations live in.
struct RelationSchema {
    int index = 1;
    std::vector<std::string> labels;
    Semiring semiring = Semiring::rational;
};

/// A finite, total and deterministic labeled state-to-function transition
/// system: every (relation, state, label) triple has exactly one stored
/// continuation, and every support state is a member of the state set.
class FutsModel {
public:
    /// Continuation for relation `rel_index` (1-based), state and label.
    using Evaluator = std::function<FiniteSupportFn(int rel_index, StateId, const std::string&)>;

    static FutsModel build(std::vector<std::string> states, std::vector<RelationSchema> schemas,
                           const Evaluator& eval);

    static FutsModel from_json(const nlohmann::json& doc);
    nlohmann::json to_json() const;
    std::string to_dot() const;

    std::size_t state_count() const { return state_names_.size(); }
    const std::vector<std::string>& state_names() const { return state_names_; }
    const std::string& state_name(StateId s) const { return state_names_.at(s.value); }
    std::optional<StateId> state_by_name(const std::string& name) const;

    const std::vector<RelationSchema>& schemas() const { return schemas_; }

    /// Row lookup by relation position (0-based into schemas()) and label position.
    const FiniteSupportFn& continuation(std::size_t rel, StateId s, std::size_t label) const {
        return table_.at(rel).at(s.value).at(label);
    }

private:
    FutsModel() = default;
    void validate() const;

    std::vector<std::string> state_names_;
    std::map<std::string, StateId> state_index_;
    std::vector<RelationSchema> schemas_;
    // table_[rel][state][label]
    std::vector<std::vector<std::vector<FiniteSupportFn>>> table_;
};

/// Disjoint non-empty blocks covering a model's state set, kept canonical:
/// members ascending within a block, blocks ordered by smallest member.
class Partition {
public:
    static Partition single_block(std::size_t n_states);
    static Partition singletons(std::size_t n_states);
    static Partition from_blocks(std::size_t n_states, std::vector<std::vector<StateId>> blocks);

    std::size_t state_count() const { return block_of_.size(); }
    std::size_t block_count() const { return blocks_.size(); }
    std::size_t block_of(StateId s) const { return block_of_.at(s.value); }
    const std::vector<std::vector<StateId>>& blocks() const { return blocks_; }
    bool same_block(StateId a, StateId b) const { return block_of(a) == block_of(b); }

    friend bool operator==(const Partition& a, const Partition& b) = default;

    nlohmann::json to_json(const std::function<std::string(StateId)>& names) const;

private:
    std::vector<std::vector<StateId>> blocks_;
    std::vector<std::uint32_t> block_of_;
};

/// Blocks as sets of state names, for order-insensitive partition comparison.
std::set<std::set<std::string>> to_name_blocks(const Partition& p,
                                               const std::function<std::string(StateId)>& names);

/// Canonical signature of one state against a partition: nonzero class sums
/// keyed by (relation position, label position, block index).
using Signature = std::map<std::tuple<std::size_t, std::size_t, std::size_t>, SemiringValue>;

/// Splits blocks by signature until a fixed point. The signature function is
/// re-evaluated against each round's partition. Block counts per round land
/// in `trace` when given.
Partition refine_to_fixpoint(std::size_t n_states,
                             const std::function<Signature(StateId, const Partition&)>& signature,
                             std::vector<std::size_t>* trace = nullptr);

Signature model_signature(const FutsModel& m, StateId s, const Partition& p);

/// Direct check of the bisimulation condition: related states must have equal
/// class-summed continuations for every relation, label and class.
bool is_bisimulation(const FutsModel& m, const Partition& p);

/// Coarsest bisimulation by signature-based partition refinement.
Partition coarsest_bisimulation(const FutsModel& m);

/// Oracle realizing the definition literally: relate s1,s2 iff some partition
/// of the state set is a bisimulation with s1,s2 in one block. Guarded to
/// (at most) 8 states; throws TooLarge beyond that.
Partition brute_force_coarsest(const FutsModel& m);

/// Quotient model over the blocks of `p` (must be a bisimulation): states are
/// block representatives, rows are class-summed rows of the representative.
FutsModel quotient(const FutsModel& m, const Partition& p);

/// Evidence that two states are not equivalent under a partition: the first
/// (relation, label, class) triple, in canonical order, whose class sums differ.
struct Witness {
    int rel_index = 1;
    std::string label;
    std::vector<std::string> class_states;
    SemiringValue lhs, rhs;
};

std::optional<Witness> find_witness(const FutsModel& m, const Partition& p, StateId a, StateId b);

}  // namespace futs

#include "futs/model.hpp"

#include <algorithm>
#include <limits>
#include <set>
#include <sstream>

namespace futs {

namespace {

void check_schemas(const std::vector<RelationSchema>& schemas) {
    if (schemas.empty()) throw ModelError("model needs at least one relation schema");
    for (std::size_t i = 0; i < schemas.size(); ++i) {
        const auto& sc = schemas[i];
        if (sc.index != static_cast<int>(i) + 1)
            throw ModelError("relation indices must be exactly 1..n in order");
        if (sc.labels.empty())
            throw ModelError("relation " + std::to_string(sc.index) + " has an empty label set");
        std::set<std::string> seen(sc.labels.begin(), sc.labels.end());
        if (seen.size() != sc.labels.size())
            throw ModelError("relation " + std::to_string(sc.index) + " has duplicate labels");
    }
}

std::string quote_dot(const std::string& s) {
    std::string out = "\"";
    for (char c : s) {
        if (c == '"' || c == '\\') out.push_back('\\');
        out.push_back(c);
    }
    out.push_back('"');
    return out;
}

}  // namespace

FutsModel FutsModel::build(std::vector<std::string> states, std::vector<RelationSchema> schemas,
                           const Evaluator& eval) {
    FutsModel m;
    m.state_names_ = std::move(states);
    m.schemas_ = std::move(schemas);
    for (std::size_t i = 0; i < m.state_names_.size(); ++i) {
        auto [it, fresh] = m.state_index_.emplace(m.state_names_[i], StateId{static_cast<std::uint32_t>(i)});
        if (!fresh) throw ModelError("duplicate state '" + m.state_names_[i] + "'");
    }
    check_schemas(m.schemas_);

    m.table_.resize(m.schemas_.size());
    for (std::size_t rel = 0; rel < m.schemas_.size(); ++rel) {
        const auto& sc = m.schemas_[rel];
        m.table_[rel].reserve(m.state_names_.size());
        for (std::uint32_t s = 0; s < m.state_names_.size(); ++s) {
            std::vector<FiniteSupportFn> row;
            row.reserve(sc.labels.size());
            for (const auto& label : sc.labels) row.push_back(eval(sc.index, StateId{s}, label));
            m.table_[rel].push_back(std::move(row));
        }
    }
    m.validate();
    return m;
}

void FutsModel::validate() const {
    for (std::size_t rel = 0; rel < schemas_.size(); ++rel) {
        const auto& sc = schemas_[rel];
        for (std::size_t s = 0; s < state_names_.size(); ++s) {
            for (std::size_t l = 0; l < sc.labels.size(); ++l) {
                const auto& fn = table_[rel][s][l];
                if (fn.semiring() != sc.semiring)
                    throw ModelError("continuation semiring differs from schema of relation " +
                                     std::to_string(sc.index));
                for (const auto& [target, v] : fn.entries()) {
                    if (target.value >= state_names_.size())
                        throw ModelError("open model: support of (" + state_names_[s] + ", " +
                                         sc.labels[l] + ") escapes the state set");
                }
            }
        }
    }
}

std::optional<StateId> FutsModel::state_by_name(const std::string& name) const {
    auto it = state_index_.find(name);
    if (it == state_index_.end()) return std::nullopt;
    return it->second;
}

FutsModel FutsModel::from_json(const nlohmann::json& doc) {
    if (!doc.is_object()) throw ModelError("model document must be a JSON object");
    for (const char* key : {"schemas", "states", "rows"})
        if (!doc.contains(key)) throw ModelError(std::string("model document lacks \"") + key + "\"");
    if (!doc["schemas"].is_array() || !doc["states"].is_array() || !doc["rows"].is_array())
        throw ModelError("\"schemas\", \"states\" and \"rows\" must be arrays");

    std::vector<RelationSchema> schemas;
    for (const auto& js : doc["schemas"]) {
        if (!js.is_object() || !js.contains("index") || !js.contains("labels") || !js.contains("semiring"))
            throw ModelError("schema entries need \"index\", \"labels\" and \"semiring\"");
        RelationSchema sc;
        sc.index = js["index"].get<int>();
        for (const auto& lab : js["labels"]) sc.labels.push_back(lab.get<std::string>());
        sc.semiring = semiring_from_string(js["semiring"].get<std::string>());
        schemas.push_back(std::move(sc));
    }
    check_schemas(schemas);

    std::vector<std::string> states;
    std::map<std::string, StateId> index;
    for (const auto& js : doc["states"]) {
        std::string name = js.get<std::string>();
        auto [it, fresh] = index.emplace(name, StateId{static_cast<std::uint32_t>(states.size())});
        if (!fresh) throw ModelError("duplicate state '" + name + "'");
        states.push_back(std::move(name));
    }

    // (rel, state, label) -> continuation; each triple exactly once.
    std::map<std::tuple<int, std::uint32_t, std::size_t>, FiniteSupportFn> rows;
    for (const auto& jr : doc["rows"]) {
        if (!jr.is_object() || !jr.contains("rel") || !jr.contains("state") || !jr.contains("label") ||
            !jr.contains("cont"))
            throw ModelError("row entries need \"rel\", \"state\", \"label\" and \"cont\"");
        int rel = jr["rel"].get<int>();
        if (rel < 1 || rel > static_cast<int>(schemas.size()))
            throw ModelError("row references unknown relation " + std::to_string(rel));
        const auto& sc = schemas[rel - 1];

        std::string sname = jr["state"].get<std::string>();
        auto sit = index.find(sname);
        if (sit == index.end()) throw ModelError("row references unknown state '" + sname + "'");

        std::string label = jr["label"].get<std::string>();
        auto lit = std::find(sc.labels.begin(), sc.labels.end(), label);
        if (lit == sc.labels.end())
            throw ModelError("row label '" + label + "' is not in the label set of relation " +
                             std::to_string(rel));
        std::size_t lpos = static_cast<std::size_t>(lit - sc.labels.begin());

        if (!jr["cont"].is_object()) throw ModelError("\"cont\" must be an object");
        FiniteSupportFn fn(sc.semiring);
        for (const auto& [tname, jv] : jr["cont"].items()) {
            auto tit = index.find(tname);
            if (tit == index.end())
                throw ModelError("continuation references unknown state '" + tname + "'");
            SemiringValue v = SemiringValue::from_json(jv, sc.semiring);
            if (v.is_zero())
                throw ModelError("continuation stores an explicit zero for '" + tname + "'");
            fn = fn + FiniteSupportFn::point(tit->second, std::move(v));
        }

        auto key = std::make_tuple(rel, sit->second.value, lpos);
        if (!rows.emplace(key, std::move(fn)).second)
            throw ModelError("duplicate row (" + std::to_string(rel) + ", " + sname + ", " + label + ")");
    }

    std::vector<std::map<std::string, std::size_t>> label_pos(schemas.size());
    for (std::size_t rel = 0; rel < schemas.size(); ++rel)
        for (std::size_t l = 0; l < schemas[rel].labels.size(); ++l)
            label_pos[rel].emplace(schemas[rel].labels[l], l);

    return build(states, schemas, [&](int rel, StateId s, const std::string& label) -> FiniteSupportFn {
        auto key = std::make_tuple(rel, s.value, label_pos[rel - 1].at(label));
        auto it = rows.find(key);
        if (it == rows.end())
            throw ModelError("missing row (" + std::to_string(rel) + ", " + states[s.value] + ", " +
                             label + "): the model must be total");
        return it->second;
    });
}

nlohmann::json FutsModel::to_json() const {
    nlohmann::json doc;
    doc["schemas"] = nlohmann::json::array();
    for (const auto& sc : schemas_) {
        nlohmann::json js;
        js["index"] = sc.index;
        js["labels"] = sc.labels;
        js["semiring"] = to_string(sc.semiring);
        doc["schemas"].push_back(std::move(js));
    }
    doc["states"] = state_names_;
    auto name_of = [this](StateId s) { return state_names_[s.value]; };
    doc["rows"] = nlohmann::json::array();
    for (std::size_t rel = 0; rel < schemas_.size(); ++rel) {
        for (std::size_t s = 0; s < state_names_.size(); ++s) {
            for (std::size_t l = 0; l < schemas_[rel].labels.size(); ++l) {
                nlohmann::json jr;
                jr["rel"] = schemas_[rel].index;
                jr["state"] = state_names_[s];
                jr["label"] = schemas_[rel].labels[l];
                jr["cont"] = table_[rel][s][l].to_json(name_of);
                doc["rows"].push_back(std::move(jr));
            }
        }
    }
    return doc;
}

std::string FutsModel::to_dot() const {
    std::ostringstream out;
    out << "digraph futs {\n";
    for (const auto& name : state_names_) out << "  " << quote_dot(name) << ";\n";
    for (std::size_t rel = 0; rel < schemas_.size(); ++rel) {
        for (std::size_t s = 0; s < state_names_.size(); ++s) {
            for (std::size_t l = 0; l < schemas_[rel].labels.size(); ++l) {
                for (const auto& [target, v] : table_[rel][s][l].entries()) {
                    out << "  " << quote_dot(state_names_[s]) << " -> "
                        << quote_dot(state_names_[target.value]) << " [label="
                        << quote_dot(schemas_[rel].labels[l] + "/" + v.str()) << "];\n";
                }
            }
        }
    }
    out << "}\n";
    return out.str();
}

Partition Partition::single_block(std::size_t n_states) {
    std::vector<StateId> all;
    all.reserve(n_states);
    for (std::uint32_t i = 0; i < n_states; ++i) all.push_back(StateId{i});
    std::vector<std::vector<StateId>> blocks;
    if (!all.empty()) blocks.push_back(std::move(all));
    return from_blocks(n_states, std::move(blocks));
}

Partition Partition::singletons(std::size_t n_states) {
    std::vector<std::vector<StateId>> blocks;
    blocks.reserve(n_states);
    for (std::uint32_t i = 0; i < n_states; ++i) blocks.push_back({StateId{i}});
    return from_blocks(n_states, std::move(blocks));
}

Partition Partition::from_blocks(std::size_t n_states, std::vector<std::vector<StateId>> blocks) {
    Partition p;
    p.block_of_.assign(n_states, std::numeric_limits<std::uint32_t>::max());
    for (auto& block : blocks) {
        if (block.empty()) throw ModelError("partition blocks must be non-empty");
        std::sort(block.begin(), block.end());
    }
    std::sort(blocks.begin(), blocks.end(),
              [](const auto& a, const auto& b) { return a.front() < b.front(); });
    for (std::size_t bi = 0; bi < blocks.size(); ++bi) {
        for (StateId s : blocks[bi]) {
            if (s.value >= n_states)
                throw ModelError("partition mentions a state outside the model");
            if (p.block_of_[s.value] != std::numeric_limits<std::uint32_t>::max())
                throw ModelError("partition blocks are not disjoint");
            p.block_of_[s.value] = static_cast<std::uint32_t>(bi);
        }
    }
    for (std::size_t s = 0; s < n_states; ++s)
        if (p.block_of_[s] == std::numeric_limits<std::uint32_t>::max())
            throw ModelError("partition does not cover the state set");
    p.blocks_ = std::move(blocks);
    return p;
}

std::set<std::set<std::string>> to_name_blocks(const Partition& p,
                                               const std::function<std::string(StateId)>& names) {
    std::set<std::set<std::string>> out;
    for (const auto& block : p.blocks()) {
        std::set<std::string> b;
        for (StateId s : block) b.insert(names(s));
        out.insert(std::move(b));
    }
    return out;
}

nlohmann::json Partition::to_json(const std::function<std::string(StateId)>& names) const {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& block : blocks_) {
        nlohmann::json jb = nlohmann::json::array();
        for (StateId s : block) jb.push_back(names(s));
        arr.push_back(std::move(jb));
    }
    return arr;
}

Partition refine_to_fixpoint(std::size_t n_states,
                             const std::function<Signature(StateId, const Partition&)>& signature,
                             std::vector<std::size_t>* trace) {
    Partition current = Partition::single_block(n_states);
    if (trace) trace->push_back(current.block_count());
    while (true) {
        std::vector<std::vector<StateId>> next;
        for (const auto& block : current.blocks()) {
            std::map<Signature, std::vector<StateId>> groups;
            for (StateId s : block) groups[signature(s, current)].push_back(s);
            for (auto& [sig, members] : groups) next.push_back(std::move(members));
        }
        std::size_t split_count = next.size();
        Partition refined = Partition::from_blocks(n_states, std::move(next));
        if (trace) trace->push_back(refined.block_count());
        if (split_count == current.block_count()) return refined;
        current = std::move(refined);
    }
}

Signature model_signature(const FutsModel& m, StateId s, const Partition& p) {
    Signature sig;
    for (std::size_t rel = 0; rel < m.schemas().size(); ++rel) {
        const auto& sc = m.schemas()[rel];
        for (std::size_t l = 0; l < sc.labels.size(); ++l) {
            std::map<std::size_t, SemiringValue> per_block;
            for (const auto& [target, v] : m.continuation(rel, s, l).entries()) {
                std::size_t b = p.block_of(target);
                auto it = per_block.find(b);
                if (it == per_block.end())
                    per_block.emplace(b, v);
                else
                    it->second = it->second + v;
            }
            for (auto& [b, sum] : per_block)
                if (!sum.is_zero()) sig.emplace(std::make_tuple(rel, l, b), std::move(sum));
        }
    }
    return sig;
}

bool is_bisimulation(const FutsModel& m, const Partition& p) {
    if (p.state_count() != m.state_count())
        throw ModelError("partition does not match the model's state set");
    for (const auto& block : p.blocks()) {
        if (block.size() < 2) continue;
        Signature reference = model_signature(m, block.front(), p);
        for (std::size_t i = 1; i < block.size(); ++i)
            if (model_signature(m, block[i], p) != reference) return false;
    }
    return true;
}

Partition coarsest_bisimulation(const FutsModel& m) {
    return refine_to_fixpoint(m.state_count(),
                              [&m](StateId s, const Partition& p) { return model_signature(m, s, p); });
}

Partition brute_force_coarsest(const FutsModel& m) {
    std::size_t n = m.state_count();
    if (n > 8) throw TooLarge("brute-force oracle is limited to 8 states");
    if (n == 0) return Partition::singletons(0);

    std::vector<std::vector<bool>> related(n, std::vector<bool>(n, false));
    for (std::size_t i = 0; i < n; ++i) related[i][i] = true;

    // Enumerate set partitions via restricted growth strings.
    std::vector<std::uint32_t> rgs(n, 0);
    while (true) {
        std::uint32_t max_block = *std::max_element(rgs.begin(), rgs.end());
        std::vector<std::vector<StateId>> blocks(max_block + 1);
        for (std::uint32_t i = 0; i < n; ++i) blocks[rgs[i]].push_back(StateId{i});
        if (is_bisimulation(m, Partition::from_blocks(n, blocks))) {
            for (const auto& block : blocks)
                for (StateId a : block)
                    for (StateId b : block) related[a.value][b.value] = true;
        }

        // next restricted growth string
        std::size_t pos = n;
        while (pos-- > 1) {
            std::uint32_t prefix_max = *std::max_element(rgs.begin(), rgs.begin() + pos);
            if (rgs[pos] <= prefix_max) {
                ++rgs[pos];
                std::fill(rgs.begin() + pos + 1, rgs.end(), 0);
                break;
            }
            rgs[pos] = 0;
        }
        if (pos == 0) break;
    }

    // The union of all bisimulations must itself be a bisimulation equivalence.
    for (std::size_t a = 0; a < n; ++a)
        for (std::size_t b = 0; b < n; ++b)
            for (std::size_t c = 0; c < n; ++c)
                if (related[a][b] && related[b][c] && !related[a][c])
                    throw Error("internal: union of bisimulations is not transitive");

    std::vector<std::vector<StateId>> blocks;
    std::vector<bool> placed(n, false);
    for (std::uint32_t a = 0; a < n; ++a) {
        if (placed[a]) continue;
        std::vector<StateId> block;
        for (std::uint32_t b = 0; b < n; ++b) {
            if (related[a][b]) {
                block.push_back(StateId{b});
                placed[b] = true;
            }
        }
        blocks.push_back(std::move(block));
    }
    Partition result = Partition::from_blocks(n, std::move(blocks));
    if (!is_bisimulation(m, result))
        throw Error("internal: union of bisimulations is not a bisimulation");
    return result;
}

FutsModel quotient(const FutsModel& m, const Partition& p) {
    if (!is_bisimulation(m, p))
        throw NotABisimulation("quotient requires a bisimulation partition");

    std::vector<std::string> q_states;
    q_states.reserve(p.block_count());
    for (const auto& block : p.blocks()) q_states.push_back(m.state_name(block.front()));

    return FutsModel::build(
        std::move(q_states), m.schemas(),
        [&](int rel_index, StateId q, const std::string& label) -> FiniteSupportFn {
            std::size_t rel = static_cast<std::size_t>(rel_index - 1);
            const auto& sc = m.schemas()[rel];
            auto lit = std::find(sc.labels.begin(), sc.labels.end(), label);
            std::size_t l = static_cast<std::size_t>(lit - sc.labels.begin());
            StateId rep = p.blocks()[q.value].front();
            std::map<std::size_t, SemiringValue> sums;
            for (const auto& [target, v] : m.continuation(rel, rep, l).entries()) {
                std::size_t b = p.block_of(target);
                auto it = sums.find(b);
                if (it == sums.end())
                    sums.emplace(b, v);
                else
                    it->second = it->second + v;
            }
            FiniteSupportFn fn(sc.semiring);
            for (const auto& [b, sum] : sums)
                fn = fn + FiniteSupportFn::point(StateId{static_cast<std::uint32_t>(b)}, sum);
            return fn;
        });
}

std::optional<Witness> find_witness(const FutsModel& m, const Partition& p, StateId a, StateId b) {
    Signature sa = model_signature(m, a, p);
    Signature sb = model_signature(m, b, p);
    // Walk both canonical maps in key order; first key with differing sums wins.
    auto ia = sa.begin();
    auto ib = sb.begin();
    std::optional<std::tuple<std::size_t, std::size_t, std::size_t>> key;
    while (ia != sa.end() || ib != sb.end()) {
        if (ib == sb.end() || (ia != sa.end() && ia->first < ib->first)) {
            key = ia->first;
            break;
        }
        if (ia == sa.end() || ib->first < ia->first) {
            key = ib->first;
            break;
        }
        if (!(ia->second == ib->second)) {
            key = ia->first;
            break;
        }
        ++ia;
        ++ib;
    }
    if (!key) return std::nullopt;

    auto [rel, l, block] = *key;
    const auto& sc = m.schemas()[rel];
    Witness w;
    w.rel_index = sc.index;
    w.label = sc.labels[l];
    for (StateId s : p.blocks()[block]) w.class_states.push_back(m.state_name(s));
    auto class_sum = [&](StateId s) {
        SemiringValue acc = SemiringValue::zero(sc.semiring);
        for (const auto& [target, v] : m.continuation(rel, s, l).entries())
            if (p.block_of(target) == block) acc = acc + v;
        return acc;
    };
    w.lhs = class_sum(a);
    w.rhs = class_sum(b);
    return w;
}

}  // namespace futs

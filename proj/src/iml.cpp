#include "futs/iml.hpp"

#include <algorithm>

namespace futs::iml {

using syntax::Token;
using syntax::TokenCursor;
using syntax::TokenKind;

namespace {

constexpr int kMaxUnfolds = 10000;

std::string join(const std::vector<std::string>& items, char sep) {
    std::string out;
    for (std::size_t i = 0; i < items.size(); ++i) {
        if (i) out.push_back(sep);
        out += items[i];
    }
    return out;
}

}  // namespace

TermRef ImlEnv::nil() {
    Term t;
    t.kind = Kind::nil;
    t.key = "0";
    return arena_.intern(std::move(t));
}

TermRef ImlEnv::act_prefix(const std::string& action, TermRef cont) {
    note_action(action);
    Term t;
    t.kind = Kind::act_prefix;
    t.action = action;
    t.left = cont;
    t.key = "a:" + action + ":" + std::to_string(cont->id.value);
    return arena_.intern(std::move(t));
}

TermRef ImlEnv::rate_prefix(Rational rate, TermRef cont) {
    if (!rate.is_positive()) throw Error("delay rate must be strictly positive");
    Term t;
    t.kind = Kind::rate_prefix;
    t.rate = std::move(rate);
    t.left = cont;
    t.key = "r:" + t.rate.str() + ":" + std::to_string(cont->id.value);
    return arena_.intern(std::move(t));
}

TermRef ImlEnv::choice(TermRef left, TermRef right) {
    Term t;
    t.kind = Kind::choice;
    t.left = left;
    t.right = right;
    t.key = "+:" + std::to_string(left->id.value) + ":" + std::to_string(right->id.value);
    return arena_.intern(std::move(t));
}

TermRef ImlEnv::coop(TermRef left, TermRef right, std::vector<std::string> coop_set) {
    std::sort(coop_set.begin(), coop_set.end());
    coop_set.erase(std::unique(coop_set.begin(), coop_set.end()), coop_set.end());
    for (const auto& a : coop_set) note_action(a);
    Term t;
    t.kind = Kind::coop;
    t.left = left;
    t.right = right;
    t.coop_set = std::move(coop_set);
    t.key = "|:" + std::to_string(left->id.value) + ":" + std::to_string(right->id.value) + ":" +
            join(t.coop_set, ',');
    return arena_.intern(std::move(t));
}

TermRef ImlEnv::constant(const std::string& name) {
    Term t;
    t.kind = Kind::constant;
    t.name = name;
    t.key = "X:" + name;
    return arena_.intern(std::move(t));
}

void ImlEnv::define(const std::string& name, TermRef body, std::size_t line) {
    if (def_index_.count(name))
        throw SourceError(SourceError::Kind::syntax, line, 1, "constant '" + name + "' defined twice");
    defs_.emplace_back(name, body);
    def_index_.emplace(name, body);
    def_lines_.emplace(name, line);
}

TermRef ImlEnv::lookup(const std::string& name) const {
    auto it = def_index_.find(name);
    return it == def_index_.end() ? nullptr : it->second;
}

void ImlEnv::note_action(const std::string& action) {
    if (alphabet_seen_.insert(action).second) alphabet_.push_back(action);
}

std::vector<std::string> ImlEnv::alphabet() const {
    if (alphabet_.empty()) return {"a"};
    return alphabet_;
}

namespace {

const Term* first_unguarded_constant(TermRef t) {
    switch (t->kind) {
        case Kind::nil:
        case Kind::act_prefix:
        case Kind::rate_prefix: return nullptr;
        case Kind::constant: return t;
        case Kind::choice:
        case Kind::coop: {
            if (const Term* hit = first_unguarded_constant(t->left)) return hit;
            return first_unguarded_constant(t->right);
        }
    }
    return nullptr;
}

void collect_constants(TermRef t, std::set<std::string>& out) {
    switch (t->kind) {
        case Kind::nil: return;
        case Kind::constant: out.insert(t->name); return;
        case Kind::act_prefix:
        case Kind::rate_prefix: collect_constants(t->left, out); return;
        case Kind::choice:
        case Kind::coop:
            collect_constants(t->left, out);
            collect_constants(t->right, out);
            return;
    }
}

}  // namespace

void ImlEnv::check_wellformed(TermRef root) const {
    std::set<std::string> used;
    for (const auto& [name, body] : defs_) collect_constants(body, used);
    if (root) collect_constants(root, used);
    for (const auto& name : used) {
        if (!def_index_.count(name))
            throw SourceError(SourceError::Kind::undefined_constant, 1, 1,
                              "constant '" + name + "' is not defined");
    }
    for (const auto& [name, body] : defs_) {
        if (const Term* hit = first_unguarded_constant(body)) {
            auto it = def_lines_.find(name);
            std::size_t line = it == def_lines_.end() ? 1 : it->second;
            throw SourceError(SourceError::Kind::unguarded_recursion, line, 1,
                              "definition of '" + name + "' uses constant '" + hit->name +
                                  "' outside any prefix");
        }
    }
}

// ---------------------------------------------------------------------------
// parsing

namespace {

class Parser {
public:
    Parser(ImlEnv& env, TokenCursor cursor) : env_(env), cur_(std::move(cursor)) {}

    TermRef expr() {
        TermRef t = term();
        while (cur_.accept(TokenKind::plus)) t = env_.choice(t, term());
        return t;
    }

    TermRef term() {
        TermRef t = factor();
        while (cur_.accept(TokenKind::less)) {
            std::vector<std::string> actions;
            if (!cur_.at(TokenKind::greater)) {
                actions.push_back(cur_.expect(TokenKind::action, "an action name").text);
                while (cur_.accept(TokenKind::comma))
                    actions.push_back(cur_.expect(TokenKind::action, "an action name").text);
            }
            cur_.expect(TokenKind::greater, "'>'");
            t = env_.coop(t, factor(), std::move(actions));
        }
        return t;
    }

    // factor := "nil" | ACTION "." factor | "(" RATE ")" "." factor | IDENT | "(" expr ")"
    TermRef factor() {
        if (cur_.at(TokenKind::action)) {
            Token t = cur_.next();
            if (t.text == "nil") return env_.nil();
            cur_.expect(TokenKind::dot, "'.' after action prefix");
            return env_.act_prefix(t.text, factor());
        }
        if (cur_.at(TokenKind::constant)) return env_.constant(cur_.next().text);
        if (cur_.accept(TokenKind::lparen)) {
            if (cur_.at(TokenKind::number)) {
                Rational rate = syntax::positive_rate(cur_.next());
                cur_.expect(TokenKind::rparen, "')'");
                cur_.expect(TokenKind::dot, "'.' after delay prefix");
                return env_.rate_prefix(std::move(rate), factor());
            }
            TermRef inner = expr();
            cur_.expect(TokenKind::rparen, "')'");
            return inner;
        }
        const Token& t = cur_.peek();
        throw SourceError(SourceError::Kind::syntax, t.line, t.col,
                          "expected a process term, found '" + TokenCursor::describe(t) + "'");
    }

    TokenCursor& cursor() { return cur_; }

private:
    ImlEnv& env_;
    TokenCursor cur_;
};

}  // namespace

ParseResult parse_iml(const std::string& text) {
    ParseResult result;
    Parser parser(result.env, TokenCursor(syntax::tokenize(text)));
    auto& cur = parser.cursor();

    while (!cur.at(TokenKind::end)) {
        if (cur.accept(TokenKind::newline)) continue;
        if (result.root) {
            const Token& t = cur.peek();
            throw SourceError(SourceError::Kind::syntax, t.line, t.col,
                              "only the final line may be a bare expression");
        }
        if (cur.at(TokenKind::constant) && cur.peek2().kind == TokenKind::define) {
            Token name = cur.next();
            cur.next();  // ":="
            result.env.define(name.text, parser.expr(), name.line);
        } else {
            result.root = parser.expr();
        }
        if (!cur.at(TokenKind::end)) cur.expect(TokenKind::newline, "end of line");
    }
    result.env.check_wellformed(result.root);
    return result;
}

TermRef parse_expression(ImlEnv& env, const std::string& text) {
    Parser parser(env, TokenCursor(syntax::tokenize(text)));
    TermRef t = parser.expr();
    while (parser.cursor().accept(TokenKind::newline)) {}
    parser.cursor().expect(TokenKind::end, "end of input");
    env.check_wellformed(t);
    return t;
}

// ---------------------------------------------------------------------------
// printing

namespace {

void print_rec(TermRef t, std::string& out) {
    switch (t->kind) {
        case Kind::nil: out += "nil"; return;
        case Kind::constant: out += t->name; return;
        case Kind::act_prefix:
        case Kind::rate_prefix: {
            if (t->kind == Kind::act_prefix)
                out += t->action + ".";
            else
                out += "(" + t->rate.str() + ").";
            bool parens = t->left->kind == Kind::choice || t->left->kind == Kind::coop;
            if (parens) out += "(";
            print_rec(t->left, out);
            if (parens) out += ")";
            return;
        }
        case Kind::choice: {
            print_rec(t->left, out);
            out += " + ";
            bool parens = t->right->kind == Kind::choice;
            if (parens) out += "(";
            print_rec(t->right, out);
            if (parens) out += ")";
            return;
        }
        case Kind::coop: {
            bool lparens = t->left->kind == Kind::choice;
            if (lparens) out += "(";
            print_rec(t->left, out);
            if (lparens) out += ")";
            out += " <" + join(t->coop_set, ',') + "> ";
            bool rparens = t->right->kind == Kind::choice || t->right->kind == Kind::coop;
            if (rparens) out += "(";
            print_rec(t->right, out);
            if (rparens) out += ")";
            return;
        }
    }
}

}  // namespace

std::string print_term(TermRef t) {
    std::string out;
    print_rec(t, out);
    return out;
}

// ---------------------------------------------------------------------------
// FuTS semantics: relation 1 (actions, booleans), relation 2 (delay, rationals)

namespace {

FiniteSupportFn action_step_rec(TermRef p, const std::string& action, ImlEnv& env, int unfolds) {
    if (unfolds > kMaxUnfolds) throw Error("recursion depth exceeded while unfolding constants");
    switch (p->kind) {
        case Kind::nil:
        case Kind::rate_prefix: return FiniteSupportFn(Semiring::boolean);
        case Kind::act_prefix:
            if (p->action == action)
                return FiniteSupportFn::point(p->left->id, SemiringValue(true));
            return FiniteSupportFn(Semiring::boolean);
        case Kind::choice:
            return action_step_rec(p->left, action, env, unfolds) +
                   action_step_rec(p->right, action, env, unfolds);
        case Kind::coop: {
            FiniteSupportFn vl = action_step_rec(p->left, action, env, unfolds);
            FiniteSupportFn vr = action_step_rec(p->right, action, env, unfolds);
            StatePairing pair = [&env, p](StateId x1, StateId x2) {
                return env.coop(env.term_by_id(x1), env.term_by_id(x2), p->coop_set)->id;
            };
            bool synced = std::binary_search(p->coop_set.begin(), p->coop_set.end(), action);
            if (synced) return FiniteSupportFn::pair_product(vl, vr, pair);
            FiniteSupportFn unit_l = FiniteSupportFn::unit(p->left->id, Semiring::boolean);
            FiniteSupportFn unit_r = FiniteSupportFn::unit(p->right->id, Semiring::boolean);
            return FiniteSupportFn::pair_product(vl, unit_r, pair) +
                   FiniteSupportFn::pair_product(unit_l, vr, pair);
        }
        case Kind::constant: {
            TermRef body = env.lookup(p->name);
            if (!body) throw Error("constant '" + p->name + "' is not defined");
            return action_step_rec(body, action, env, unfolds + 1);
        }
    }
    return FiniteSupportFn(Semiring::boolean);
}

FiniteSupportFn delay_step_rec(TermRef p, ImlEnv& env, int unfolds) {
    if (unfolds > kMaxUnfolds) throw Error("recursion depth exceeded while unfolding constants");
    switch (p->kind) {
        case Kind::nil:
        case Kind::act_prefix: return FiniteSupportFn(Semiring::rational);
        case Kind::rate_prefix:
            return FiniteSupportFn::point(p->left->id, SemiringValue(p->rate));
        case Kind::choice:
            return delay_step_rec(p->left, env, unfolds) + delay_step_rec(p->right, env, unfolds);
        case Kind::coop: {
            // delays always interleave: no synchronization on relation 2
            FiniteSupportFn vl = delay_step_rec(p->left, env, unfolds);
            FiniteSupportFn vr = delay_step_rec(p->right, env, unfolds);
            StatePairing pair = [&env, p](StateId x1, StateId x2) {
                return env.coop(env.term_by_id(x1), env.term_by_id(x2), p->coop_set)->id;
            };
            FiniteSupportFn unit_l = FiniteSupportFn::unit(p->left->id, Semiring::rational);
            FiniteSupportFn unit_r = FiniteSupportFn::unit(p->right->id, Semiring::rational);
            return FiniteSupportFn::pair_product(vl, unit_r, pair) +
                   FiniteSupportFn::pair_product(unit_l, vr, pair);
        }
        case Kind::constant: {
            TermRef body = env.lookup(p->name);
            if (!body) throw Error("constant '" + p->name + "' is not defined");
            return delay_step_rec(body, env, unfolds + 1);
        }
    }
    return FiniteSupportFn(Semiring::rational);
}

}  // namespace

FiniteSupportFn futs_action_step(TermRef p, const std::string& action, ImlEnv& env) {
    return action_step_rec(p, action, env, 0);
}

FiniteSupportFn futs_delay_step(TermRef p, ImlEnv& env) {
    return delay_step_rec(p, env, 0);
}

// ---------------------------------------------------------------------------
// standard SOS

namespace {

using ActionSet = std::set<std::pair<std::string, StateId>>;
using DelayMap = std::map<std::pair<Rational, StateId>, std::uint64_t>;

ActionSet action_rec(TermRef p, ImlEnv& env, int unfolds) {
    if (unfolds > kMaxUnfolds) throw Error("recursion depth exceeded while unfolding constants");
    ActionSet acc;
    switch (p->kind) {
        case Kind::nil:
        case Kind::rate_prefix: break;
        case Kind::act_prefix:
            acc.emplace(p->action, p->left->id);
            break;
        case Kind::choice: {
            acc = action_rec(p->left, env, unfolds);
            ActionSet rhs = action_rec(p->right, env, unfolds);
            acc.insert(rhs.begin(), rhs.end());
            break;
        }
        case Kind::coop: {
            ActionSet lhs = action_rec(p->left, env, unfolds);
            ActionSet rhs = action_rec(p->right, env, unfolds);
            for (const auto& [action, target] : lhs) {
                if (std::binary_search(p->coop_set.begin(), p->coop_set.end(), action)) continue;
                acc.emplace(action, env.coop(env.term_by_id(target), p->right, p->coop_set)->id);
            }
            for (const auto& [action, target] : rhs) {
                if (std::binary_search(p->coop_set.begin(), p->coop_set.end(), action)) continue;
                acc.emplace(action, env.coop(p->left, env.term_by_id(target), p->coop_set)->id);
            }
            for (const auto& [laction, ltarget] : lhs) {
                if (!std::binary_search(p->coop_set.begin(), p->coop_set.end(), laction)) continue;
                for (const auto& [raction, rtarget] : rhs) {
                    if (raction != laction) continue;
                    acc.emplace(laction,
                                env.coop(env.term_by_id(ltarget), env.term_by_id(rtarget), p->coop_set)->id);
                }
            }
            break;
        }
        case Kind::constant: {
            TermRef body = env.lookup(p->name);
            if (!body) throw Error("constant '" + p->name + "' is not defined");
            acc = action_rec(body, env, unfolds + 1);
            break;
        }
    }
    return acc;
}

DelayMap delay_rec(TermRef p, ImlEnv& env, int unfolds) {
    if (unfolds > kMaxUnfolds) throw Error("recursion depth exceeded while unfolding constants");
    DelayMap acc;
    switch (p->kind) {
        case Kind::nil:
        case Kind::act_prefix: break;
        case Kind::rate_prefix:
            acc[std::make_pair(p->rate, p->left->id)] += 1;
            break;
        case Kind::choice: {
            acc = delay_rec(p->left, env, unfolds);
            for (const auto& [key, mult] : delay_rec(p->right, env, unfolds)) acc[key] += mult;
            break;
        }
        case Kind::coop: {
            for (const auto& [key, mult] : delay_rec(p->left, env, unfolds)) {
                const auto& [rate, target] = key;
                acc[std::make_pair(rate, env.coop(env.term_by_id(target), p->right, p->coop_set)->id)] +=
                    mult;
            }
            for (const auto& [key, mult] : delay_rec(p->right, env, unfolds)) {
                const auto& [rate, target] = key;
                acc[std::make_pair(rate, env.coop(p->left, env.term_by_id(target), p->coop_set)->id)] +=
                    mult;
            }
            break;
        }
        case Kind::constant: {
            TermRef body = env.lookup(p->name);
            if (!body) throw Error("constant '" + p->name + "' is not defined");
            acc = delay_rec(body, env, unfolds + 1);
            break;
        }
    }
    return acc;
}

}  // namespace

std::vector<std::pair<std::string, TermRef>> standard_action_transitions(TermRef p, ImlEnv& env) {
    std::vector<std::pair<std::string, TermRef>> out;
    for (const auto& [action, target] : action_rec(p, env, 0))
        out.emplace_back(action, env.term_by_id(target));
    return out;
}

std::vector<DelayTransition> standard_delay_transitions(TermRef p, ImlEnv& env) {
    std::vector<DelayTransition> out;
    for (const auto& [key, mult] : delay_rec(p, env, 0))
        out.push_back({key.first, env.term_by_id(key.second), mult});
    return out;
}

bool t_fn(TermRef p, const std::string& action, const std::set<TermRef>& targets, ImlEnv& env) {
    for (const auto& [a, target] : standard_action_transitions(p, env))
        if (a == action && targets.count(target)) return true;
    return false;
}

Rational r_fn(TermRef p, const std::set<TermRef>& targets, ImlEnv& env) {
    Rational sum;
    for (const auto& tr : standard_delay_transitions(p, env)) {
        if (!targets.count(tr.target)) continue;
        sum = sum + tr.rate * Rational(static_cast<long>(tr.multiplicity));
    }
    return sum;
}

// ---------------------------------------------------------------------------
// exploration

Explored explore_iml(TermRef root, ImlEnv& env, std::size_t cap) {
    return explore_iml(std::vector<TermRef>{root}, env, cap);
}

Explored explore_iml(const std::vector<TermRef>& roots, ImlEnv& env, std::size_t cap) {
    env.check_wellformed();
    std::vector<std::string> labels = env.alphabet();

    std::vector<TermRef> states;
    std::map<StateId, std::size_t> seen;
    auto discover = [&](TermRef t) {
        if (seen.emplace(t->id, states.size()).second) {
            if (states.size() >= cap) throw StateCapExceeded(cap, states.size());
            states.push_back(t);
        }
    };
    for (TermRef r : roots) discover(r);

    std::vector<std::vector<FiniteSupportFn>> action_rows;
    std::vector<FiniteSupportFn> delay_rows;
    for (std::size_t next = 0; next < states.size(); ++next) {
        TermRef s = states[next];
        std::vector<FiniteSupportFn> row;
        row.reserve(labels.size());
        for (const auto& a : labels) {
            FiniteSupportFn fn = futs_action_step(s, a, env);
            for (const auto& [target, v] : fn.entries()) discover(env.term_by_id(target));
            row.push_back(std::move(fn));
        }
        action_rows.push_back(std::move(row));
        FiniteSupportFn delay = futs_delay_step(s, env);
        for (const auto& [target, v] : delay.entries()) discover(env.term_by_id(target));
        delay_rows.push_back(std::move(delay));
    }

    std::vector<std::string> names;
    names.reserve(states.size());
    for (TermRef t : states) names.push_back(print_term(t));

    auto remap = [&](const FiniteSupportFn& raw) {
        FiniteSupportFn out(raw.semiring());
        for (const auto& [target, v] : raw.entries()) {
            StateId model_id{static_cast<std::uint32_t>(seen.at(target))};
            out = out + FiniteSupportFn::point(model_id, v);
        }
        return out;
    };

    std::vector<RelationSchema> schemas = {{1, labels, Semiring::boolean},
                                           {2, {"delta"}, Semiring::rational}};
    FutsModel model = FutsModel::build(
        names, schemas, [&](int rel, StateId s, const std::string& label) -> FiniteSupportFn {
            if (rel == 2) return remap(delay_rows[s.value]);
            auto lit = std::find(labels.begin(), labels.end(), label);
            return remap(action_rows[s.value][static_cast<std::size_t>(lit - labels.begin())]);
        });
    return {std::move(model), std::move(states)};
}

StandardLts explore_standard(TermRef root, ImlEnv& env, std::size_t cap) {
    env.check_wellformed();
    StandardLts lts;
    std::map<StateId, std::size_t> seen;
    auto discover = [&](TermRef t) {
        if (seen.emplace(t->id, lts.states.size()).second) {
            if (lts.states.size() >= cap) throw StateCapExceeded(cap, lts.states.size());
            lts.states.push_back(t);
        }
    };
    discover(root);
    for (std::size_t next = 0; next < lts.states.size(); ++next) {
        auto acts = standard_action_transitions(lts.states[next], env);
        for (const auto& [a, target] : acts) discover(target);
        auto delays = standard_delay_transitions(lts.states[next], env);
        for (const auto& tr : delays) discover(tr.target);
        lts.action_transitions.push_back(std::move(acts));
        lts.delay_transitions.push_back(std::move(delays));
    }
    return lts;
}

Partition strong_bisimulation_partition(TermRef root, ImlEnv& env, std::size_t cap,
                                        std::vector<TermRef>* states_out) {
    std::vector<std::string> labels = env.alphabet();
    StandardLts lts = explore_standard(root, env, cap);

    std::map<StateId, std::size_t> index;
    for (std::size_t i = 0; i < lts.states.size(); ++i) index.emplace(lts.states[i]->id, i);

    // facet 0: T(s, a, block) (only true entries); facet 1: R(s, block) sums
    auto signature = [&](StateId s, const Partition& p) {
        Signature sig;
        for (const auto& [action, target] : lts.action_transitions[s.value]) {
            std::size_t label = static_cast<std::size_t>(
                std::find(labels.begin(), labels.end(), action) - labels.begin());
            std::size_t block = p.block_of(StateId{static_cast<std::uint32_t>(index.at(target->id))});
            sig.emplace(std::make_tuple(std::size_t{0}, label, block), SemiringValue(true));
        }
        for (const auto& tr : lts.delay_transitions[s.value]) {
            std::size_t block = p.block_of(StateId{static_cast<std::uint32_t>(index.at(tr.target->id))});
            auto key = std::make_tuple(std::size_t{1}, std::size_t{0}, block);
            SemiringValue add{tr.rate * Rational(static_cast<long>(tr.multiplicity))};
            auto it = sig.find(key);
            if (it == sig.end())
                sig.emplace(key, std::move(add));
            else
                it->second = it->second + add;
        }
        return sig;
    };

    Partition p = refine_to_fixpoint(lts.states.size(), signature);
    if (states_out) *states_out = lts.states;
    return p;
}

}  // namespace futs::iml

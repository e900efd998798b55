#include "futs/pepa.hpp"

#include <algorithm>
#include <deque>

namespace futs::pepa {

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

TermRef PepaEnv::nil() {
    Term t;
    t.kind = Kind::nil;
    t.key = "0";
    return arena_.intern(std::move(t));
}

TermRef PepaEnv::prefix(const std::string& action, Rational rate, TermRef cont) {
    if (!rate.is_positive()) throw Error("prefix rate must be strictly positive");
    note_action(action);
    Term t;
    t.kind = Kind::prefix;
    t.action = action;
    t.rate = std::move(rate);
    t.left = cont;
    t.key = "p:" + action + ":" + t.rate.str() + ":" + std::to_string(cont->id.value);
    return arena_.intern(std::move(t));
}

TermRef PepaEnv::choice(TermRef left, TermRef right) {
    Term t;
    t.kind = Kind::choice;
    t.left = left;
    t.right = right;
    t.key = "+:" + std::to_string(left->id.value) + ":" + std::to_string(right->id.value);
    return arena_.intern(std::move(t));
}

TermRef PepaEnv::coop(TermRef left, TermRef right, std::vector<std::string> coop_set) {
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

TermRef PepaEnv::constant(const std::string& name) {
    Term t;
    t.kind = Kind::constant;
    t.name = name;
    t.key = "X:" + name;
    return arena_.intern(std::move(t));
}

void PepaEnv::define(const std::string& name, TermRef body, std::size_t line) {
    if (def_index_.count(name))
        throw SourceError(SourceError::Kind::syntax, line, 1, "constant '" + name + "' defined twice");
    defs_.emplace_back(name, body);
    def_index_.emplace(name, body);
    def_lines_.emplace(name, line);
}

TermRef PepaEnv::lookup(const std::string& name) const {
    auto it = def_index_.find(name);
    return it == def_index_.end() ? nullptr : it->second;
}

void PepaEnv::note_action(const std::string& action) {
    if (alphabet_seen_.insert(action).second) alphabet_.push_back(action);
}

std::vector<std::string> PepaEnv::alphabet() const {
    if (alphabet_.empty()) return {"a"};
    return alphabet_;
}

namespace {

/// Walks a term without entering prefix continuations and reports the first
/// bare constant: in a definition body those are exactly the unguarded
/// occurrences.
const Term* first_unguarded_constant(TermRef t) {
    switch (t->kind) {
        case Kind::nil:
        case Kind::prefix: return nullptr;
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
        case Kind::prefix: collect_constants(t->left, out); return;
        case Kind::choice:
        case Kind::coop:
            collect_constants(t->left, out);
            collect_constants(t->right, out);
            return;
    }
}

}  // namespace

void PepaEnv::check_wellformed(TermRef root) const {
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
    Parser(PepaEnv& env, TokenCursor cursor) : env_(env), cur_(std::move(cursor)) {}

    // expr := expr "+" term | term
    TermRef expr() {
        TermRef t = term();
        while (cur_.accept(TokenKind::plus)) t = env_.choice(t, term());
        return t;
    }

    // term := term "<" actions ">" factor | factor
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
            for (const auto& a : actions) env_.note_action(a);
            t = env_.coop(t, factor(), std::move(actions));
        }
        return t;
    }

    // factor := "nil" | "(" ACTION "," RATE ")" "." factor | IDENT | "(" expr ")"
    TermRef factor() {
        if (cur_.at(TokenKind::action)) {
            const Token& t = cur_.peek();
            if (t.text == "nil") {
                cur_.next();
                return env_.nil();
            }
            throw SourceError(SourceError::Kind::syntax, t.line, t.col,
                              "unexpected action '" + t.text + "' (constants start upper-case)");
        }
        if (cur_.at(TokenKind::constant)) return env_.constant(cur_.next().text);
        if (cur_.accept(TokenKind::lparen)) {
            if (cur_.at(TokenKind::action) && cur_.peek().text != "nil") {
                std::string action = cur_.next().text;
                cur_.expect(TokenKind::comma, "','");
                Rational rate = syntax::positive_rate(cur_.expect(TokenKind::number, "a rate"));
                cur_.expect(TokenKind::rparen, "')'");
                cur_.expect(TokenKind::dot, "'.'");
                return env_.prefix(action, std::move(rate), factor());
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
    PepaEnv& env_;
    TokenCursor cur_;
};

}  // namespace

ParseResult parse_pepa(const std::string& text) {
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

TermRef parse_expression(PepaEnv& env, const std::string& text) {
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
        case Kind::prefix: {
            out += "(" + t->action + "," + t->rate.str() + ").";
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
// FuTS semantics (one rational relation over labels delta_a)

Rational arf_semantic(const FiniteSupportFn& f, const FiniteSupportFn& g) {
    SemiringValue tf = f.total();
    SemiringValue tg = g.total();
    const Rational& a = tf.as_rational();
    const Rational& b = tg.as_rational();
    if (a.is_zero() || b.is_zero()) return Rational::zero();
    return min(a, b) / (a * b);
}

namespace {

Rational apparent_rate_rec(TermRef p, const std::string& action, const PepaEnv& env, int unfolds) {
    if (unfolds > kMaxUnfolds) throw Error("recursion depth exceeded while unfolding constants");
    switch (p->kind) {
        case Kind::nil: return Rational::zero();
        case Kind::prefix: return p->action == action ? p->rate : Rational::zero();
        case Kind::choice:
            return apparent_rate_rec(p->left, action, env, unfolds) +
                   apparent_rate_rec(p->right, action, env, unfolds);
        case Kind::coop: {
            Rational l = apparent_rate_rec(p->left, action, env, unfolds);
            Rational r = apparent_rate_rec(p->right, action, env, unfolds);
            bool synced = std::binary_search(p->coop_set.begin(), p->coop_set.end(), action);
            return synced ? min(l, r) : l + r;
        }
        case Kind::constant: {
            TermRef body = env.lookup(p->name);
            if (!body) throw Error("constant '" + p->name + "' is not defined");
            return apparent_rate_rec(body, action, env, unfolds + 1);
        }
    }
    return Rational::zero();
}

FiniteSupportFn step_rec(TermRef p, const std::string& action, PepaEnv& env, int unfolds) {
    if (unfolds > kMaxUnfolds) throw Error("recursion depth exceeded while unfolding constants");
    switch (p->kind) {
        case Kind::nil: return FiniteSupportFn(Semiring::rational);
        case Kind::prefix:
            if (p->action == action)
                return FiniteSupportFn::point(p->left->id, SemiringValue(p->rate));
            return FiniteSupportFn(Semiring::rational);
        case Kind::choice:
            return step_rec(p->left, action, env, unfolds) + step_rec(p->right, action, env, unfolds);
        case Kind::coop: {
            FiniteSupportFn vl = step_rec(p->left, action, env, unfolds);
            FiniteSupportFn vr = step_rec(p->right, action, env, unfolds);
            StatePairing pair = [&env, p](StateId x1, StateId x2) {
                return env.coop(env.term_by_id(x1), env.term_by_id(x2), p->coop_set)->id;
            };
            bool synced = std::binary_search(p->coop_set.begin(), p->coop_set.end(), action);
            if (!synced) {
                FiniteSupportFn unit_l = FiniteSupportFn::unit(p->left->id, Semiring::rational);
                FiniteSupportFn unit_r = FiniteSupportFn::unit(p->right->id, Semiring::rational);
                return FiniteSupportFn::pair_product(vl, unit_r, pair) +
                       FiniteSupportFn::pair_product(unit_l, vr, pair);
            }
            SemiringValue arf{arf_semantic(vl, vr)};
            return FiniteSupportFn::pair_product(vl, vr, pair).scaled(arf);
        }
        case Kind::constant: {
            TermRef body = env.lookup(p->name);
            if (!body) throw Error("constant '" + p->name + "' is not defined");
            return step_rec(body, action, env, unfolds + 1);
        }
    }
    return FiniteSupportFn(Semiring::rational);
}

}  // namespace

Rational apparent_rate(TermRef p, const std::string& action, const PepaEnv& env) {
    return apparent_rate_rec(p, action, env, 0);
}

FiniteSupportFn futs_step(TermRef p, const std::string& action, PepaEnv& env) {
    return step_rec(p, action, env, 0);
}

// ---------------------------------------------------------------------------
// standard multi-transition semantics

namespace {

using TransitionMap = std::map<std::tuple<std::string, Rational, StateId>, std::uint64_t>;

void merge_into(TransitionMap& acc, const std::string& action, const Rational& rate, TermRef target,
                std::uint64_t mult) {
    acc[std::make_tuple(action, rate, target->id)] += mult;
}

TransitionMap standard_rec(TermRef p, PepaEnv& env, int unfolds) {
    if (unfolds > kMaxUnfolds) throw Error("recursion depth exceeded while unfolding constants");
    TransitionMap acc;
    switch (p->kind) {
        case Kind::nil: break;
        case Kind::prefix:
            merge_into(acc, p->action, p->rate, p->left, 1);
            break;
        case Kind::choice: {
            for (const auto& [key, mult] : standard_rec(p->left, env, unfolds)) acc[key] += mult;
            for (const auto& [key, mult] : standard_rec(p->right, env, unfolds)) acc[key] += mult;
            break;
        }
        case Kind::coop: {
            TransitionMap lhs = standard_rec(p->left, env, unfolds);
            TransitionMap rhs = standard_rec(p->right, env, unfolds);
            for (const auto& [key, mult] : lhs) {
                const auto& [action, rate, target] = key;
                if (std::binary_search(p->coop_set.begin(), p->coop_set.end(), action)) continue;
                merge_into(acc, action, rate, env.coop(env.term_by_id(target), p->right, p->coop_set),
                           mult);
            }
            for (const auto& [key, mult] : rhs) {
                const auto& [action, rate, target] = key;
                if (std::binary_search(p->coop_set.begin(), p->coop_set.end(), action)) continue;
                merge_into(acc, action, rate, env.coop(p->left, env.term_by_id(target), p->coop_set),
                           mult);
            }
            for (const auto& a : p->coop_set) {
                Rational ra_l = apparent_rate(p->left, a, env);
                Rational ra_r = apparent_rate(p->right, a, env);
                if (ra_l.is_zero() || ra_r.is_zero()) continue;
                Rational arf = min(ra_l, ra_r) / (ra_l * ra_r);
                for (const auto& [lkey, lmult] : lhs) {
                    const auto& [laction, lrate, ltarget] = lkey;
                    if (laction != a) continue;
                    for (const auto& [rkey, rmult] : rhs) {
                        const auto& [raction, rrate, rtarget] = rkey;
                        if (raction != a) continue;
                        merge_into(acc, a, arf * lrate * rrate,
                                   env.coop(env.term_by_id(ltarget), env.term_by_id(rtarget),
                                            p->coop_set),
                                   lmult * rmult);
                    }
                }
            }
            break;
        }
        case Kind::constant: {
            TermRef body = env.lookup(p->name);
            if (!body) throw Error("constant '" + p->name + "' is not defined");
            acc = standard_rec(body, env, unfolds + 1);
            break;
        }
    }
    return acc;
}

}  // namespace

std::vector<StandardTransition> standard_transitions(TermRef p, PepaEnv& env) {
    std::vector<StandardTransition> out;
    for (const auto& [key, mult] : standard_rec(p, env, 0)) {
        const auto& [action, rate, target] = key;
        out.push_back({action, rate, env.term_by_id(target), mult});
    }
    return out;
}

Rational q_rate(TermRef p, const std::set<TermRef>& targets, const std::string& action, PepaEnv& env) {
    Rational sum;
    for (const auto& tr : standard_transitions(p, env)) {
        if (tr.action != action || !targets.count(tr.target)) continue;
        sum = sum + tr.rate * Rational(static_cast<long>(tr.multiplicity));
    }
    return sum;
}

// ---------------------------------------------------------------------------
// exploration

Explored explore_pepa(TermRef root, PepaEnv& env, std::size_t cap) {
    return explore_pepa(std::vector<TermRef>{root}, env, cap);
}

Explored explore_pepa(const std::vector<TermRef>& roots, PepaEnv& env, std::size_t cap) {
    env.check_wellformed();
    std::vector<std::string> labels = env.alphabet();

    std::vector<TermRef> states;
    std::map<StateId, std::size_t> seen;  // arena id -> model index
    auto discover = [&](TermRef t) {
        if (seen.emplace(t->id, states.size()).second) {
            if (states.size() >= cap) throw StateCapExceeded(cap, states.size());
            states.push_back(t);
        }
    };
    for (TermRef r : roots) discover(r);

    // rows[model index][label index], keyed by arena ids until remapped
    std::vector<std::vector<FiniteSupportFn>> rows;
    for (std::size_t next = 0; next < states.size(); ++next) {
        TermRef s = states[next];
        std::vector<FiniteSupportFn> row;
        row.reserve(labels.size());
        for (const auto& a : labels) {
            FiniteSupportFn fn = futs_step(s, a, env);
            for (const auto& [target, v] : fn.entries()) discover(env.term_by_id(target));
            row.push_back(std::move(fn));
        }
        rows.push_back(std::move(row));
    }

    std::vector<std::string> names;
    names.reserve(states.size());
    for (TermRef t : states) names.push_back(print_term(t));

    RelationSchema schema{1, labels, Semiring::rational};
    FutsModel model = FutsModel::build(
        names, {schema}, [&](int, StateId s, const std::string& label) -> FiniteSupportFn {
            auto lit = std::find(labels.begin(), labels.end(), label);
            const FiniteSupportFn& raw = rows[s.value][static_cast<std::size_t>(lit - labels.begin())];
            FiniteSupportFn remapped(Semiring::rational);
            for (const auto& [target, v] : raw.entries()) {
                StateId model_id{static_cast<std::uint32_t>(seen.at(target))};
                remapped = remapped + FiniteSupportFn::point(model_id, v);
            }
            return remapped;
        });
    return {std::move(model), std::move(states)};
}

StandardLts explore_standard(TermRef root, PepaEnv& env, std::size_t cap) {
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
        std::vector<StandardTransition> ts = standard_transitions(lts.states[next], env);
        for (const auto& tr : ts) discover(tr.target);
        lts.transitions.push_back(std::move(ts));
    }
    return lts;
}

Partition strong_equivalence_partition(TermRef root, PepaEnv& env, std::size_t cap,
                                       std::vector<TermRef>* states_out) {
    std::vector<std::string> labels = env.alphabet();
    StandardLts lts = explore_standard(root, env, cap);

    std::map<StateId, std::size_t> index;
    for (std::size_t i = 0; i < lts.states.size(); ++i) index.emplace(lts.states[i]->id, i);

    auto signature = [&](StateId s, const Partition& p) {
        Signature sig;
        for (const auto& tr : lts.transitions[s.value]) {
            std::size_t label = static_cast<std::size_t>(
                std::find(labels.begin(), labels.end(), tr.action) - labels.begin());
            std::size_t block = p.block_of(StateId{static_cast<std::uint32_t>(index.at(tr.target->id))});
            auto key = std::make_tuple(std::size_t{0}, label, block);
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

}  // namespace futs::pepa

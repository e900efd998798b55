#include "doctest.h"

#include "futs/checks.hpp"
#include "futs/generate.hpp"
#include "futs/iml.hpp"

using namespace futs;
using namespace futs::iml;

namespace {

SemiringValue rv(long num, long den = 1) { return SemiringValue(Rational(num, den)); }
const SemiringValue kTrue{true};

StateId id_of(const Explored& e, const std::string& name) {
    auto s = e.model.state_by_name(name);
    REQUIRE(s.has_value());
    return *s;
}

/// The worked two-component system: X := a.(L).b.X, Y := a.(M).b.Y over {a,b}.
ParseResult example_system(const std::string& lambda, const std::string& mu) {
    return parse_iml("X := a.(" + lambda + ").b.X\n" + "Y := a.(" + mu + ").b.Y\n" + "X <a,b> Y\n");
}

}  // namespace

TEST_CASE("parse: action and delay prefixes") {
    auto parsed = parse_iml("X := a.(1/1).b.X\nX\n");
    REQUIRE(parsed.root);
    CHECK(print_term(parsed.env.lookup("X")) == "a.(1/1).b.X");

    auto plain = parse_iml("nil");
    CHECK(plain.root->kind == Kind::nil);

    try {
        parse_iml("(0).nil\n");
        FAIL("expected nonpositive rate");
    } catch (const SourceError& e) {
        CHECK(e.kind == SourceError::Kind::nonpositive_rate);
    }
}

TEST_CASE("parse: guardedness mirrors the term structure") {
    CHECK_THROWS_AS(parse_iml("X := X\nX"), SourceError);
    CHECK_NOTHROW(parse_iml("X := a.X\nX"));
    CHECK_NOTHROW(parse_iml("X := (1/2).X\nX"));
    CHECK_THROWS_AS(parse_iml("X := a.nil + X\nX"), SourceError);
}

TEST_CASE("action step: prefixes") {
    auto parsed = parse_iml("P := nil\na.P\n");
    FiniteSupportFn fn = futs_action_step(parsed.root, "a", parsed.env);
    CHECK(fn.semiring() == Semiring::boolean);
    CHECK(fn.at(parsed.env.constant("P")->id) == kTrue);
    CHECK(futs_action_step(parsed.root, "b", parsed.env).is_zero());

    auto delay = parse_expression(parsed.env, "(3/2).P");
    CHECK(futs_action_step(delay, "a", parsed.env).is_zero());
}

TEST_CASE("delay step: prefixes") {
    auto parsed = parse_iml("P := nil\n(3/2).P\n");
    FiniteSupportFn fn = futs_delay_step(parsed.root, parsed.env);
    CHECK(fn.semiring() == Semiring::rational);
    CHECK(fn.at(parsed.env.constant("P")->id) == rv(3, 2));

    auto act = parse_expression(parsed.env, "a.P");
    CHECK(futs_delay_step(act, parsed.env).is_zero());
}

TEST_CASE("worked example: synchronized action step") {
    auto parsed = example_system("1/1", "2/1");
    FiniteSupportFn fn = futs_action_step(parsed.root, "a", parsed.env);
    auto target = parse_expression(parsed.env, "(1/1).b.X <a,b> (2/1).b.Y");
    CHECK(fn.support_size() == 1);
    CHECK(fn.at(target->id) == kTrue);
}

TEST_CASE("worked example: delays interleave") {
    auto parsed = example_system("1/1", "2/1");
    auto mid = parse_expression(parsed.env, "(1/1).b.X <a,b> (2/1).b.Y");
    FiniteSupportFn fn = futs_delay_step(mid, parsed.env);
    auto left = parse_expression(parsed.env, "b.X <a,b> (2/1).b.Y");
    auto right = parse_expression(parsed.env, "(1/1).b.X <a,b> b.Y");
    CHECK(fn.support_size() == 2);
    CHECK(fn.at(left->id) == rv(1));
    CHECK(fn.at(right->id) == rv(2));
}

TEST_CASE("standard action transitions form a set") {
    auto parsed = parse_iml("P := nil\na.P\n");
    auto ts = standard_action_transitions(parsed.root, parsed.env);
    REQUIRE(ts.size() == 1);
    CHECK(ts[0].first == "a");
    CHECK(print_term(ts[0].second) == "P");

    CHECK(standard_action_transitions(parsed.env.nil(), parsed.env).empty());

    auto dup = parse_expression(parsed.env, "a.P + a.P");
    CHECK(standard_action_transitions(dup, parsed.env).size() == 1);
}

TEST_CASE("standard delay transitions count derivations") {
    auto parsed = parse_iml("P := nil\n(1).P\n");
    auto ts = standard_delay_transitions(parsed.root, parsed.env);
    REQUIRE(ts.size() == 1);
    CHECK(ts[0].rate == Rational(1, 1));
    CHECK(ts[0].multiplicity == 1);

    auto dup = parse_expression(parsed.env, "(1).P + (1).P");
    auto ts2 = standard_delay_transitions(dup, parsed.env);
    REQUIRE(ts2.size() == 1);
    CHECK(ts2[0].multiplicity == 2);

    auto act = parse_expression(parsed.env, "a.P");
    CHECK(standard_delay_transitions(act, parsed.env).empty());
}

TEST_CASE("T and R functions") {
    auto parsed = parse_iml("P := nil\na.P\n");
    TermRef p = parsed.env.constant("P");
    CHECK(t_fn(parsed.root, "a", {p}, parsed.env));
    CHECK(!t_fn(parsed.root, "b", {p}, parsed.env));
    CHECK(!t_fn(parsed.env.nil(), "a", {p}, parsed.env));

    auto delay = parse_expression(parsed.env, "(3/2).P");
    CHECK(r_fn(delay, {p}, parsed.env) == Rational(3, 2));
    CHECK(r_fn(parsed.root, {p}, parsed.env) == Rational::zero());

    auto dup = parse_expression(parsed.env, "(1).P + (1).P");
    CHECK(r_fn(dup, {p}, parsed.env) == Rational(2, 1));
}

TEST_CASE("explore: action chain") {
    auto parsed = parse_iml("a.nil\n");
    Explored e = explore_iml(parsed.root, parsed.env);
    CHECK(e.model.state_count() == 2);
    REQUIRE(e.model.schemas().size() == 2);
    CHECK(e.model.schemas()[0].semiring == Semiring::boolean);
    CHECK(e.model.schemas()[1].labels == std::vector<std::string>{"delta"});
    StateId root = id_of(e, "a.nil");
    StateId nil = id_of(e, "nil");
    CHECK(e.model.continuation(0, root, 0).at(nil) == kTrue);
    CHECK(e.model.continuation(1, root, 0).is_zero());
    CHECK(e.model.continuation(1, nil, 0).is_zero());
}

TEST_CASE("explore: nil has all-zero rows in both relations") {
    auto parsed = parse_iml("nil\n");
    Explored e = explore_iml(parsed.root, parsed.env);
    CHECK(e.model.state_count() == 1);
    CHECK(e.model.continuation(0, StateId{0}, 0).is_zero());
    CHECK(e.model.continuation(1, StateId{0}, 0).is_zero());
}

TEST_CASE("explore: the worked example yields exactly five states") {
    auto parsed = example_system("1/1", "2/1");
    Explored e = explore_iml(parsed.root, parsed.env);
    CHECK(e.model.state_count() == 5);

    StateId s0 = id_of(e, "X <a,b> Y");
    StateId s1 = id_of(e, "(1/1).b.X <a,b> (2/1).b.Y");
    StateId s2 = id_of(e, "b.X <a,b> (2/1).b.Y");
    StateId s3 = id_of(e, "(1/1).b.X <a,b> b.Y");
    StateId s4 = id_of(e, "b.X <a,b> b.Y");

    std::size_t label_a = 0, label_b = 1;
    REQUIRE(e.model.schemas()[0].labels == std::vector<std::string>{"a", "b"});

    // action relation
    CHECK(e.model.continuation(0, s0, label_a).at(s1) == kTrue);
    CHECK(e.model.continuation(0, s0, label_a).support_size() == 1);
    CHECK(e.model.continuation(0, s0, label_b).is_zero());
    CHECK(e.model.continuation(0, s4, label_b).at(s0) == kTrue);
    CHECK(e.model.continuation(0, s1, label_a).is_zero());
    CHECK(e.model.continuation(0, s2, label_b).is_zero());

    // delay relation
    CHECK(e.model.continuation(1, s1, 0).at(s2) == rv(1));
    CHECK(e.model.continuation(1, s1, 0).at(s3) == rv(2));
    CHECK(e.model.continuation(1, s2, 0).at(s4) == rv(2));
    CHECK(e.model.continuation(1, s3, 0).at(s4) == rv(1));
    CHECK(e.model.continuation(1, s0, 0).is_zero());
    CHECK(e.model.continuation(1, s4, 0).is_zero());
}

TEST_CASE("strong bisimulation: boolean side absorbs duplication, rates do not") {
    auto parsed = parse_iml("c.(a.nil) + d.(a.nil + a.nil)\n");
    std::vector<TermRef> states;
    Partition p = strong_bisimulation_partition(parsed.root, parsed.env, 10000, &states);
    auto find = [&](const std::string& name) -> std::uint32_t {
        for (std::size_t i = 0; i < states.size(); ++i)
            if (print_term(states[i]) == name) return static_cast<std::uint32_t>(i);
        FAIL("state not found: " << name);
        return 0;
    };
    CHECK(p.block_of(StateId{find("a.nil")}) == p.block_of(StateId{find("a.nil + a.nil")}));

    auto rated = parse_iml("c.((1).nil) + d.((1).nil + (1).nil)\n");
    std::vector<TermRef> rstates;
    Partition rp = strong_bisimulation_partition(rated.root, rated.env, 10000, &rstates);
    auto rfind = [&](const std::string& name) -> std::uint32_t {
        for (std::size_t i = 0; i < rstates.size(); ++i)
            if (print_term(rstates[i]) == name) return static_cast<std::uint32_t>(i);
        FAIL("state not found: " << name);
        return 0;
    };
    CHECK(rp.block_of(StateId{rfind("(1/1).nil")}) != rp.block_of(StateId{rfind("(1/1).nil + (1/1).nil")}));
}

TEST_CASE("rate-free fragment discriminates branching like the boolean example") {
    auto parsed = parse_iml("a.b.nil + a.c.nil\n");
    TermRef q = parse_expression(parsed.env, "a.(b.nil + c.nil)");
    Explored e = explore_iml({parsed.root, q}, parsed.env);

    // rate-free: the delay relation is identically zero
    for (std::uint32_t s = 0; s < e.model.state_count(); ++s)
        CHECK(e.model.continuation(1, StateId{s}, 0).is_zero());

    Partition p = coarsest_bisimulation(e.model);
    CHECK(!p.same_block(StateId{0}, StateId{1}));
}

TEST_CASE("mixed prefixes coexist on one state") {
    auto parsed = parse_iml("a.(1).nil + (2).b.nil\n");
    bool has_action = !futs_action_step(parsed.root, "a", parsed.env).is_zero();
    bool has_delay = !futs_delay_step(parsed.root, parsed.env).is_zero();
    CHECK(has_action);
    CHECK(has_delay);
}

TEST_CASE("round-trip: print then parse is the identity on corpus terms") {
    auto sources = gen::corpus(Language::iml, 83, 40, 4);
    for (const auto& src : sources) {
        auto parsed = parse_iml(src);
        REQUIRE(parsed.root);
        CHECK(parse_expression(parsed.env, print_term(parsed.root)) == parsed.root);
        for (const auto& [name, body] : parsed.env.definitions())
            CHECK(parse_expression(parsed.env, print_term(body)) == body);
    }
}

TEST_CASE("lemma 6.5 holds on a random corpus") {
    auto sources = gen::corpus(Language::iml, 7, 60, 4);
    auto r = checks::lemma65(sources, 4000);
    CHECK(r.ok());
    CHECK(r.passed() + r.skipped() == sources.size());
}

TEST_CASE("theorem 6.6 holds on a random corpus") {
    auto sources = gen::corpus(Language::iml, 8, 40, 4);
    auto r = checks::thm66(sources, 4000);
    CHECK(r.ok());
    CHECK(r.passed() > 0);
}

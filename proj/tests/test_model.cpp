#include "doctest.h"

#include <random>

#include "futs/model.hpp"
#include "test_support.hpp"

using namespace futs;

namespace {

FiniteSupportFn zero_q() { return FiniteSupportFn(Semiring::rational); }

FutsModel two_state_chain() {
    RelationSchema sc{1, {"a"}, Semiring::rational};
    return FutsModel::build({"P", "Q"}, {sc}, [](int, StateId s, const std::string&) {
        if (s.value == 0)
            return FiniteSupportFn::point(StateId{1}, SemiringValue(Rational(1, 1)));
        return FiniteSupportFn(Semiring::rational);
    });
}

/// The branching example over the booleans: P = a.b.0 + a.c.0, Q = a.(b.0 + c.0).
FutsModel ccs_model() {
    // 0:P 1:Q 2:b.0 3:c.0 4:b.0+c.0 5:0
    RelationSchema sc{1, {"a", "b", "c"}, Semiring::boolean};
    auto tt = SemiringValue(true);
    return FutsModel::build(
        {"P", "Q", "b.0", "c.0", "b.0+c.0", "0"}, {sc},
        [&](int, StateId s, const std::string& label) {
            FiniteSupportFn fn(Semiring::boolean);
            if (s.value == 0 && label == "a") {
                fn = fn + FiniteSupportFn::point(StateId{2}, tt) +
                     FiniteSupportFn::point(StateId{3}, tt);
            } else if (s.value == 1 && label == "a") {
                fn = fn + FiniteSupportFn::point(StateId{4}, tt);
            } else if (s.value == 2 && label == "b") {
                fn = fn + FiniteSupportFn::point(StateId{5}, tt);
            } else if (s.value == 3 && label == "c") {
                fn = fn + FiniteSupportFn::point(StateId{5}, tt);
            } else if (s.value == 4 && (label == "b" || label == "c")) {
                fn = fn + FiniteSupportFn::point(StateId{5}, tt);
            }
            return fn;
        });
}

}  // namespace

TEST_CASE("build: one deadlocked state") {
    RelationSchema sc{1, {"a"}, Semiring::rational};
    FutsModel m = FutsModel::build({"s"}, {sc}, [](int, StateId, const std::string&) {
        return FiniteSupportFn(Semiring::rational);
    });
    CHECK(m.state_count() == 1);
    CHECK(m.continuation(0, StateId{0}, 0).is_zero());
}

TEST_CASE("build: two states with one transition") {
    FutsModel m = two_state_chain();
    CHECK(m.continuation(0, StateId{0}, 0).at(StateId{1}) == SemiringValue(Rational(1, 1)));
}

TEST_CASE("build: support escaping the state set is rejected") {
    RelationSchema sc{1, {"a"}, Semiring::rational};
    CHECK_THROWS_AS(FutsModel::build({"s"}, {sc},
                                     [](int, StateId, const std::string&) {
                                         return FiniteSupportFn::point(
                                             StateId{5}, SemiringValue(Rational(1, 1)));
                                     }),
                    ModelError);
}

TEST_CASE("build: schema and tag validation") {
    RelationSchema dup{1, {"a", "a"}, Semiring::rational};
    auto zero_eval = [](int, StateId, const std::string&) { return FiniteSupportFn(Semiring::rational); };
    CHECK_THROWS_AS(FutsModel::build({"s"}, {dup}, zero_eval), ModelError);

    RelationSchema bad_index{2, {"a"}, Semiring::rational};
    CHECK_THROWS_AS(FutsModel::build({"s"}, {bad_index}, zero_eval), ModelError);

    RelationSchema sc{1, {"a"}, Semiring::boolean};
    CHECK_THROWS_AS(FutsModel::build({"s"}, {sc}, zero_eval), ModelError);  // rational fn, bool schema

    CHECK_THROWS_AS(FutsModel::build({"s", "s"}, {sc},
                                     [](int, StateId, const std::string&) {
                                         return FiniteSupportFn(Semiring::boolean);
                                     }),
                    ModelError);
}

TEST_CASE("import: well-formed boolean document") {
    auto doc = nlohmann::json::parse(R"({
        "schemas": [{"index": 1, "labels": ["a"], "semiring": "bool"}],
        "states": ["u", "v"],
        "rows": [
            {"rel": 1, "state": "u", "label": "a", "cont": {"v": true}},
            {"rel": 1, "state": "v", "label": "a", "cont": {}}
        ]
    })");
    FutsModel m = FutsModel::from_json(doc);
    CHECK(m.state_count() == 2);
    CHECK(m.continuation(0, StateId{0}, 0).at(StateId{1}) == SemiringValue(true));
    CHECK(m.to_json() == FutsModel::from_json(m.to_json()).to_json());
}

TEST_CASE("import: totality is enforced") {
    auto doc = nlohmann::json::parse(R"({
        "schemas": [{"index": 1, "labels": ["a"], "semiring": "bool"}],
        "states": ["u", "v"],
        "rows": [{"rel": 1, "state": "u", "label": "a", "cont": {}}]
    })");
    CHECK_THROWS_WITH_AS(FutsModel::from_json(doc), doctest::Contains("total"), ModelError);
}

TEST_CASE("import: malformed documents are rejected") {
    auto base = nlohmann::json::parse(R"({
        "schemas": [{"index": 1, "labels": ["a"], "semiring": "rational"}],
        "states": ["u"],
        "rows": [{"rel": 1, "state": "u", "label": "a", "cont": {}}]
    })");

    auto bad = base;
    bad["schemas"][0]["semiring"] = "tropical";
    CHECK_THROWS_AS(FutsModel::from_json(bad), Error);

    bad = base;
    bad["rows"][0]["cont"] = {{"u", "0/1"}};
    CHECK_THROWS_AS(FutsModel::from_json(bad), ModelError);  // explicit zero entry

    bad = base;
    bad["rows"][0]["cont"] = {{"w", "1/2"}};
    CHECK_THROWS_AS(FutsModel::from_json(bad), ModelError);  // unknown target

    bad = base;
    bad["rows"][0]["label"] = "b";
    CHECK_THROWS_AS(FutsModel::from_json(bad), ModelError);

    bad = base;
    bad["rows"].push_back(bad["rows"][0]);
    CHECK_THROWS_AS(FutsModel::from_json(bad), ModelError);  // duplicate row

    bad = base;
    bad["rows"][0]["cont"] = {{"u", true}};
    CHECK_THROWS_AS(FutsModel::from_json(bad), SemiringMismatch);
}

TEST_CASE("import: reactive probabilistic system rows sum to one") {
    auto doc = nlohmann::json::parse(R"({
        "schemas": [{"index": 1, "labels": ["a"], "semiring": "rational"}],
        "states": ["u0", "u1", "u2", "u3", "u4"],
        "rows": [
            {"rel": 1, "state": "u0", "label": "a", "cont": {"u1": "1/2", "u2": "1/2"}},
            {"rel": 1, "state": "u1", "label": "a", "cont": {"u3": "1/3", "u4": "2/3"}},
            {"rel": 1, "state": "u2", "label": "a", "cont": {"u2": "1/1"}},
            {"rel": 1, "state": "u3", "label": "a", "cont": {"u3": "1/1"}},
            {"rel": 1, "state": "u4", "label": "a", "cont": {"u0": "1/4", "u4": "3/4"}}
        ]
    })");
    FutsModel m = FutsModel::from_json(doc);
    for (std::uint32_t s = 0; s < m.state_count(); ++s)
        CHECK(m.continuation(0, StateId{s}, 0).total() == SemiringValue(Rational(1, 1)));
}

TEST_CASE("is_bisimulation: identity partition always works") {
    FutsModel m = ccs_model();
    CHECK(is_bisimulation(m, Partition::singletons(m.state_count())));
}

TEST_CASE("is_bisimulation: relating b.0 with b.0+c.0 fails") {
    FutsModel m = ccs_model();
    // {P} {Q} {b.0, b.0+c.0} {c.0} {0}
    auto p = Partition::from_blocks(
        6, {{StateId{0}}, {StateId{1}}, {StateId{2}, StateId{4}}, {StateId{3}}, {StateId{5}}});
    CHECK(!is_bisimulation(m, p));
}

TEST_CASE("is_bisimulation: identical rows in one block") {
    RelationSchema sc{1, {"a"}, Semiring::rational};
    FutsModel m = FutsModel::build({"u", "v"}, {sc}, [](int, StateId, const std::string&) {
        return FiniteSupportFn::point(StateId{0}, SemiringValue(Rational(2, 1)));
    });
    CHECK(is_bisimulation(m, Partition::from_blocks(2, {{StateId{0}, StateId{1}}})));
}

TEST_CASE("is_bisimulation: partition must match the model") {
    FutsModel m = two_state_chain();
    CHECK_THROWS_AS(is_bisimulation(m, Partition::singletons(3)), ModelError);
}

TEST_CASE("coarsest_bisimulation separates the branching example") {
    FutsModel m = ccs_model();
    Partition p = coarsest_bisimulation(m);
    CHECK(!p.same_block(StateId{0}, StateId{1}));  // P vs Q
    CHECK(!p.same_block(StateId{2}, StateId{4}));  // b.0 vs b.0+c.0
    CHECK(is_bisimulation(m, p));
}

TEST_CASE("coarsest_bisimulation merges indistinguishable states") {
    RelationSchema sc{1, {"a"}, Semiring::rational};
    FutsModel m = FutsModel::build({"x", "y", "z"}, {sc}, [](int, StateId, const std::string&) {
        return FiniteSupportFn(Semiring::rational);
    });
    CHECK(coarsest_bisimulation(m).block_count() == 1);
}

TEST_CASE("refinement is monotone and terminates within |S| rounds") {
    std::mt19937_64 rng(23);
    for (int i = 0; i < 50; ++i) {
        FutsModel m = test_support::random_model(rng, 8);
        std::vector<std::size_t> trace;
        Partition p = refine_to_fixpoint(
            m.state_count(), [&](StateId s, const Partition& q) { return model_signature(m, s, q); },
            &trace);
        for (std::size_t k = 1; k < trace.size(); ++k) CHECK(trace[k] >= trace[k - 1]);
        CHECK(trace.size() <= m.state_count() + 2);
        CHECK(is_bisimulation(m, p));
    }
}

TEST_CASE("brute force oracle basics") {
    RelationSchema sc{1, {"a"}, Semiring::rational};
    FutsModel one = FutsModel::build({"s"}, {sc}, [](int, StateId, const std::string&) {
        return FiniteSupportFn(Semiring::rational);
    });
    CHECK(brute_force_coarsest(one).block_count() == 1);

    FutsModel twin = FutsModel::build({"u", "v"}, {sc}, [](int, StateId, const std::string&) {
        return FiniteSupportFn::point(StateId{1}, SemiringValue(Rational(1, 2)));
    });
    CHECK(brute_force_coarsest(twin).block_count() == 1);

    std::vector<std::string> many;
    for (int i = 0; i < 9; ++i) many.push_back("s" + std::to_string(i));
    FutsModel big = FutsModel::build(many, {sc}, [](int, StateId, const std::string&) {
        return FiniteSupportFn(Semiring::rational);
    });
    CHECK_THROWS_AS(brute_force_coarsest(big), TooLarge);
}

TEST_CASE("refinement agrees with the brute-force oracle on random models") {
    std::mt19937_64 rng(29);
    for (int i = 0; i < 60; ++i) {
        FutsModel m = test_support::random_model(rng, 6);
        CHECK(coarsest_bisimulation(m) == brute_force_coarsest(m));
    }
}

TEST_CASE("quotient by the identity partition is isomorphic") {
    FutsModel m = ccs_model();
    FutsModel q = quotient(m, Partition::singletons(m.state_count()));
    CHECK(q.to_json() == m.to_json());
}

TEST_CASE("quotient requires a bisimulation") {
    FutsModel m = ccs_model();
    auto bad = Partition::from_blocks(
        6, {{StateId{0}, StateId{1}}, {StateId{2}}, {StateId{3}}, {StateId{4}}, {StateId{5}}});
    CHECK_THROWS_AS(quotient(m, bad), NotABisimulation);
}

TEST_CASE("quotient sums class values") {
    // u ~ v, both mapping {u: 1/2, v: 1/2}; the class row must be {[u]: 1/1}
    RelationSchema sc{1, {"a"}, Semiring::rational};
    FutsModel m = FutsModel::build({"u", "v"}, {sc}, [](int, StateId, const std::string&) {
        auto half = SemiringValue(Rational(1, 2));
        return FiniteSupportFn::point(StateId{0}, half) + FiniteSupportFn::point(StateId{1}, half);
    });
    Partition p = coarsest_bisimulation(m);
    REQUIRE(p.block_count() == 1);
    FutsModel q = quotient(m, p);
    CHECK(q.state_count() == 1);
    CHECK(q.continuation(0, StateId{0}, 0).at(StateId{0}) == SemiringValue(Rational(1, 1)));
}

TEST_CASE("quotient laws on random models") {
    std::mt19937_64 rng(31);
    for (int i = 0; i < 40; ++i) {
        FutsModel m = test_support::random_model(rng, 6);
        Partition p = coarsest_bisimulation(m);
        FutsModel q = quotient(m, p);

        // homomorphism law: class sums of any member match the quotient row
        for (std::size_t rel = 0; rel < m.schemas().size(); ++rel) {
            const auto& sc = m.schemas()[rel];
            for (std::size_t bi = 0; bi < p.block_count(); ++bi) {
                for (StateId member : p.blocks()[bi]) {
                    for (std::size_t l = 0; l < sc.labels.size(); ++l) {
                        for (std::size_t target = 0; target < p.block_count(); ++target) {
                            SemiringValue sum = SemiringValue::zero(sc.semiring);
                            for (StateId t : p.blocks()[target])
                                sum = sum + m.continuation(rel, member, l).at(t);
                            CHECK(q.continuation(rel, StateId{static_cast<std::uint32_t>(bi)}, l)
                                      .at(StateId{static_cast<std::uint32_t>(target)}) == sum);
                        }
                    }
                }
            }
        }

        // the quotient is already minimal
        CHECK(coarsest_bisimulation(q).block_count() == q.state_count());
    }
}

TEST_CASE("witness pinpoints the first distinguishing class") {
    FutsModel m = ccs_model();
    Partition p = coarsest_bisimulation(m);
    auto w = find_witness(m, p, StateId{2}, StateId{4});  // b.0 vs b.0+c.0
    REQUIRE(w.has_value());
    CHECK(w->label == "c");
    CHECK(w->class_states == std::vector<std::string>{"0"});
    CHECK(w->lhs == SemiringValue(false));
    CHECK(w->rhs == SemiringValue(true));

    CHECK(!find_witness(m, p, StateId{2}, StateId{2}).has_value());
}

TEST_CASE("partition validation") {
    CHECK_THROWS_AS(Partition::from_blocks(2, {{StateId{0}}}), ModelError);               // not covering
    CHECK_THROWS_AS(Partition::from_blocks(2, {{StateId{0}, StateId{0}}, {StateId{1}}}), ModelError);
    CHECK_THROWS_AS(Partition::from_blocks(1, {{StateId{0}}, {}}), ModelError);           // empty block
    CHECK_THROWS_AS(Partition::from_blocks(1, {{StateId{0}, StateId{1}}}), ModelError);   // outside
}

TEST_CASE("dot export lists one edge per support entry") {
    FutsModel m = two_state_chain();
    std::string dot = m.to_dot();
    CHECK(dot.find("\"P\" -> \"Q\" [label=\"a/1/1\"]") != std::string::npos);
}

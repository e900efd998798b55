// Acceptance suite: exact reproduction of the worked examples plus the
// property suites, one pass/fail line per criterion.

#include <chrono>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "futs/checks.hpp"
#include "futs/cli.hpp"
#include "futs/generate.hpp"
#include "futs/iml.hpp"
#include "futs/model.hpp"
#include "futs/pepa.hpp"

#include "test_support.hpp"

using namespace futs;

namespace {

struct Failure : Error {
    using Error::Error;
};

void require(bool cond, const std::string& what) {
    if (!cond) throw Failure(what);
}

std::string describe(const checks::Report& r) {
    std::ostringstream out;
    out << r.passed() << " passed, " << r.failed() << " failed, " << r.skipped() << " skipped";
    return out.str();
}

void require_clean(const checks::Report& r) {
    if (r.ok()) return;
    for (const auto& item : r.items)
        if (item.status == checks::Status::fail)
            throw Failure("term " + std::to_string(item.index) + ": " + item.detail);
}

constexpr std::uint64_t kCorpusSeed = 42;
constexpr std::size_t kCorpusCount = 500;
constexpr int kCorpusDepth = 5;
constexpr std::size_t kCap = 10000;

// --- criterion 1: branching discrimination of the boolean example ----------

std::string criterion_fig1() {
    std::ostringstream out, err;
    int code = cli::run({"bisim", "/dev/null", "--lang", "iml", "--root", "a.b.nil + a.c.nil",
                         "--root", "a.(b.nil + c.nil)"},
                        out, err);
    require(code == 3, "bisim exit code was " + std::to_string(code) + ", expected 3");
    require(out.str().find("not-bisimilar") != std::string::npos, "verdict line missing");

    auto parsed = iml::parse_iml("a.b.nil + a.c.nil\n");
    iml::TermRef q = iml::parse_expression(parsed.env, "a.(b.nil + c.nil)");
    auto explored = iml::explore_iml({parsed.root, q}, parsed.env, kCap);
    Partition p = coarsest_bisimulation(explored.model);

    auto b_nil = explored.model.state_by_name("b.nil");
    auto bc_nil = explored.model.state_by_name("b.nil + c.nil");
    require(b_nil && bc_nil, "expected intermediate states are missing");
    require(!p.same_block(*b_nil, *bc_nil), "b.nil and b.nil + c.nil were not separated");

    auto w = find_witness(explored.model, p, *b_nil, *bc_nil);
    require(w.has_value(), "no witness for the separated pair");
    require(w->rel_index == 1 && w->label == "c", "witness label is " + w->label + ", expected c");
    require(w->class_states == std::vector<std::string>{"nil"}, "witness class is not {nil}");
    require(w->lhs == SemiringValue(false) && w->rhs == SemiringValue(true),
            "witness sums are not false vs true");
    return "not-bisimilar; witness under c against class {nil}";
}

// --- criterion 2: multiplicity example ---------------------------------------

std::string criterion_multiplicity() {
    for (const std::string& lambda : {"1", "1/2", "3/7"}) {
        auto parsed = pepa::parse_pepa("P := nil\n(a," + lambda + ").P + (a," + lambda + ").P\n");
        FiniteSupportFn fn = pepa::futs_step(parsed.root, "a", parsed.env);
        Rational twice = Rational::parse(lambda) * Rational(2, 1);
        require(fn.support_size() == 1, "continuation support is not a single state");
        require(fn.at(parsed.env.constant("P")->id) == SemiringValue(twice),
                "continuation is not [P -> 2*" + lambda + "]");

        pepa::TermRef single = pepa::parse_expression(parsed.env, "(a," + lambda + ").P");
        auto explored = pepa::explore_pepa({single, parsed.root}, parsed.env, kCap);
        Partition p = coarsest_bisimulation(explored.model);
        require(!p.same_block(StateId{0}, StateId{1}),
                "single and doubled prefix were not separated at rate " + lambda);
    }
    return "continuations equal [P -> 2*lambda] for all three rates; processes separated";
}

// --- criterion 3: the two-component worked example ---------------------------

std::string criterion_worked_example() {
    auto parsed = iml::parse_iml("X := a.(1).b.X\nY := a.(2).b.Y\nX <a,b> Y\n");
    auto e = iml::explore_iml(parsed.root, parsed.env, kCap);
    const FutsModel& m = e.model;
    require(m.state_count() == 5, "expected 5 reachable states, got " +
                                      std::to_string(m.state_count()));

    auto id = [&](const std::string& name) {
        auto s = m.state_by_name(name);
        require(s.has_value(), "missing state " + name);
        return *s;
    };
    StateId s0 = id("X <a,b> Y");
    StateId s1 = id("(1/1).b.X <a,b> (2/1).b.Y");
    StateId s2 = id("b.X <a,b> (2/1).b.Y");
    StateId s3 = id("(1/1).b.X <a,b> b.Y");
    StateId s4 = id("b.X <a,b> b.Y");

    require(m.schemas()[0].labels == std::vector<std::string>{"a", "b"}, "action labels differ");
    auto tt = SemiringValue(true);
    auto expect = [&](const FiniteSupportFn& fn, const FiniteSupportFn& want, const std::string& at) {
        require(fn == want, "continuation at " + at + " differs from the table");
    };

    // the five listed continuations
    expect(m.continuation(0, s0, 0), FiniteSupportFn::point(s1, tt), "X||Y under a");
    expect(m.continuation(1, s1, 0),
           FiniteSupportFn::point(s2, SemiringValue(Rational(1, 1))) +
               FiniteSupportFn::point(s3, SemiringValue(Rational(2, 1))),
           "lambda.b.X || mu.b.Y under delta");
    expect(m.continuation(0, s4, 1), FiniteSupportFn::point(s0, tt), "b.X || b.Y under b");
    expect(m.continuation(1, s2, 0), FiniteSupportFn::point(s4, SemiringValue(Rational(2, 1))),
           "b.X || mu.b.Y under delta");
    expect(m.continuation(1, s3, 0), FiniteSupportFn::point(s4, SemiringValue(Rational(1, 1))),
           "lambda.b.X || b.Y under delta");

    // and nothing else
    std::size_t nonzero = 0;
    for (std::size_t rel = 0; rel < m.schemas().size(); ++rel)
        for (std::uint32_t s = 0; s < m.state_count(); ++s)
            for (std::size_t l = 0; l < m.schemas()[rel].labels.size(); ++l)
                if (!m.continuation(rel, StateId{s}, l).is_zero()) ++nonzero;
    require(nonzero == 5, "expected exactly 5 non-trivial continuations, got " +
                              std::to_string(nonzero));
    return "all five continuations reproduced exactly (lambda=1, mu=2)";
}

// --- criteria 4..7: property suites ------------------------------------------

std::string criterion_lemma21() {
    auto r = checks::lemma21(2026, 1000);
    require_clean(r);
    require(r.items.size() == 2000, "expected 1000 triples per semiring");
    return describe(r);
}

std::string criterion_lemma53(const std::vector<std::string>& corpus) {
    auto started = std::chrono::steady_clock::now();
    auto r = checks::lemma53(corpus, kCap);
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    require_clean(r);
    std::ostringstream out;
    out << describe(r) << " in " << secs << "s";
    require(secs < 60.0, "runtime exceeded 60s: " + out.str());
    return out.str();
}

std::string criterion_lemma56_65(const std::vector<std::string>& pepa_corpus,
                                 const std::vector<std::string>& iml_corpus) {
    auto r56 = checks::lemma56(pepa_corpus, kCap);
    require_clean(r56);
    auto r65 = checks::lemma65(iml_corpus, kCap);
    require_clean(r65);
    return "lemma5.6: " + describe(r56) + "; lemma6.5: " + describe(r65);
}

std::string criterion_thm57_66(const std::vector<std::string>& pepa_corpus,
                               const std::vector<std::string>& iml_corpus) {
    auto r57 = checks::thm57(pepa_corpus, kCap);
    require_clean(r57);
    auto r66 = checks::thm66(iml_corpus, kCap);
    require_clean(r66);
    return "thm5.7: " + describe(r57) + "; thm6.6: " + describe(r66);
}

// --- criterion 8: oracle equivalence ------------------------------------------

std::string criterion_oracle() {
    std::mt19937_64 rng(2027);
    for (int i = 0; i < 200; ++i) {
        FutsModel m = test_support::random_model(rng, 6);
        if (!(coarsest_bisimulation(m) == brute_force_coarsest(m)))
            throw Failure("refinement disagrees with the oracle on model " + std::to_string(i));
    }
    return "200 random models: refinement equals the brute-force oracle";
}

// --- criterion 9: quotient laws ------------------------------------------------

void check_quotient_laws(const FutsModel& m, const std::string& what) {
    Partition p = coarsest_bisimulation(m);
    FutsModel q = quotient(m, p);

    for (std::size_t rel = 0; rel < m.schemas().size(); ++rel) {
        const auto& sc = m.schemas()[rel];
        for (std::size_t bi = 0; bi < p.block_count(); ++bi) {
            for (StateId member : p.blocks()[bi]) {
                for (std::size_t l = 0; l < sc.labels.size(); ++l) {
                    // class sums of the member row vs the quotient row
                    std::map<std::uint32_t, SemiringValue> sums;
                    for (const auto& [t, v] : m.continuation(rel, member, l).entries()) {
                        auto key = static_cast<std::uint32_t>(p.block_of(t));
                        auto it = sums.find(key);
                        if (it == sums.end())
                            sums.emplace(key, v);
                        else
                            it->second = it->second + v;
                    }
                    const auto& qrow =
                        q.continuation(rel, StateId{static_cast<std::uint32_t>(bi)}, l).entries();
                    if (qrow.size() != sums.size())
                        throw Failure(what + ": class sums differ from the quotient row");
                    for (const auto& [t, v] : qrow) {
                        auto it = sums.find(t.value);
                        if (it == sums.end() || !(it->second == v))
                            throw Failure(what + ": class sums differ from the quotient row");
                    }
                }
            }
        }
    }

    if (coarsest_bisimulation(q).block_count() != q.state_count())
        throw Failure(what + ": quotient is not minimal");
}

std::string criterion_quotient(const std::vector<std::string>& pepa_corpus,
                               const std::vector<std::string>& iml_corpus) {
    std::size_t checked = 0, skipped = 0;
    for (const auto& src : pepa_corpus) {
        auto parsed = pepa::parse_pepa(src);
        try {
            check_quotient_laws(pepa::explore_pepa(parsed.root, parsed.env, kCap).model, "pepa corpus");
            ++checked;
        } catch (const StateCapExceeded&) {
            ++skipped;
        }
    }
    for (const auto& src : iml_corpus) {
        auto parsed = iml::parse_iml(src);
        try {
            check_quotient_laws(iml::explore_iml(parsed.root, parsed.env, kCap).model, "iml corpus");
            ++checked;
        } catch (const StateCapExceeded&) {
            ++skipped;
        }
    }
    std::mt19937_64 rng(2028);
    for (int i = 0; i < 200; ++i) {
        check_quotient_laws(test_support::random_model(rng, 6), "random model");
        ++checked;
    }
    std::ostringstream out;
    out << checked << " models checked, " << skipped << " skipped (cap)";
    return out.str();
}

}  // namespace

int main() {
    auto pepa_corpus = gen::corpus(Language::pepa, kCorpusSeed, kCorpusCount, kCorpusDepth);
    auto iml_corpus = gen::corpus(Language::iml, kCorpusSeed, kCorpusCount, kCorpusDepth);

    std::vector<std::pair<std::string, std::function<std::string()>>> criteria = {
        {"1. branching discrimination (boolean fragment)", criterion_fig1},
        {"2. choice multiplicity yields [P -> 2*lambda]", criterion_multiplicity},
        {"3. two-component worked example, exact continuations", criterion_worked_example},
        {"4. finite-support sum/product total laws", criterion_lemma21},
        {"5. continuation totals equal apparent rates",
         [&] { return criterion_lemma53(pepa_corpus); }},
        {"6. continuations equal cumulative standard rates",
         [&] { return criterion_lemma56_65(pepa_corpus, iml_corpus); }},
        {"7. standard refinement equals FuTS refinement",
         [&] { return criterion_thm57_66(pepa_corpus, iml_corpus); }},
        {"8. refinement equals the brute-force oracle", criterion_oracle},
        {"9. quotient homomorphism law and minimality",
         [&] { return criterion_quotient(pepa_corpus, iml_corpus); }},
    };

    int failures = 0;
    for (auto& [name, run] : criteria) {
        try {
            std::string detail = run();
            std::cout << "[PASS] " << name << " : " << detail << "\n";
        } catch (const std::exception& e) {
            ++failures;
            std::cout << "[FAIL] " << name << " : " << e.what() << "\n";
        }
    }
    std::cout << (criteria.size() - failures) << "/" << criteria.size() << " criteria passed\n";
    return failures == 0 ? 0 : 1;
}

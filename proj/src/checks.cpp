#include "futs/checks.hpp"

#include <algorithm>
#include <map>
#include <random>

#include "futs/iml.hpp"
#include "futs/model.hpp"
#include "futs/pepa.hpp"
#include "futs/semiring.hpp"

namespace futs::checks {

namespace {

std::size_t count_status(const Report& r, Status s) {
    return static_cast<std::size_t>(
        std::count_if(r.items.begin(), r.items.end(), [s](const Item& i) { return i.status == s; }));
}

FiniteSupportFn random_fsf(std::mt19937_64& rng, Semiring tag, std::uint32_t universe) {
    FiniteSupportFn fn(tag);
    std::size_t support = rng() % 5;  // empty functions included
    for (std::size_t i = 0; i < support; ++i) {
        StateId x{static_cast<std::uint32_t>(rng() % universe)};
        SemiringValue v = tag == Semiring::boolean
                              ? SemiringValue(true)
                              : SemiringValue(Rational(1 + static_cast<long>(rng() % 6),
                                                       1 + static_cast<long>(rng() % 4)));
        fn = fn + FiniteSupportFn::point(x, v);
    }
    return fn;
}

template <typename PerSource>
Report over_sources(std::string name, const std::vector<std::string>& sources, const PerSource& run) {
    Report report{std::move(name), {}};
    for (std::size_t i = 0; i < sources.size(); ++i) {
        Item item{i, Status::pass, ""};
        try {
            std::string failure = run(sources[i]);
            if (!failure.empty()) {
                item.status = Status::fail;
                item.detail = failure;
            }
        } catch (const StateCapExceeded& e) {
            item.status = Status::skip;
            item.detail = e.what();
        } catch (const Error& e) {
            item.status = Status::fail;
            item.detail = e.what();
        }
        report.items.push_back(std::move(item));
    }
    return report;
}

}  // namespace

std::size_t Report::passed() const { return count_status(*this, Status::pass); }
std::size_t Report::failed() const { return count_status(*this, Status::fail); }
std::size_t Report::skipped() const { return count_status(*this, Status::skip); }

Report lemma21(std::uint64_t seed, std::size_t count) {
    Report report{"lemma2.1", {}};
    std::mt19937_64 rng(seed);
    // pairing injective on the 16-state universe the operands draw from
    StatePairing pair = [](StateId a, StateId b) {
        return StateId{16 + a.value * 16 + b.value};
    };
    for (Semiring tag : {Semiring::boolean, Semiring::rational}) {
        for (std::size_t i = 0; i < count; ++i) {
            FiniteSupportFn phi = random_fsf(rng, tag, 16);
            FiniteSupportFn psi = random_fsf(rng, tag, 16);
            Item item{report.items.size(), Status::pass, ""};
            bool sum_law = (phi + psi).total() == phi.total() + psi.total();
            bool product_law =
                FiniteSupportFn::pair_product(phi, psi, pair).total() == phi.total() * psi.total();
            if (!sum_law || !product_law) {
                item.status = Status::fail;
                item.detail = std::string(to_string(tag)) + ": " +
                              (sum_law ? "product law" : "sum law") + " violated";
            }
            report.items.push_back(std::move(item));
        }
    }
    return report;
}

Report lemma53(const std::vector<std::string>& sources, std::size_t cap) {
    return over_sources("lemma5.3", sources, [cap](const std::string& src) -> std::string {
        auto parsed = pepa::parse_pepa(src);
        if (!parsed.root) return "source has no root expression";
        auto explored = pepa::explore_pepa(parsed.root, parsed.env, cap);
        for (pepa::TermRef s : explored.states) {
            for (const auto& a : parsed.env.alphabet()) {
                SemiringValue total = pepa::futs_step(s, a, parsed.env).total();
                Rational rate = pepa::apparent_rate(s, a, parsed.env);
                if (!(total.as_rational() == rate))
                    return "state " + pepa::print_term(s) + ", action " + a + ": continuation total " +
                           total.str() + " differs from apparent rate " + rate.str();
            }
        }
        return "";
    });
}

Report lemma56(const std::vector<std::string>& sources, std::size_t cap) {
    return over_sources("lemma5.6", sources, [cap](const std::string& src) -> std::string {
        auto parsed = pepa::parse_pepa(src);
        if (!parsed.root) return "source has no root expression";
        auto explored = pepa::explore_pepa(parsed.root, parsed.env, cap);
        for (pepa::TermRef s : explored.states) {
            // standard side: (action, target) -> multiplicity-weighted rate sum
            std::map<std::pair<std::string, pepa::TermRef>, Rational> standard;
            for (const auto& tr : pepa::standard_transitions(s, parsed.env)) {
                Rational add = tr.rate * Rational(static_cast<long>(tr.multiplicity));
                auto key = std::make_pair(tr.action, tr.target);
                auto it = standard.find(key);
                if (it == standard.end())
                    standard.emplace(key, add);
                else
                    it->second = it->second + add;
            }
            for (const auto& a : parsed.env.alphabet()) {
                std::map<std::pair<std::string, pepa::TermRef>, Rational> futs_side;
                FiniteSupportFn step = pepa::futs_step(s, a, parsed.env);
                for (const auto& [target, v] : step.entries())
                    futs_side.emplace(std::make_pair(a, parsed.env.term_by_id(target)),
                                      v.as_rational());
                for (const auto& [key, value] : futs_side) {
                    auto it = standard.find(key);
                    Rational expect = it == standard.end() ? Rational::zero() : it->second;
                    if (!(value == expect))
                        return "state " + pepa::print_term(s) + ": continuation and cumulative rate " +
                               "disagree at target " + pepa::print_term(key.second);
                }
                for (const auto& [key, value] : standard) {
                    if (key.first != a) continue;
                    auto it = futs_side.find(key);
                    if (it == futs_side.end() || !(it->second == value))
                        return "state " + pepa::print_term(s) + ": standard transition to " +
                               pepa::print_term(key.second) + " missing from the continuation";
                }
            }
        }
        return "";
    });
}

Report thm57(const std::vector<std::string>& sources, std::size_t cap) {
    return over_sources("thm5.7", sources, [cap](const std::string& src) -> std::string {
        auto parsed = pepa::parse_pepa(src);
        if (!parsed.root) return "source has no root expression";
        auto explored = pepa::explore_pepa(parsed.root, parsed.env, cap);
        Partition futs_side = coarsest_bisimulation(explored.model);
        auto futs_blocks = to_name_blocks(
            futs_side, [&](StateId s) { return explored.model.state_name(s); });

        std::vector<pepa::TermRef> states;
        Partition std_side = pepa::strong_equivalence_partition(parsed.root, parsed.env, cap, &states);
        auto std_blocks =
            to_name_blocks(std_side, [&](StateId s) { return pepa::print_term(states[s.value]); });

        if (futs_blocks != std_blocks)
            return "strong equivalence and FuTS bisimilarity partition the reachable states differently";
        return "";
    });
}

Report lemma65(const std::vector<std::string>& sources, std::size_t cap) {
    return over_sources("lemma6.5", sources, [cap](const std::string& src) -> std::string {
        auto parsed = iml::parse_iml(src);
        if (!parsed.root) return "source has no root expression";
        auto explored = iml::explore_iml(parsed.root, parsed.env, cap);
        for (iml::TermRef s : explored.states) {
            std::set<std::pair<std::string, iml::TermRef>> derivable;
            for (const auto& [a, target] : iml::standard_action_transitions(s, parsed.env))
                derivable.emplace(a, target);
            std::set<std::pair<std::string, iml::TermRef>> continuation;
            for (const auto& a : parsed.env.alphabet()) {
                FiniteSupportFn step = iml::futs_action_step(s, a, parsed.env);
                for (const auto& [target, v] : step.entries())
                    if (v.as_bool()) continuation.emplace(a, parsed.env.term_by_id(target));
            }
            if (derivable != continuation)
                return "state " + iml::print_term(s) + ": action transitions and boolean continuation differ";

            std::map<iml::TermRef, Rational> rates;
            for (const auto& tr : iml::standard_delay_transitions(s, parsed.env)) {
                Rational add = tr.rate * Rational(static_cast<long>(tr.multiplicity));
                auto it = rates.find(tr.target);
                if (it == rates.end())
                    rates.emplace(tr.target, add);
                else
                    it->second = it->second + add;
            }
            std::map<iml::TermRef, Rational> delay;
            FiniteSupportFn delay_step = iml::futs_delay_step(s, parsed.env);
            for (const auto& [target, v] : delay_step.entries())
                delay.emplace(parsed.env.term_by_id(target), v.as_rational());
            if (rates != delay)
                return "state " + iml::print_term(s) + ": delay continuation and cumulative rates differ";
        }
        return "";
    });
}

Report thm66(const std::vector<std::string>& sources, std::size_t cap) {
    return over_sources("thm6.6", sources, [cap](const std::string& src) -> std::string {
        auto parsed = iml::parse_iml(src);
        if (!parsed.root) return "source has no root expression";
        auto explored = iml::explore_iml(parsed.root, parsed.env, cap);
        Partition futs_side = coarsest_bisimulation(explored.model);
        auto futs_blocks = to_name_blocks(
            futs_side, [&](StateId s) { return explored.model.state_name(s); });

        std::vector<iml::TermRef> states;
        Partition std_side = iml::strong_bisimulation_partition(parsed.root, parsed.env, cap, &states);
        auto std_blocks =
            to_name_blocks(std_side, [&](StateId s) { return iml::print_term(states[s.value]); });

        if (futs_blocks != std_blocks)
            return "strong bisimulation and FuTS bisimilarity partition the reachable states differently";
        return "";
    });
}

}  // namespace futs::checks

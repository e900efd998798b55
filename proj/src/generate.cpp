#include "futs/generate.hpp"

#include <random>
#include <sstream>

#include "futs/iml.hpp"
#include "futs/pepa.hpp"

namespace futs::gen {

namespace {

const std::vector<std::string> kActions = {"a", "b", "c"};

const std::vector<std::pair<long, long>> kRatePool = {
    {1, 1}, {1, 2}, {2, 1}, {3, 1}, {3, 2}, {1, 3},
};

struct Rng {
    std::mt19937_64 engine;
    explicit Rng(std::uint64_t seed) : engine(seed) {}
    std::uint64_t below(std::uint64_t n) { return engine() % n; }
    bool chance(std::uint64_t num, std::uint64_t den) { return below(den) < num; }
};

std::string pick_action(Rng& rng) { return kActions[rng.below(kActions.size())]; }

Rational pick_rate(Rng& rng) {
    auto [num, den] = kRatePool[rng.below(kRatePool.size())];
    return Rational(num, den);
}

std::vector<std::string> pick_coop_set(Rng& rng) {
    std::vector<std::string> set;
    for (const auto& a : kActions)
        if (rng.chance(1, 3)) set.push_back(a);
    return set;
}

// shared generation shape: leaves are nil or (guarded) constants; inner
// nodes drawn with weights prefix:choice:coop = 3:3:1
enum class Shape { leaf, prefix, choice, coop };

Shape pick_shape(Rng& rng, int depth) {
    if (depth <= 0) return Shape::leaf;
    switch (rng.below(8)) {
        case 0: return Shape::leaf;
        case 1:
        case 2:
        case 3: return Shape::prefix;
        case 4:
        case 5:
        case 6: return Shape::choice;
        default: return Shape::coop;
    }
}

pepa::TermRef gen_pepa(pepa::PepaEnv& env, Rng& rng, int depth, bool under_prefix,
                       const std::vector<std::string>& consts) {
    switch (pick_shape(rng, depth)) {
        case Shape::leaf:
            if (under_prefix && !consts.empty() && rng.chance(1, 2))
                return env.constant(consts[rng.below(consts.size())]);
            return env.nil();
        case Shape::prefix:
            return env.prefix(pick_action(rng), pick_rate(rng),
                              gen_pepa(env, rng, depth - 1, true, consts));
        case Shape::choice:
            return env.choice(gen_pepa(env, rng, depth - 1, under_prefix, consts),
                              gen_pepa(env, rng, depth - 1, under_prefix, consts));
        case Shape::coop:
            return env.coop(gen_pepa(env, rng, depth - 1, under_prefix, consts),
                            gen_pepa(env, rng, depth - 1, under_prefix, consts), pick_coop_set(rng));
    }
    return env.nil();
}

iml::TermRef gen_iml(iml::ImlEnv& env, Rng& rng, int depth, bool under_prefix,
                     const std::vector<std::string>& consts) {
    switch (pick_shape(rng, depth)) {
        case Shape::leaf:
            if (under_prefix && !consts.empty() && rng.chance(1, 2))
                return env.constant(consts[rng.below(consts.size())]);
            return env.nil();
        case Shape::prefix:
            if (rng.chance(1, 2))
                return env.act_prefix(pick_action(rng), gen_iml(env, rng, depth - 1, true, consts));
            return env.rate_prefix(pick_rate(rng), gen_iml(env, rng, depth - 1, true, consts));
        case Shape::choice:
            return env.choice(gen_iml(env, rng, depth - 1, under_prefix, consts),
                              gen_iml(env, rng, depth - 1, under_prefix, consts));
        case Shape::coop:
            return env.coop(gen_iml(env, rng, depth - 1, under_prefix, consts),
                            gen_iml(env, rng, depth - 1, under_prefix, consts), pick_coop_set(rng));
    }
    return env.nil();
}

std::string gen_pepa_source(Rng& rng, int depth) {
    pepa::PepaEnv env;
    std::vector<std::string> names;
    std::size_t n_defs = rng.below(3);
    for (std::size_t i = 0; i < n_defs; ++i) names.push_back(i == 0 ? "X" : "Y");

    std::ostringstream out;
    for (const auto& name : names) {
        // a prefix-rooted body keeps every constant occurrence guarded
        pepa::TermRef body = env.prefix(pick_action(rng), pick_rate(rng),
                                        gen_pepa(env, rng, depth - 1, true, names));
        env.define(name, body);
        out << name << " := " << pepa::print_term(body) << "\n";
    }
    out << pepa::print_term(gen_pepa(env, rng, depth, true, names)) << "\n";
    return out.str();
}

std::string gen_iml_source(Rng& rng, int depth) {
    iml::ImlEnv env;
    std::vector<std::string> names;
    std::size_t n_defs = rng.below(3);
    for (std::size_t i = 0; i < n_defs; ++i) names.push_back(i == 0 ? "X" : "Y");

    std::ostringstream out;
    for (const auto& name : names) {
        iml::TermRef body =
            rng.chance(1, 2)
                ? env.act_prefix(pick_action(rng), gen_iml(env, rng, depth - 1, true, names))
                : env.rate_prefix(pick_rate(rng), gen_iml(env, rng, depth - 1, true, names));
        env.define(name, body);
        out << name << " := " << iml::print_term(body) << "\n";
    }
    out << iml::print_term(gen_iml(env, rng, depth, true, names)) << "\n";
    return out.str();
}

}  // namespace

std::vector<std::string> corpus(Language lang, std::uint64_t seed, std::size_t count, int depth) {
    if (depth < 1) throw Error("corpus depth must be at least 1");
    if (lang == Language::raw) throw Error("corpus generation needs a process language");
    Rng rng(seed);
    std::vector<std::string> out;
    out.reserve(count);
    for (std::size_t i = 0; i < count; ++i)
        out.push_back(lang == Language::pepa ? gen_pepa_source(rng, depth) : gen_iml_source(rng, depth));
    return out;
}

std::string corpus_to_text(const std::vector<std::string>& sections) {
    std::string out;
    for (std::size_t i = 0; i < sections.size(); ++i) {
        if (i) out += "---\n";
        out += sections[i];
        if (!out.empty() && out.back() != '\n') out += "\n";
    }
    return out;
}

std::vector<std::string> split_corpus(const std::string& text) {
    std::vector<std::string> sections;
    std::string current;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        if (line == "---") {
            sections.push_back(current);
            current.clear();
        } else {
            current += line;
            current += "\n";
        }
    }
    sections.push_back(current);
    return sections;
}

}  // namespace futs::gen

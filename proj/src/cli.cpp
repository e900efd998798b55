#include "futs/cli.hpp"

#include <fstream>
#include <optional>
#include <sstream>

#include "futs/checks.hpp"
#include "futs/generate.hpp"
#include "futs/iml.hpp"
#include "futs/model.hpp"
#include "futs/pepa.hpp"

#include "CLI11.hpp"
#include "json.hpp"

namespace futs::cli {

namespace {

class IoError : public Error {
public:
    using Error::Error;
};

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot read '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void write_output(const std::string& path, const std::string& text, std::ostream& out) {
    if (path.empty()) {
        out << text;
        return;
    }
    std::ofstream file(path, std::ios::binary);
    if (!file) throw IoError("cannot write '" + path + "'");
    file << text;
}

struct Options {
    std::string file;
    Language lang = Language::pepa;
    std::size_t cap = 10000;
    std::uint64_t seed = 42;
    std::size_t count = 200;
    int depth = 5;
    std::string format;  // json | dot | text
    std::vector<std::string> roots;
    std::string semantics = "futs";
    std::string check;
    bool random_source = false;
    std::string out_path;
};

std::string dump(const nlohmann::json& j) { return j.dump(2) + "\n"; }

// Either front-end, parsed once; raw models go through FutsModel directly.
struct LoadedSystem {
    Language lang;
    std::optional<pepa::ParseResult> pepa_sys;
    std::optional<iml::ParseResult> iml_sys;
    std::optional<FutsModel> raw;
};

LoadedSystem load(const Options& opt) {
    LoadedSystem sys;
    sys.lang = opt.lang;
    std::string text = read_file(opt.file);
    switch (opt.lang) {
        case Language::pepa: sys.pepa_sys = pepa::parse_pepa(text); break;
        case Language::iml: sys.iml_sys = iml::parse_iml(text); break;
        case Language::raw: sys.raw = FutsModel::from_json(nlohmann::json::parse(text)); break;
    }
    return sys;
}

int cmd_parse(const Options& opt, std::ostream& out) {
    LoadedSystem sys = load(opt);
    bool json = opt.format == "json";
    nlohmann::json doc;
    std::ostringstream text;
    if (sys.lang == Language::raw) {
        const FutsModel& m = *sys.raw;
        if (json) {
            doc = m.to_json();
        } else {
            text << "model: " << m.state_count() << " states, " << m.schemas().size()
                 << " relations\n";
        }
    } else if (sys.lang == Language::pepa) {
        const auto& parsed = *sys.pepa_sys;
        nlohmann::json defs = nlohmann::json::object();
        std::vector<std::string> alphabet = parsed.env.alphabet();
        text << "alphabet: ";
        for (std::size_t i = 0; i < alphabet.size(); ++i) text << (i ? ", " : "") << alphabet[i];
        text << "\n";
        for (const auto& [name, body] : parsed.env.definitions()) {
            defs[name] = pepa::print_term(body);
            text << name << " := " << pepa::print_term(body) << "\n";
        }
        doc["language"] = "pepa";
        doc["alphabet"] = alphabet;
        doc["definitions"] = defs;
        if (parsed.root) {
            doc["root"] = pepa::print_term(parsed.root);
            text << "root: " << pepa::print_term(parsed.root) << "\n";
        }
    } else {
        const auto& parsed = *sys.iml_sys;
        nlohmann::json defs = nlohmann::json::object();
        std::vector<std::string> alphabet = parsed.env.alphabet();
        text << "alphabet: ";
        for (std::size_t i = 0; i < alphabet.size(); ++i) text << (i ? ", " : "") << alphabet[i];
        text << "\n";
        for (const auto& [name, body] : parsed.env.definitions()) {
            defs[name] = iml::print_term(body);
            text << name << " := " << iml::print_term(body) << "\n";
        }
        doc["language"] = "iml";
        doc["alphabet"] = alphabet;
        doc["definitions"] = defs;
        if (parsed.root) {
            doc["root"] = iml::print_term(parsed.root);
            text << "root: " << iml::print_term(parsed.root) << "\n";
        }
    }
    out << (json ? dump(doc) : text.str());
    return 0;
}

FutsModel explored_model(LoadedSystem& sys, const Options& opt) {
    if (sys.lang == Language::raw) return std::move(*sys.raw);
    if (sys.lang == Language::pepa) {
        auto& parsed = *sys.pepa_sys;
        pepa::TermRef root = opt.roots.empty() ? parsed.root
                                               : pepa::parse_expression(parsed.env, opt.roots.front());
        if (!root) throw Error("no root expression: give one in the file or via --root");
        return pepa::explore_pepa(root, parsed.env, opt.cap).model;
    }
    auto& parsed = *sys.iml_sys;
    iml::TermRef root =
        opt.roots.empty() ? parsed.root : iml::parse_expression(parsed.env, opt.roots.front());
    if (!root) throw Error("no root expression: give one in the file or via --root");
    return iml::explore_iml(root, parsed.env, opt.cap).model;
}

std::string model_text(const FutsModel& m) {
    std::ostringstream out;
    out << "states (" << m.state_count() << "):\n";
    for (const auto& name : m.state_names()) out << "  " << name << "\n";
    for (std::size_t rel = 0; rel < m.schemas().size(); ++rel) {
        const auto& sc = m.schemas()[rel];
        out << "relation " << sc.index << " (" << to_string(sc.semiring) << "):\n";
        for (std::uint32_t s = 0; s < m.state_count(); ++s) {
            for (std::size_t l = 0; l < sc.labels.size(); ++l) {
                const auto& fn = m.continuation(rel, StateId{s}, l);
                if (fn.is_zero()) continue;
                out << "  " << m.state_name(StateId{s}) << " --" << sc.labels[l] << "--> {";
                bool first = true;
                for (const auto& [target, v] : fn.entries()) {
                    out << (first ? "" : ", ") << m.state_name(target) << " -> " << v.str();
                    first = false;
                }
                out << "}\n";
            }
        }
    }
    return out.str();
}

int cmd_lts(const Options& opt, std::ostream& out) {
    LoadedSystem sys = load(opt);
    std::string format = opt.format.empty() ? "json" : opt.format;

    if (opt.semantics == "standard") {
        if (sys.lang == Language::raw) throw Error("raw models only have the futs semantics");
        nlohmann::json doc;
        std::ostringstream text;
        std::ostringstream dot;
        dot << "digraph lts {\n";
        if (sys.lang == Language::pepa) {
            auto& parsed = *sys.pepa_sys;
            pepa::TermRef root = opt.roots.empty()
                                     ? parsed.root
                                     : pepa::parse_expression(parsed.env, opt.roots.front());
            if (!root) throw Error("no root expression: give one in the file or via --root");
            pepa::StandardLts lts = pepa::explore_standard(root, parsed.env, opt.cap);
            doc["states"] = nlohmann::json::array();
            for (auto* s : lts.states) doc["states"].push_back(pepa::print_term(s));
            doc["transitions"] = nlohmann::json::array();
            for (std::size_t i = 0; i < lts.states.size(); ++i) {
                for (const auto& tr : lts.transitions[i]) {
                    nlohmann::json jt;
                    jt["source"] = pepa::print_term(lts.states[i]);
                    jt["action"] = tr.action;
                    jt["rate"] = tr.rate.str();
                    jt["target"] = pepa::print_term(tr.target);
                    jt["multiplicity"] = tr.multiplicity;
                    doc["transitions"].push_back(std::move(jt));
                    text << pepa::print_term(lts.states[i]) << " --" << tr.action << ","
                         << tr.rate.str() << " x" << tr.multiplicity << "--> "
                         << pepa::print_term(tr.target) << "\n";
                    dot << "  \"" << pepa::print_term(lts.states[i]) << "\" -> \""
                        << pepa::print_term(tr.target) << "\" [label=\"" << tr.action << ","
                        << tr.rate.str() << " x" << tr.multiplicity << "\"];\n";
                }
            }
        } else {
            auto& parsed = *sys.iml_sys;
            iml::TermRef root = opt.roots.empty()
                                    ? parsed.root
                                    : iml::parse_expression(parsed.env, opt.roots.front());
            if (!root) throw Error("no root expression: give one in the file or via --root");
            iml::StandardLts lts = iml::explore_standard(root, parsed.env, opt.cap);
            doc["states"] = nlohmann::json::array();
            for (auto* s : lts.states) doc["states"].push_back(iml::print_term(s));
            doc["action_transitions"] = nlohmann::json::array();
            doc["delay_transitions"] = nlohmann::json::array();
            for (std::size_t i = 0; i < lts.states.size(); ++i) {
                for (const auto& [action, target] : lts.action_transitions[i]) {
                    nlohmann::json jt;
                    jt["source"] = iml::print_term(lts.states[i]);
                    jt["action"] = action;
                    jt["target"] = iml::print_term(target);
                    doc["action_transitions"].push_back(std::move(jt));
                    text << iml::print_term(lts.states[i]) << " --" << action << "--> "
                         << iml::print_term(target) << "\n";
                    dot << "  \"" << iml::print_term(lts.states[i]) << "\" -> \""
                        << iml::print_term(target) << "\" [label=\"" << action << "\"];\n";
                }
                for (const auto& tr : lts.delay_transitions[i]) {
                    nlohmann::json jt;
                    jt["source"] = iml::print_term(lts.states[i]);
                    jt["rate"] = tr.rate.str();
                    jt["target"] = iml::print_term(tr.target);
                    jt["multiplicity"] = tr.multiplicity;
                    doc["delay_transitions"].push_back(std::move(jt));
                    text << iml::print_term(lts.states[i]) << " ==" << tr.rate.str() << " x"
                         << tr.multiplicity << "==> " << iml::print_term(tr.target) << "\n";
                    dot << "  \"" << iml::print_term(lts.states[i]) << "\" -> \""
                        << iml::print_term(tr.target) << "\" [label=\"delta/" << tr.rate.str()
                        << " x" << tr.multiplicity << "\"];\n";
                }
            }
        }
        dot << "}\n";
        if (format == "json")
            out << dump(doc);
        else if (format == "dot")
            out << dot.str();
        else
            out << text.str();
        return 0;
    }

    FutsModel m = explored_model(sys, opt);
    if (format == "json")
        out << dump(m.to_json());
    else if (format == "dot")
        out << m.to_dot();
    else
        out << model_text(m);
    return 0;
}

int cmd_bisim(const Options& opt, std::ostream& out) {
    LoadedSystem sys = load(opt);

    std::optional<FutsModel> model;
    StateId a{0}, b{1};
    if (sys.lang == Language::raw) {
        model = std::move(*sys.raw);
        if (opt.roots.size() != 2) throw Error("bisim on a raw model needs two state names (--root)");
        auto sa = model->state_by_name(opt.roots[0]);
        auto sb = model->state_by_name(opt.roots[1]);
        if (!sa || !sb) throw Error("bisim: no such state in the model");
        a = *sa;
        b = *sb;
        if (a == b) {
            out << "bisimilar\n";
            return 0;
        }
    } else if (sys.lang == Language::pepa) {
        auto& parsed = *sys.pepa_sys;
        std::vector<pepa::TermRef> roots;
        for (const auto& r : opt.roots) roots.push_back(pepa::parse_expression(parsed.env, r));
        if (roots.size() == 1 && parsed.root) roots.insert(roots.begin(), parsed.root);
        if (roots.size() != 2) throw Error("bisim needs two processes (use --root twice)");
        if (roots[0] == roots[1]) {
            out << "bisimilar\n";
            return 0;
        }
        model = pepa::explore_pepa(roots, parsed.env, opt.cap).model;
    } else {
        auto& parsed = *sys.iml_sys;
        std::vector<iml::TermRef> roots;
        for (const auto& r : opt.roots) roots.push_back(iml::parse_expression(parsed.env, r));
        if (roots.size() == 1 && parsed.root) roots.insert(roots.begin(), parsed.root);
        if (roots.size() != 2) throw Error("bisim needs two processes (use --root twice)");
        if (roots[0] == roots[1]) {
            out << "bisimilar\n";
            return 0;
        }
        model = iml::explore_iml(roots, parsed.env, opt.cap).model;
    }
    const FutsModel& m = *model;

    Partition p = coarsest_bisimulation(m);
    if (p.same_block(a, b)) {
        out << "bisimilar\n";
        return 0;
    }
    out << "not-bisimilar\n";
    if (auto w = find_witness(m, p, a, b)) {
        out << "witness: relation " << w->rel_index << ", label " << w->label << ", class {";
        for (std::size_t i = 0; i < w->class_states.size(); ++i)
            out << (i ? ", " : "") << w->class_states[i];
        out << "}, sums " << w->lhs.str() << " vs " << w->rhs.str() << "\n";
    }
    return 3;
}

int cmd_minimize(const Options& opt, std::ostream& out) {
    LoadedSystem sys = load(opt);
    FutsModel m = explored_model(sys, opt);
    Partition p = coarsest_bisimulation(m);
    FutsModel q = quotient(m, p);

    std::string format = opt.format.empty() ? "json" : opt.format;
    auto names = [&](StateId s) { return m.state_name(s); };
    if (format == "json") {
        nlohmann::json doc;
        doc["partition"] = p.to_json(names);
        doc["model"] = q.to_json();
        out << dump(doc);
    } else if (format == "dot") {
        out << q.to_dot();
    } else {
        out << "blocks (" << p.block_count() << "):\n";
        for (const auto& block : p.blocks()) {
            out << "  {";
            for (std::size_t i = 0; i < block.size(); ++i)
                out << (i ? ", " : "") << m.state_name(block[i]);
            out << "}\n";
        }
        out << model_text(q);
    }
    return 0;
}

int cmd_xcheck(const Options& opt, std::ostream& out) {
    Language check_lang;
    if (opt.check == "lemma5.3" || opt.check == "lemma5.6" || opt.check == "thm5.7")
        check_lang = Language::pepa;
    else if (opt.check == "lemma6.5" || opt.check == "thm6.6")
        check_lang = Language::iml;
    else if (opt.check == "lemma2.1")
        check_lang = Language::raw;  // no source language
    else
        throw Error("unknown check '" + opt.check + "'");

    checks::Report report;
    if (opt.check == "lemma2.1") {
        if (!opt.file.empty())
            throw Error("lemma2.1 runs on random functions; use --random");
        report = checks::lemma21(opt.seed, opt.count);
    } else {
        std::vector<std::string> sources;
        if (!opt.file.empty())
            sources = gen::split_corpus(read_file(opt.file));
        else
            sources = gen::corpus(check_lang, opt.seed, opt.count, opt.depth);
        if (opt.check == "lemma5.3")
            report = checks::lemma53(sources, opt.cap);
        else if (opt.check == "lemma5.6")
            report = checks::lemma56(sources, opt.cap);
        else if (opt.check == "thm5.7")
            report = checks::thm57(sources, opt.cap);
        else if (opt.check == "lemma6.5")
            report = checks::lemma65(sources, opt.cap);
        else
            report = checks::thm66(sources, opt.cap);
    }

    for (const auto& item : report.items) {
        switch (item.status) {
            case checks::Status::pass: break;
            case checks::Status::fail:
                out << "term " << item.index << ": fail: " << item.detail << "\n";
                break;
            case checks::Status::skip:
                out << "term " << item.index << ": skipped: " << item.detail << "\n";
                break;
        }
    }
    out << report.name << ": " << report.passed() << " passed, " << report.failed() << " failed, "
        << report.skipped() << " skipped\n";
    return report.ok() ? 0 : 1;
}

int cmd_gen(const Options& opt, std::ostream& out) {
    if (opt.lang == Language::raw) throw Error("gen needs --lang pepa or --lang iml");
    std::vector<std::string> sections = gen::corpus(opt.lang, opt.seed, opt.count, opt.depth);
    write_output(opt.out_path, gen::corpus_to_text(sections), out);
    return 0;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"semantics workbench for state-to-function transition systems"};
    app.require_subcommand(1);

    Options opt;
    auto add_common = [&](CLI::App* cmd, bool with_file) {
        if (with_file) cmd->add_option("file", opt.file, "input file")->required();
        cmd->add_option("--lang", opt.lang, "input language")
            ->transform(CLI::CheckedTransformer(
                std::map<std::string, Language>{{"pepa", Language::pepa},
                                                {"iml", Language::iml},
                                                {"raw", Language::raw}}));
        cmd->add_option("--cap", opt.cap, "state cap for exploration")
            ->check(CLI::PositiveNumber);
    };

    CLI::App* parse = app.add_subcommand("parse", "parse and echo a model file");
    add_common(parse, true);
    parse->add_option("--format", opt.format)->check(CLI::IsMember({"text", "json"}));

    CLI::App* lts = app.add_subcommand("lts", "explore and export a transition system");
    add_common(lts, true);
    lts->add_option("--root", opt.roots, "root expression (defaults to the file's root)");
    lts->add_option("--semantics", opt.semantics)->check(CLI::IsMember({"futs", "standard"}));
    lts->add_option("--format", opt.format)->check(CLI::IsMember({"json", "dot", "text"}));

    CLI::App* bisim = app.add_subcommand("bisim", "decide bisimilarity of two processes");
    add_common(bisim, true);
    bisim->add_option("--root", opt.roots, "process expression or raw state name (twice)");

    CLI::App* minimize = app.add_subcommand("minimize", "quotient by the coarsest bisimulation");
    add_common(minimize, true);
    minimize->add_option("--root", opt.roots, "root expression (defaults to the file's root)");
    minimize->add_option("--format", opt.format)->check(CLI::IsMember({"json", "dot", "text"}));

    CLI::App* xcheck = app.add_subcommand("xcheck", "cross-validate the two semantic routes");
    xcheck->add_option("--check", opt.check, "which law to check")
        ->required()
        ->check(CLI::IsMember({"lemma2.1", "lemma5.3", "lemma5.6", "thm5.7", "lemma6.5", "thm6.6"}));
    xcheck->add_option("--file", opt.file, "corpus file (sections separated by ---)");
    xcheck->add_flag("--random", opt.random_source, "generate the corpus from --seed/--count/--depth");
    xcheck->add_option("--seed", opt.seed);
    xcheck->add_option("--count", opt.count)->check(CLI::PositiveNumber);
    xcheck->add_option("--depth", opt.depth)->check(CLI::PositiveNumber);
    xcheck->add_option("--cap", opt.cap)->check(CLI::PositiveNumber);

    CLI::App* generate = app.add_subcommand("gen", "emit a random corpus file");
    generate->add_option("--lang", opt.lang, "pepa or iml")
        ->transform(CLI::CheckedTransformer(std::map<std::string, Language>{
            {"pepa", Language::pepa}, {"iml", Language::iml}}));
    generate->add_option("--seed", opt.seed);
    generate->add_option("--count", opt.count)->check(CLI::PositiveNumber);
    generate->add_option("--depth", opt.depth)->check(CLI::PositiveNumber);
    generate->add_option("-o,--out", opt.out_path, "output file (stdout when absent)");

    std::vector<char*> argv;
    std::vector<std::string> storage = args;
    storage.insert(storage.begin(), "futs");
    argv.reserve(storage.size());
    for (auto& s : storage) argv.push_back(s.data());

    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        return app.exit(e, out, err);
    }

    try {
        if (parse->parsed()) return cmd_parse(opt, out);
        if (lts->parsed()) return cmd_lts(opt, out);
        if (bisim->parsed()) return cmd_bisim(opt, out);
        if (minimize->parsed()) return cmd_minimize(opt, out);
        if (xcheck->parsed()) return cmd_xcheck(opt, out);
        if (generate->parsed()) return cmd_gen(opt, out);
    } catch (const IoError& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    } catch (const SourceError& e) {
        err << (opt.file.empty() ? "input" : opt.file) << ":" << e.line << ":" << e.col
            << ": error: " << e.message << "\n";
        return 1;
    } catch (const StateCapExceeded& e) {
        err << "error: " << e.what() << " (partial exploration discarded)\n";
        return 1;
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    } catch (const nlohmann::json::exception& e) {
        err << "error: invalid JSON: " << e.what() << "\n";
        return 1;
    }
    return 0;
}

}  // namespace futs::cli

// Command-line front end: tile addressing, pattern checking, the bounded
// solver, the dyadic encoding and its verification harness, Turing-machine
// simulation and compilation, the four-layer builder/checker, and SVG
// rendering. Exit codes: 0 success/holds, 1 violation/UNSAT/counterexample,
// 2 usage or budget error.

#include <CLI11.hpp>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <limits>
#include <memory>
#include <sstream>

#include "horo/cft.hpp"
#include "horo/dyadic.hpp"
#include "horo/layers.hpp"
#include "horo/render.hpp"
#include "horo/turing.hpp"

namespace {

using namespace horo;

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void spit(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write '" + path + "'");
    out << content;
}

long long default_budget() {
    if (const char* env = std::getenv("HORO_BUDGET")) {
        try {
            return std::stoll(env);
        } catch (...) {
            throw std::runtime_error("HORO_BUDGET is not an integer");
        }
    }
    return 1000;
}

Address parse_address(const std::string& text) {
    auto comma = text.find(',');
    if (comma == std::string::npos) throw std::runtime_error("address must be <level>,<offset>");
    return Address{std::stoll(text.substr(0, comma)), std::stoll(text.substr(comma + 1))};
}

Window parse_window_spec(const std::string& text) {
    std::int64_t v[4];
    std::size_t pos = 0;
    for (int i = 0; i < 4; ++i) {
        auto colon = text.find(':', pos);
        std::string part = colon == std::string::npos ? text.substr(pos) : text.substr(pos, colon - pos);
        if (part.empty() || (colon == std::string::npos) != (i == 3))
            throw std::runtime_error("--window expects top:bottom:left:right");
        v[i] = std::stoll(part);
        pos = colon + 1;
    }
    return Window::make(v[0], v[1], v[2], v[3]);
}

ChoiceSequence parse_choices(const std::string& bits) {
    std::vector<std::uint8_t> b;
    for (char c : bits) {
        if (c != '0' && c != '1') throw std::runtime_error("--choices expects a 01-string");
        b.push_back(c == '1');
    }
    return ChoiceSequence(std::move(b));
}

// enumerator from either a rule file (list-backed) or a machine file
std::unique_ptr<Enumerator> make_enumerator(const std::string& rules_path, const std::string& machine_path,
                                            const Alphabet& content) {
    if (!machine_path.empty()) return std::make_unique<MachineEnumerator>(parse_machine(slurp(machine_path)), content);
    if (rules_path.empty()) throw std::runtime_error("need --rules or --machine for the enumerator");
    RuleSet rules = parse_rules(slurp(rules_path));
    return std::make_unique<ListEnumerator>(rules.alphabet, rules.forbidden);
}

void print_diagram(const SpaceTimeDiagram& d, const TuringMachine& tm, std::ostream& out) {
    for (std::size_t t = 0; t < d.rows.size(); ++t) {
        const DiagramRow& r = d.rows[t];
        std::int64_t hi = r.head;
        if (!r.tape.empty()) hi = std::max(hi, r.tape.rbegin()->first);
        out << "step " << t << " state " << tm.states[static_cast<std::size_t>(r.state)] << " head " << r.head
            << ":";
        for (std::int64_t i = 0; i <= hi; ++i)
            out << " " << tm.tape_symbols[static_cast<std::size_t>(d.symbol_at(t, i, tm))];
        out << "\n";
    }
    if (d.halted) out << "halted\n";
}

int run_cli(int argc, char** argv) {
    CLI::App app{"constructions on the 2-fold horocyclic tessellation"};
    app.require_subcommand(1);
    app.fallthrough();  // global options may follow a subcommand
    int jobs = 1;
    app.add_option("--jobs", jobs, "cap on worker parallelism")->check(CLI::PositiveNumber);

    // normalize
    auto* norm = app.add_subcommand("normalize", "normalize a word over a A b B to a tile address");
    std::string word_text, base_text = "0,0", choices_text;
    norm->add_option("word", word_text, "word over {a, A, b, B}");
    norm->add_option("--base", base_text, "start address <level>,<offset>");
    norm->add_option("--choices", choices_text, "alignment bits for rows above level 0");

    // support
    auto* support = app.add_subcommand("support", "emit the U_n or L_n support of a base tile");
    std::string support_kind;
    int support_n = 0;
    std::string support_base = "0,0";
    support->add_option("kind", support_kind, "un or ln")->required()->check(CLI::IsMember({"un", "ln"}));
    support->add_option("n", support_n, "size parameter")->required()->check(CLI::NonNegativeNumber);
    support->add_option("--base", support_base, "base address <level>,<offset>");

    // check
    auto* chk = app.add_subcommand("check", "report forbidden-pattern occurrences in a patch");
    std::string chk_rules, chk_patch;
    chk->add_option("--rules", chk_rules)->required();
    chk->add_option("--patch", chk_patch)->required();

    // solve
    auto* slv = app.add_subcommand("solve", "complete a window against a rule set");
    std::string slv_rules, slv_window, slv_seed, slv_halfplane, slv_out;
    std::int64_t slv_boundary = 0;
    long long slv_budget = -1;
    slv->add_option("--rules", slv_rules)->required();
    slv->add_option("--window", slv_window, "top:bottom:left:right")->required();
    slv->add_option("--halfplane", slv_halfplane, "half-plane symbol");
    slv->add_option("--boundary", slv_boundary, "lowest all-half-plane row");
    slv->add_option("--seed", slv_seed, "seed patch file");
    slv->add_option("--budget", slv_budget, "node budget (default HORO_BUDGET or 1000)");
    slv->add_option("--out", slv_out, "write the solution patch here");

    // encode
    auto* enc = app.add_subcommand("encode", "dyadic encoding of a window-total patch");
    std::string enc_patch;
    enc->add_option("--patch", enc_patch)->required();

    // split
    auto* spl = app.add_subcommand("split", "emit the split members of a U_n pattern");
    std::string spl_pattern;
    int spl_kmax = 1;
    spl->add_option("--pattern", spl_pattern)->required();
    spl->add_option("--kmax", spl_kmax)->required()->check(CLI::PositiveNumber);

    // verify
    auto* ver = app.add_subcommand("verify", "brute-force verification of the transport propositions");
    int ver_prop = 1, ver_n = 2;
    long ver_trials = 100;
    std::uint64_t ver_seed = 1;
    ver->add_option("--prop", ver_prop)->required()->check(CLI::Range(1, 3));
    ver->add_option("--n", ver_n)->required()->check(CLI::Range(1, 6));
    ver->add_option("--trials", ver_trials);
    ver->add_option("--seed", ver_seed);

    // tm
    auto* tm = app.add_subcommand("tm", "Turing machines");
    auto* tm_run = tm->add_subcommand("run", "simulate a machine");
    std::string tmr_machine, tmr_input;
    long long tmr_steps = 0;
    tm_run->add_option("--machine", tmr_machine)->required();
    tm_run->add_option("--steps", tmr_steps)->required()->check(CLI::NonNegativeNumber);
    tm_run->add_option("--input", tmr_input, "initial tape content");
    auto* tm_compile = tm->add_subcommand("compile", "compile a machine to local rules");
    std::string tmc_machine, tmc_rules_out, tmc_seed_out;
    int tmc_width = 8, tmc_depth = 6;
    tm_compile->add_option("--machine", tmc_machine)->required();
    tm_compile->add_option("--rules-out", tmc_rules_out, "write the rule set here (default stdout)");
    tm_compile->add_option("--width", tmc_width)->check(CLI::PositiveNumber);
    tm_compile->add_option("--depth", tmc_depth)->check(CLI::PositiveNumber);
    tm_compile->add_option("--seed-out", tmc_seed_out, "write the seeded window patch here");
    auto* tm_mex = tm->add_subcommand("mex", "emit the built-in example machine");
    tm->require_subcommand(1);
    (void)tm_mex;

    // layers
    auto* lay = app.add_subcommand("layers", "four-layer construction");
    auto* lay_build = lay->add_subcommand("build", "build the four layers over a content patch");
    std::string lb_patch, lb_schedule, lb_rules, lb_machine, lb_out;
    std::int64_t lb_boundary = 0;
    long long lb_budget = -1;
    lay_build->add_option("--patch", lb_patch)->required();
    lay_build->add_option("--boundary", lb_boundary, "lowest all-half-plane row");
    lay_build->add_option("--schedule", lb_schedule, "schedule file (default auto)");
    lay_build->add_option("--rules", lb_rules, "list-backed enumerator source");
    lay_build->add_option("--machine", lb_machine, "machine-backed enumerator source");
    lay_build->add_option("--budget", lb_budget);
    lay_build->add_option("--out", lb_out);
    auto* lay_check = lay->add_subcommand("check", "validate a four-layer patch");
    std::string lc_layers, lc_rules, lc_machine;
    long long lc_budget = -1;
    lay_check->add_option("--layers", lc_layers)->required();
    lay_check->add_option("--rules", lc_rules);
    lay_check->add_option("--machine", lc_machine);
    lay_check->add_option("--budget", lc_budget);
    lay->require_subcommand(1);

    // render
    auto* ren = app.add_subcommand("render", "schematic SVG of a patch");
    std::string ren_patch, ren_layers, ren_out;
    int ren_layer = 1;
    bool ren_labels = false;
    double ren_aspect = 0.75;
    std::vector<std::string> ren_colors;
    ren->add_option("--patch", ren_patch);
    ren->add_option("--layers", ren_layers, "four-layer file; pick with --layer");
    ren->add_option("--layer", ren_layer)->check(CLI::Range(1, 4));
    ren->add_option("--out", ren_out)->required();
    ren->add_flag("--labels", ren_labels);
    ren->add_option("--color", ren_colors, "symbol=fill overrides");
    ren->add_option("--aspect", ren_aspect);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;  // usage errors exit 2; --help exits 0
    }

    if (norm->parsed()) {
        Word w = parse_word(word_text);
        auto res = normalize(w, parse_address(base_text), parse_choices(choices_text));
        if (!res) {
            std::cout << "invalid\n";
            return 1;
        }
        std::cout << to_string(*res) << "\n";
        return 0;
    }
    if (support->parsed()) {
        Address base = parse_address(support_base);
        AddressSet set = support_kind == "un" ? support_un(support_n, base) : support_ln(support_n, base);
        for (Address a : set) std::cout << to_string(a) << "\n";
        return 0;
    }
    if (chk->parsed()) {
        RuleSet rules = parse_rules(slurp(chk_rules));
        Patch patch = parse_patch(slurp(chk_patch));
        auto violations = check(patch, rules, jobs);
        for (const auto& v : violations) std::cout << "rule " << v.rule << " at " << to_string(v.base) << "\n";
        return violations.empty() ? 0 : 1;
    }
    if (slv->parsed()) {
        RuleSet rules = parse_rules(slurp(slv_rules));
        Window w = parse_window_spec(slv_window);
        std::optional<RowConstraint> rc;
        if (!slv_halfplane.empty()) rc = RowConstraint{rules.alphabet.symbol(slv_halfplane), slv_boundary};
        Patch seed;
        bool have_seed = !slv_seed.empty();
        if (have_seed) seed = parse_patch(slurp(slv_seed));
        long long budget = slv_budget >= 0 ? slv_budget : std::max<long long>(default_budget(), 1'000'000);
        auto res = solve(w, rules, rc, have_seed ? &seed : nullptr, budget);
        if (res.status == SolveStatus::budget) {
            std::cerr << "budget exhausted after " << res.nodes << " nodes\n";
            return 2;
        }
        if (res.status == SolveStatus::unsat) {
            std::cout << "UNSAT\n";
            return 1;
        }
        std::string text = serialize_patch(*res.patch);
        if (slv_out.empty())
            std::cout << text;
        else
            spit(slv_out, text);
        return 0;
    }
    if (enc->parsed()) {
        Patch x = parse_patch(slurp(enc_patch));
        Window w = infer_window(x);
        DyadicPatch dp = phi(x, w);
        std::cout << "track: 1\n" << serialize_patch(dp.first) << "track: 2\n" << serialize_patch(dp.second);
        return 0;
    }
    if (spl->parsed()) {
        Patch p = parse_patch(slurp(spl_pattern));
        auto members = split_pattern(p, spl_kmax);
        LinearFile f;
        f.alphabet = p.alphabet;
        f.patterns = members;
        std::cout << serialize_linear_file(f);
        return 0;
    }
    if (ver->parsed()) {
        PropReport rep = verify_prop(ver_prop, ver_n, ver_trials, ver_seed);
        std::cout << "prop " << rep.prop << ": " << rep.checks << " checks, " << rep.failures
                  << " counterexamples\n";
        for (const auto& line : rep.lines) std::cout << line << "\n";
        return rep.ok() ? 0 : 1;
    }
    if (tm_run->parsed()) {
        TuringMachine machine = parse_machine(slurp(tmr_machine));
        std::vector<int> input;
        for (char c : tmr_input) {
            int id = machine.symbol_id(std::string(1, c));
            if (id < 0) throw std::runtime_error("input symbol not in the tape alphabet");
            input.push_back(id);
        }
        try {
            print_diagram(run(machine, input, tmr_steps), machine, std::cout);
        } catch (const StuckError& e) {
            std::cerr << "stuck: " << e.what() << "\n";
            return 1;
        }
        return 0;
    }
    if (tm_compile->parsed()) {
        CompiledMachine cm = compile_to_rules(parse_machine(slurp(tmc_machine)));
        std::string rules_text = serialize_rules(cm.rules);
        if (tmc_rules_out.empty())
            std::cout << rules_text;
        else
            spit(tmc_rules_out, rules_text);
        if (!tmc_seed_out.empty()) spit(tmc_seed_out, serialize_patch(cm.seed(tmc_width, tmc_depth)));
        return 0;
    }
    if (tm_mex->parsed()) {
        std::cout << serialize_machine(machine_ex());
        return 0;
    }
    if (lay_build->parsed()) {
        Patch x = parse_patch(slurp(lb_patch));
        if (!x.alphabet.halfplane) throw std::runtime_error("content patch needs a halfplane: line");
        RowConstraint rc{Symbol(*x.alphabet.halfplane), lb_boundary};
        ZoneSchedule schedule = lb_schedule.empty() ? ZoneSchedule::automatic() : parse_schedule(slurp(lb_schedule));
        auto en = make_enumerator(lb_rules, lb_machine, x.alphabet);
        long long budget = lb_budget >= 0 ? lb_budget : default_budget();
        FourLayerPatch flp = build_layers(x, rc, schedule, *en, budget);
        std::string text = serialize_layers(flp);
        if (lb_out.empty())
            std::cout << text;
        else
            spit(lb_out, text);
        int qf = flp.layer4.alphabet.index_of("qf");
        for (const auto& [a, s] : flp.layer4.cells) {
            (void)a;
            if (s.index() == qf) {
                std::cerr << "q_f raised\n";
                return 1;
            }
        }
        return 0;
    }
    if (lay_check->parsed()) {
        FourLayerPatch flp = parse_layers(slurp(lc_layers));
        auto en = make_enumerator(lc_rules, lc_machine, flp.layer1.alphabet);
        long long budget = lc_budget >= 0 ? lc_budget : default_budget();
        LayerReport rep = check_layers(flp, *en, budget);
        for (const auto& v : rep.violations) std::cout << v.rule << " at " << to_string(v.at) << "\n";
        for (Address a : rep.qf) std::cout << "q_f at " << to_string(a) << "\n";
        return rep.clean() && rep.qf.empty() ? 0 : 1;
    }
    if (ren->parsed()) {
        Patch patch;
        if (!ren_patch.empty()) {
            patch = parse_patch(slurp(ren_patch));
        } else if (!ren_layers.empty()) {
            FourLayerPatch flp = parse_layers(slurp(ren_layers));
            const Patch* layers[4] = {&flp.layer1, &flp.layer2, &flp.layer3, &flp.layer4};
            patch = *layers[ren_layer - 1];
        } else {
            throw std::runtime_error("render needs --patch or --layers");
        }
        RenderOptions opts = RenderOptions::palette_for(patch.alphabet);
        opts.show_labels = ren_labels;
        opts.aspect = ren_aspect;
        for (const auto& c : ren_colors) {
            auto eq = c.find('=');
            if (eq == std::string::npos) throw std::runtime_error("--color expects symbol=fill");
            opts.fills[c.substr(0, eq)] = c.substr(eq + 1);
        }
        spit(ren_out, render_svg(patch, opts));
        return 0;
    }
    return 2;
}

}  // namespace

int main(int argc, char** argv) {
    try {
        return run_cli(argc, argv);
    } catch (const horo::ParseError& e) {
        std::cerr << "parse error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}

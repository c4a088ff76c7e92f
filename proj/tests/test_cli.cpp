#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <array>
#include <cstdio>
#include <fstream>
#include <string>

// end-to-end checks of the command-line surface: output bytes and the
// documented 0/1/2 exit-code contract

#include "horo/render.hpp"

namespace {

struct CliResult {
    int code;
    std::string out;
};

CliResult run_cli(const std::string& args) {
    std::string cmd = std::string(HORO_CLI_PATH) + " " + args + " 2>/dev/null";
    FILE* pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe);
    std::string out;
    std::array<char, 4096> buf;
    std::size_t n;
    while ((n = fread(buf.data(), 1, buf.size(), pipe)) > 0) out.append(buf.data(), n);
    int status = pclose(pipe);
    return {WEXITSTATUS(status), out};
}

std::string write_temp(const std::string& name, const std::string& content) {
    std::string path = "/tmp/horo_cli_" + name;
    std::ofstream(path) << content;
    return path;
}

}  // namespace

TEST_CASE("normalize") {
    auto ok = run_cli("normalize abb");
    CHECK(ok.code == 0);
    CHECK(ok.out == "(1,2)\n");
    CHECK(run_cli("normalize ba").out == "(1,2)\n");
    auto invalid = run_cli("normalize A");
    CHECK(invalid.code == 1);
    CHECK(invalid.out == "invalid\n");
    CHECK(run_cli("normalize A --choices 0").out == "(-1,0)\n");
    CHECK(run_cli("normalize xyz").code == 2);
}

TEST_CASE("support") {
    auto un = run_cli("support un 2");
    CHECK(un.code == 0);
    CHECK(un.out == "(0,0)\n(1,0)\n(1,1)\n");
    auto ln = run_cli("support ln 0 --base 1,1");
    CHECK(ln.out == "(2,2)\n(2,3)\n");
    CHECK(run_cli("support nope 2").code == 2);
}

TEST_CASE("check and solve on files") {
    std::string rules = write_temp("rules.txt",
                                   "alphabet: x y\n"
                                   "forbidden {\n"
                                   "cell: 0 0 x\n"
                                   "cell: 0 1 x\n"
                                   "}\n");
    std::string patch = write_temp("patch.txt",
                                   "alphabet: x y\n"
                                   "cell: 0 0 x\n"
                                   "cell: 0 1 x\n"
                                   "cell: 0 2 y\n");
    auto bad = run_cli("check --rules " + rules + " --patch " + patch);
    CHECK(bad.code == 1);
    CHECK(bad.out == "rule 0 at (0,0)\n");

    auto solved = run_cli("solve --rules " + rules + " --window 0:1:0:2");
    CHECK(solved.code == 0);
    CHECK(solved.out.find("alphabet: x y") == 0);

    std::string unsat_rules = write_temp("unsat.txt",
                                         "alphabet: x\n"
                                         "forbidden {\ncell: 0 0 x\n}\n");
    auto unsat = run_cli("solve --rules " + unsat_rules + " --window 0:1:0:1");
    CHECK(unsat.code == 1);
    CHECK(unsat.out == "UNSAT\n");

    auto budget = run_cli("solve --rules " + unsat_rules + " --window 0:6:0:4 --budget 0");
    CHECK(budget.code == 2);
}

TEST_CASE("encode and split") {
    std::string patch = write_temp("enc.txt",
                                   "alphabet: 0 1\n"
                                   "cell: 0 0 1\n"
                                   "cell: 1 0 0\n"
                                   "cell: 1 1 1\n");
    auto enc = run_cli("encode --patch " + patch);
    CHECK(enc.code == 0);
    CHECK(enc.out.find("track: 1\n") != std::string::npos);
    CHECK(enc.out.find("track: 2\n") != std::string::npos);
    CHECK(enc.out.find("?") != std::string::npos);

    auto spl = run_cli("split --pattern " + patch + " --kmax 3");
    CHECK(spl.code == 0);
    int linear_lines = 0;
    for (std::size_t p = 0; (p = spl.out.find("linear:", p)) != std::string::npos; ++p) ++linear_lines;
    CHECK(linear_lines == 3);
}

TEST_CASE("verify exits 0 when the propositions hold") {
    auto v1 = run_cli("verify --prop 1 --n 3 --trials 10");
    CHECK(v1.code == 0);
    CHECK(v1.out.find("0 counterexamples") != std::string::npos);
    auto v2 = run_cli("verify --prop 2 --n 2 --trials 10");
    CHECK(v2.code == 0);
    CHECK(v2.out.find("informational") != std::string::npos);
}

TEST_CASE("tm run prints the diagram") {
    auto mex = run_cli("tm mex");
    CHECK(mex.code == 0);
    std::string machine = write_temp("mex.tm", mex.out);
    auto d = run_cli("tm run --machine " + machine + " --steps 3");
    CHECK(d.code == 0);
    CHECK(d.out.find("step 3 state qpar head 1: a b |") != std::string::npos);
}

TEST_CASE("layers build and check round-trip through files") {
    std::string content = write_temp("content.txt",
                                     "alphabet: ~ x y\n"
                                     "halfplane: ~\n"
                                     "cell: 0 0 ~\n"
                                     "cell: 1 0 x\n"
                                     "cell: 1 1 y\n"
                                     "cell: 2 0 x\n"
                                     "cell: 2 1 y\n"
                                     "cell: 2 2 x\n"
                                     "cell: 2 3 y\n"
                                     "cell: 3 0 x\ncell: 3 1 y\ncell: 3 2 x\ncell: 3 3 y\n"
                                     "cell: 3 4 x\ncell: 3 5 y\ncell: 3 6 x\ncell: 3 7 y\n");
    std::string rules = write_temp("forbid.txt",
                                   "alphabet: ~ x y\n"
                                   "forbidden {\ncell: 0 0 x\ncell: 1 0 y\ncell: 1 1 x\n}\n");
    std::string schedule = write_temp("sched.txt", "zone: 0 close_at 1\n");
    std::string out = "/tmp/horo_cli_layers.txt";
    auto built = run_cli("layers build --patch " + content + " --boundary 0 --schedule " + schedule + " --rules " +
                         rules + " --budget 5 --out " + out);
    CHECK(built.code == 0);
    auto checked = run_cli("layers check --layers " + out + " --rules " + rules + " --budget 5");
    CHECK(checked.code == 0);
    CHECK(checked.out.empty());
}

TEST_CASE("render_svg basics") {
    horo::Patch empty;
    empty.alphabet = horo::Alphabet::make({"x"});
    std::string svg = horo::render_svg(empty, horo::RenderOptions::palette_for(empty.alphabet));
    CHECK(svg.find("<svg") == 0);
    CHECK(svg.find("</svg>") != std::string::npos);

    // a colour-map gap is an error
    horo::Patch one = empty;
    one.cells.emplace(horo::Address{0, 0}, horo::Symbol(0));
    horo::RenderOptions gap;
    CHECK_THROWS_AS(horo::render_svg(one, gap), std::invalid_argument);
}

TEST_CASE("render: deterministic bytes, correct cell count") {
    std::string patch = write_temp("ren.txt",
                                   "alphabet: x y\n"
                                   "cell: 0 0 x\n"
                                   "cell: 1 0 y\n"
                                   "cell: 1 1 x\n");
    auto a = run_cli("render --patch " + patch + " --out /tmp/horo_cli_a.svg");
    auto b = run_cli("render --patch " + patch + " --out /tmp/horo_cli_b.svg");
    CHECK(a.code == 0);
    CHECK(b.code == 0);
    std::ifstream fa("/tmp/horo_cli_a.svg"), fb("/tmp/horo_cli_b.svg");
    std::string sa((std::istreambuf_iterator<char>(fa)), std::istreambuf_iterator<char>());
    std::string sb((std::istreambuf_iterator<char>(fb)), std::istreambuf_iterator<char>());
    CHECK(sa == sb);
    int polygons = 0;
    for (std::size_t p = 0; (p = sa.find("<polygon", p)) != std::string::npos; ++p) ++polygons;
    CHECK(polygons == 3);

    // empty-ish input and usage errors
    CHECK(run_cli("render --out /tmp/x.svg").code == 2);
    CHECK(run_cli("bogus").code == 2);
}

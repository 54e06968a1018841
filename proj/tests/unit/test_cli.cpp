// Copyright 2026 The jumplab Authors.
// SPDX-License-Identifier: Apache-2.0

#include <unistd.h>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "jumplab/cli.hpp"
#include "jumplab/config.hpp"
#include "jumplab/error.hpp"
#include "jumplab/pipeline.hpp"
#include "jumplab/svg.hpp"

using namespace jumplab;
namespace fs = std::filesystem;

namespace {

const char* const kPoisson = R"([kernel]
dimension = 1
id = cp

[component atoms]
atom = 1, 0.5
atom = 1, -0.5

[sim]
t_end = 1
epsilon = 0.1
seed = 17
n_paths = 300
path_files = 2

[analysis martingale]
times = 0.5, 1

[analysis qv]
t = 1

[analysis generator]
t = 1
functions = constant, cos1
)";

// Fresh scratch directory per call.
fs::path scratch(const std::string& tag)
{
    static int counter = 0;
    const fs::path p = fs::temp_directory_path() / ("jumplab_cli_test_" + std::to_string(::getpid()) + "_" + tag + "_" +
                                                    std::to_string(counter++));
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

fs::path put(const fs::path& dir, const std::string& name, const std::string& text)
{
    std::ofstream(dir / name, std::ios::binary) << text;
    return dir / name;
}

std::string slurp(const fs::path& p)
{
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

int run(std::vector<std::string> args, std::string* log = nullptr)
{
    args.insert(args.begin(), "jumplab");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream os;
    const int rc = run_cli(static_cast<int>(argv.size()), argv.data(), os);
    if (log) *log = os.str();
    return rc;
}

// Every data file under a run directory, minus timings.
std::vector<std::pair<std::string, std::string>> data_files(const fs::path& dir)
{
    std::vector<std::pair<std::string, std::string>> out;
    for (const auto& e : fs::recursive_directory_iterator(dir)) {
        if (!e.is_regular_file() || e.path().filename() == "timings.txt") continue;
        out.emplace_back(fs::relative(e.path(), dir).generic_string(), slurp(e.path()));
    }
    std::sort(out.begin(), out.end());
    return out;
}

std::size_t config_error_line(const std::string& text)
{
    try {
        parse_config(text);
    } catch (const ConfigError& e) {
        return e.line();
    }
    return 0;
}

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("fnv1a64 reference vectors")
{
    CHECK(fnv1a64("") == 0xcbf29ce484222325ULL);
    CHECK(fnv1a64("a") == 0xaf63dc4c8601ec8cULL);
    CHECK(fnv1a64("foobar") == 0x85944171f73967e8ULL);
}

TEST_CASE("config parses the reference text")
{
    const auto c = parse_config(kPoisson);
    CHECK(c.d == 1);
    CHECK(c.kernel_id == "cp");
    CHECK(c.kernel.components().size() == 1);
    CHECK(c.sim.base_seed == 17);
    CHECK(c.n_paths == 300);
    CHECK(c.x0 == Vec::zero(1));
    REQUIRE(c.analyses.size() == 3);
    CHECK(c.analyses[0].times == std::vector<double>{0.5, 1.0});
    CHECK(c.analyses[2].functions == std::vector<std::string>{"constant", "cos1"});
    CHECK(c.grid.points.size() == 201);
    CHECK(c.output.csv);
    CHECK(c.output.svg);
}

TEST_CASE("config errors carry the line")
{
    std::string t = kPoisson;
    CHECK(config_error_line(std::string(t).replace(t.find("path_files"), 10, "path_filez")) == 14);
    CHECK(config_error_line(std::string(t).replace(t.find("seed = 17"), 9, "sed = 17")) == 9);
    CHECK(config_error_line(std::string(t).replace(t.find("epsilon = 0.1"), 13, "epsilon = 0.1x")) == 11);
    CHECK(config_error_line(std::string(t).replace(t.find("atom = 1, 0.5"), 13, "atom = 1, 0.5, 2")) == 6);
    CHECK(config_error_line(std::string(t).replace(t.find("[analysis qv]"), 13, "[analysis qq]")) == 19);
    CHECK(config_error_line(std::string(t).replace(t.find("times = 0.5, 1"), 14, "times = 0.5, 2")) == 16);
    CHECK(config_error_line(t + "[bogus]\n") == 25);
    CHECK(config_error_line("[kernel]\ndimension = 4\n[sim]\nseed = 1\nn_paths = 1\n") == 2);
}

TEST_CASE("bad expression reports line and column")
{
    const std::string t = "[kernel]\ndimension = 1\n[component stable_like]\nc = \"1 + +\"\nalpha = 1\n"
                          "[sim]\nseed = 1\nn_paths = 1\n";
    try {
        parse_config(t);
        FAIL("no error");
    } catch (const ConfigError& e) {
        CHECK(e.line() == 4);
        // the value starts at column 5; the offending '+' is at offset 4 of the string
        CHECK(std::string(e.what()).find("column 10") != std::string::npos);
    }
    CHECK(config_error_line("[kernel]\ndimension = 1\n[component stable_like]\nc = \"x[1]\"\nalpha = 1\n"
                            "[sim]\nseed = 1\nn_paths = 1\n") == 4);
}

TEST_CASE("structural config errors")
{
    CHECK_THROWS_AS(parse_config("[kernel]\ndimension = 1\n[component atoms]\natom = 1, 1\n"), ConfigError);
    CHECK(config_error_line("[kernel]\ndimension = 1\n[sim]\nseed = 1\nn_paths = 0\n") == 5);
    CHECK(config_error_line("[kernel]\ndimension = 1\n[sim]\nn_paths = 3\n") == 3);
    CHECK_THROWS_AS(parse_config("[kernel]\ndimension = 1\n[component atoms]\natom = 1, 1\n[lower atoms]\natom = 1, "
                                 "1\n[sim]\nseed = 1\nn_paths = 1\n"),
                    ConfigError);
    // comments and quoted '#'
    const auto c = parse_config("# top\n[kernel] ; trailing\ndimension = 1 # d\n[component stable_like]\n"
                                "c = \"1 + 0*x[0]\" # a comment\nalpha = 1\n[sim]\nseed = 1\nn_paths = 2\n");
    CHECK(c.kernel.components().size() == 1);
}

TEST_CASE("grid defaults depend on the dimension")
{
    const auto c2 = parse_config("[kernel]\ndimension = 2\n[component stable_like]\nc = 1\nalpha = 1\n"
                                 "[sim]\nx0 = 0, 0\nseed = 1\nn_paths = 1\n");
    CHECK(c2.grid.points.size() == 41u * 41u);
    const auto c3 = parse_config("[kernel]\ndimension = 1\n[component stable_like]\nc = 1\nalpha = 1\n"
                                 "[grid]\nlo = -1\nhi = 1\nn = 5\n[sim]\nseed = 1\nn_paths = 1\n");
    CHECK(c3.grid.points.size() == 5);
}

TEST_CASE("run directory precedence")
{
    auto c = parse_config(kPoisson);
    RunOptions o;
    ::setenv("JUMPLAB_OUT", "/env/root", 1);
    const std::string h = fs::path(run_directory(c, o)).filename().string();
    CHECK(h.size() == 16);
    CHECK(fs::path(run_directory(c, o)).parent_path() == "/env/root");
    c.output.dir = "cfgdir";
    CHECK(fs::path(run_directory(c, o)).parent_path() == "cfgdir");
    o.out_root = "/flag";
    CHECK(fs::path(run_directory(c, o)).parent_path() == "/flag");
    ::unsetenv("JUMPLAB_OUT");
    c.output.dir.clear();
    o.out_root.clear();
    CHECK(fs::path(run_directory(c, o)).parent_path() == "out");
    o.seed_override = 5;
    CHECK(fs::path(run_directory(c, o)).filename().string() != h);
}

TEST_CASE("ensemble csv round trip")
{
    const auto c = parse_config(kPoisson);
    const Simulator sim(c.kernel, c.sim, c.grid, c.x0);
    const auto ens = sim.simulate_ensemble(25);
    const auto files = ensemble_to_csv(ens, c.x0);
    CHECK(files.jumps.find("path,jump_time,z1\n") != std::string::npos);
    const auto back = ensemble_from_csv(files);
    REQUIRE(back.paths.size() == ens.paths.size());
    for (std::size_t i = 0; i < ens.paths.size(); ++i) {
        CHECK(back.paths[i].jump_times == ens.paths[i].jump_times);
        CHECK(back.paths[i].seed == ens.paths[i].seed);
        CHECK(back.paths[i].final_state() == ens.paths[i].final_state());
    }
    const auto again = ensemble_to_csv(back, c.x0);
    CHECK(again.paths == files.paths);
    CHECK(again.jumps == files.jumps);

    auto broken = files;
    broken.jumps += "0,0.5\n";
    CHECK_THROWS_AS(ensemble_from_csv(broken), ConfigError);
    broken = files;
    broken.jumps += "999,0.5,1\n";
    CHECK_THROWS_AS(ensemble_from_csv(broken), ConfigError);
}

TEST_CASE("svg output is deterministic and closed")
{
    SvgPlot p("title & <x>", "t", "y");
    p.line({0, 1, 2}, {0, 1, 4}, "#000");
    p.hline(1.0, "red", "one");
    const auto a = p.render();
    CHECK(a == p.render());
    CHECK(a.rfind("<svg", 0) == 0);
    CHECK(a.find("</svg>") != std::string::npos);
    CHECK(a.find("&amp;") != std::string::npos);
    CHECK(a.find("<x>") == std::string::npos);
}

TEST_CASE("exit codes")
{
    const fs::path dir = scratch("codes");
    const std::string out = (dir / "out").string();
    std::string log;

    CHECK(run({}, &log) == kExitUsage);
    CHECK(run({"simulate"}, &log) == kExitUsage);
    CHECK(run({"validate", (dir / "missing.cfg").string()}, &log) == kExitUsage);

    const auto good = put(dir, "cp.cfg", kPoisson);
    CHECK(run({"validate", good.string(), "--out", out}, &log) == kExitOk);

    const auto divergent = put(dir, "div.cfg",
                               "[kernel]\ndimension = 1\n[component power_law]\nc0 = 1\nbeta1 = 1.5\n"
                               "[sim]\nseed = 1\nn_paths = 10\n");
    CHECK(run({"validate", divergent.string(), "--out", out}, &log) == kExitFail);
    const auto rep = slurp(fs::path(out) / fs::path(run_directory(load_config(divergent.string()), {})).filename() /
                           "reports" / "validation.txt");
    CHECK(rep.find("[check second_moment]\nassumption") != std::string::npos);
    CHECK(rep.find("evidence.sup = inf") != std::string::npos);
    CHECK(run({"simulate", divergent.string(), "--out", out}, &log) == kExitFail);

    const auto bad = put(dir, "bad.cfg",
                         "[kernel]\ndimension = 1\n[component stable_like]\nc = \"1 +\"\nalpha = 1\n"
                         "[sim]\nseed = 1\nn_paths = 10\n");
    CHECK(run({"validate", bad.string(), "--out", out}, &log) == kExitUsage);
    CHECK(log.find("line 4") != std::string::npos);

    std::string zero = kPoisson;
    zero.replace(zero.find("n_paths = 300"), 13, "n_paths = 0");
    CHECK(run({"simulate", put(dir, "zero.cfg", zero).string(), "--out", out}, &log) == kExitUsage);

    // analyze before simulate
    CHECK(run({"analyze", good.string(), "--out", out}, &log) == kExitUsage);
    CHECK(run({"simulate", good.string(), "--out", out}, &log) == kExitOk);
    CHECK(run({"analyze", good.string(), "--out", out}, &log) == kExitOk);
}

TEST_CASE("drifting kernel fails the martingale analysis under --force")
{
    const fs::path dir = scratch("drift");
    const std::string out = (dir / "out").string();
    const auto cfg = put(dir, "drift.cfg",
                         "[kernel]\ndimension = 1\n[component cone]\nbase = power_law\npredicate = \"x[0]\"\n"
                         "c0 = 1\nbeta1 = 3\n[sim]\nepsilon = 0.5\nseed = 2\nn_paths = 4000\ninline = true\n"
                         "[analysis martingale]\ntimes = 1\n");
    CHECK(run({"analyze", cfg.string(), "--out", out}) == kExitFail);
    CHECK(run({"analyze", cfg.string(), "--out", out, "--force"}) == kExitFail);
    const fs::path run_dir = fs::path(out) / fs::path(run_directory(load_config(cfg.string()), {})).filename();
    CHECK(slurp(run_dir / "reports" / "martingale.txt").find("verdict = fail") != std::string::npos);
}

TEST_CASE("pipeline output is reproducible and independent of jobs")
{
    const fs::path dir = scratch("det");
    const auto cfg = put(dir, "cp.cfg", kPoisson);
    std::vector<std::vector<std::pair<std::string, std::string>>> runs;
    for (const char* jobs : {"1", "1", "3"}) {
        const std::string out = (dir / ("out" + std::to_string(runs.size()))).string();
        REQUIRE(run({"simulate", cfg.string(), "--out", out, "--jobs", jobs}) == kExitOk);
        REQUIRE(run({"analyze", cfg.string(), "--out", out, "--jobs", jobs}) == kExitOk);
        runs.push_back(data_files(out));
    }
    REQUIRE(!runs[0].empty());
    CHECK(runs[0] == runs[1]);
    CHECK(runs[0] == runs[2]);

    bool saw_paths = false;
    for (const auto& [name, text] : runs[0]) {
        if (name.ends_with("paths/ensemble_jumps.csv")) {
            saw_paths = true;
            CHECK(text.find("path,jump_time,z1\n") != std::string::npos);
        }
        if (name.ends_with(".csv")) CHECK(text.find('\r') == std::string::npos);
    }
    CHECK(saw_paths);

    // a seed override moves to a different directory with different paths
    const std::string out = (dir / "out0").string();
    REQUIRE(run({"simulate", cfg.string(), "--out", out, "--seed-override", "99"}) == kExitOk);
    std::size_t dirs = 0;
    for (const auto& e : fs::directory_iterator(out)) dirs += e.is_directory();
    CHECK(dirs == 2);
}

}

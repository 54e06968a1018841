// Copyright 2026 The jumplab Authors.
// SPDX-License-Identifier: Apache-2.0

#include "jumplab/pipeline.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include "jumplab/error.hpp"
#include "jumplab/estimators.hpp"
#include "jumplab/format.hpp"
#include "jumplab/path_io.hpp"
#include "jumplab/svg.hpp"

namespace fs = std::filesystem;

namespace jumplab {

namespace {

std::string hex16(std::uint64_t v)
{
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

std::string vec_text(const Vec& v)
{
    std::string s;
    for (int i = 0; i < v.dim(); ++i) s += (i ? ";" : "") + format_double(v[i]);
    return s;
}

void write_file(const fs::path& p, const std::string& text)
{
    fs::create_directories(p.parent_path());
    std::ofstream out(p, std::ios::binary | std::ios::trunc);
    out << text;
    if (!out) throw Error("cannot write " + p.string());
}

std::optional<std::string> read_file(const fs::path& p)
{
    std::ifstream in(p, std::ios::binary);
    if (!in) return std::nullopt;
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::ostream& log_of(const RunOptions& o) { return o.log ? *o.log : std::cerr; }

// key = value report lines
class Report {
public:
    void kv(const std::string& k, const std::string& v) { os_ << k << " = " << v << "\n"; }
    void kv(const std::string& k, double v) { kv(k, format_double(v)); }
    void kv(const std::string& k, std::size_t v) { kv(k, std::to_string(v)); }
    void kv(const std::string& k, bool v) { kv(k, std::string(v ? "pass" : "fail")); }
    void section(const std::string& s) { os_ << "\n[" << s << "]\n"; }
    std::string str() const { return os_.str(); }

private:
    std::ostringstream os_;
};

struct Context {
    ExperimentConfig cfg;
    RunOptions opts;
    fs::path dir;
    std::map<std::string, double> timings;
};

Context open_run(const std::string& config_path, const RunOptions& opts)
{
    Context c{load_config(config_path), opts, {}, {}};
    if (opts.seed_override) c.cfg.sim.base_seed = *opts.seed_override;
    c.dir = run_directory(c.cfg, opts);
    write_file(c.dir / "manifest" / "config.cfg", c.cfg.source);
    return c;
}

template <class F>
auto timed(Context& c, const std::string& stage, F&& f)
{
    const auto t0 = std::chrono::steady_clock::now();
    auto finish = [&] {
        c.timings[stage] = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    };
    if constexpr (std::is_void_v<decltype(f())>) {
        f();
        finish();
    } else {
        auto r = f();
        finish();
        return r;
    }
}

void write_manifest(Context& c)
{
    const fs::path man = c.dir / "manifest";
    // timings are merged with earlier stages of the same run directory
    std::map<std::string, std::string> timing_lines;
    if (auto old = read_file(man / "timings.txt")) {
        std::istringstream in(*old);
        std::string line;
        while (std::getline(in, line)) {
            const auto eq = line.find(" = ");
            if (eq != std::string::npos) timing_lines[line.substr(0, eq)] = line.substr(eq + 3);
        }
    }
    for (const auto& [k, v] : c.timings) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.3f", v);
        timing_lines[k + "_seconds"] = buf;
    }
    std::string t;
    for (const auto& [k, v] : timing_lines) t += k + " = " + v + "\n";
    write_file(man / "timings.txt", t);

    std::vector<std::string> files;
    for (const char* sub : {"reports", "paths", "plots"}) {
        if (!fs::exists(c.dir / sub)) continue;
        for (const auto& e : fs::recursive_directory_iterator(c.dir / sub))
            if (e.is_regular_file()) files.push_back(fs::relative(e.path(), c.dir).generic_string());
    }
    std::sort(files.begin(), files.end());
    Report r;
    r.kv("tool_version", std::string(kToolVersion));
    r.kv("config_hash", c.dir.filename().string());
    r.kv("base_seed", std::to_string(c.cfg.sim.base_seed));
    r.kv("timings", std::string("manifest/timings.txt"));
    r.section("files");
    for (const auto& f : files) {
        const auto text = read_file(c.dir / f).value_or("");
        r.kv(f, std::to_string(text.size()) + " " + hex16(fnv1a64(text)));
    }
    write_file(man / "manifest.txt", r.str());
}

ValidationReport run_validation(Context& c)
{
    const auto& cfg = c.cfg;
    auto rep = timed(c, "validate", [&] {
        return validate_all(cfg.kernel, cfg.grid, cfg.validator, cfg.envelopes);
    });
    if (rep.kernel_id.empty()) rep.kernel_id = cfg.kernel_id;
    write_file(c.dir / "reports" / "validation.txt", rep.to_text());
    if (cfg.output.csv) write_file(c.dir / "reports" / "validation_points.csv", rep.to_csv());
    return rep;
}

// Resolves eps = auto; returns false (after logging) when it cannot.
bool resolve_epsilon(Context& c)
{
    if (!c.cfg.epsilon_auto) return true;
    try {
        c.cfg.sim.epsilon = auto_epsilon(c.cfg.kernel, c.cfg.grid, c.cfg.epsilon_target);
        c.cfg.epsilon_auto = false;
        return true;
    } catch (const Error& e) {
        log_of(c.opts) << "error: cannot choose epsilon automatically: " << e.what() << "\n";
        return false;
    }
}

bool gate(Context& c)
{
    const auto rep = run_validation(c);
    if (!rep.any_fail()) return true;
    if (c.opts.force) {
        log_of(c.opts) << "warning: validation failed; continuing because of --force\n";
        return true;
    }
    log_of(c.opts) << "error: validation failed (see reports/validation.txt); rerun with --force to override\n";
    return false;
}

std::string header_lines(const SimConfig& s, const Vec& x0, std::size_t n)
{
    std::string h;
    h += "# d=" + std::to_string(x0.dim()) + "\n";
    h += "# x0=" + vec_text(x0) + "\n";
    h += "# t_end=" + format_double(s.t_end) + "\n";
    h += "# epsilon=" + format_double(s.epsilon) + "\n";
    h += "# mode=" + mode_name(s.small_jump_mode) + "\n";
    h += "# base_seed=" + std::to_string(s.base_seed) + "\n";
    h += "# margin=" + format_double(s.dominating_rate_margin) + "\n";
    h += "# max_jumps=" + std::to_string(s.max_jumps) + "\n";
    h += "# n_paths=" + std::to_string(n) + "\n";
    return h;
}

double parse_num(std::string_view s, std::size_t line)
{
    double v = 0.0;
    const auto r = std::from_chars(s.data(), s.data() + s.size(), v);
    if (r.ec != std::errc() || r.ptr != s.data() + s.size()) throw ConfigError(line, "bad number '" + std::string(s) + "'");
    return v;
}

std::uint64_t parse_u64(std::string_view s, std::size_t line)
{
    std::uint64_t v = 0;
    const auto r = std::from_chars(s.data(), s.data() + s.size(), v);
    if (r.ec != std::errc() || r.ptr != s.data() + s.size()) throw ConfigError(line, "bad integer '" + std::string(s) + "'");
    return v;
}

std::vector<std::string_view> split(std::string_view s, char sep)
{
    std::vector<std::string_view> out;
    while (true) {
        const auto p = s.find(sep);
        out.push_back(s.substr(0, p));
        if (p == std::string_view::npos) break;
        s = s.substr(p + 1);
    }
    return out;
}

// Visits data rows (non-comment, after the column header); collects "# k=v".
template <class Row>
std::map<std::string, std::string> scan_csv(const std::string& text, Row&& row)
{
    std::map<std::string, std::string> meta;
    std::size_t line = 0, pos = 0;
    bool header = false;
    while (pos < text.size()) {
        auto end = text.find('\n', pos);
        if (end == std::string::npos) end = text.size();
        const std::string_view l(text.data() + pos, end - pos);
        pos = end + 1;
        ++line;
        if (l.empty()) continue;
        if (l.rfind("# ", 0) == 0) {
            const auto eq = l.find('=');
            if (eq != std::string_view::npos) meta[std::string(l.substr(2, eq - 2))] = std::string(l.substr(eq + 1));
            continue;
        }
        if (!header) {
            header = true;
            continue;
        }
        row(split(l, ','), line);
    }
    if (!header) throw ConfigError(0, "ensemble file has no column header");
    return meta;
}

void write_ensemble(Context& c, const PathEnsemble& ens)
{
    const auto files = ensemble_to_csv(ens, c.cfg.x0);
    write_file(c.dir / "paths" / "ensemble_paths.csv", files.paths);
    write_file(c.dir / "paths" / "ensemble_jumps.csv", files.jumps);
    const std::size_t n = std::min(c.cfg.path_files, ens.paths.size());
    for (std::size_t i = 0; i < n; ++i) {
        char name[32];
        std::snprintf(name, sizeof name, "path_%05zu.csv", i);
        write_file(c.dir / "paths" / name, path_to_csv(ens.paths[i], ens.config, i));
    }
}

bool simulate_into(Context& c, PathEnsemble& out)
{
    try {
        const Simulator sim(c.cfg.kernel, c.cfg.sim, c.cfg.grid, c.cfg.x0);
        out = timed(c, "simulate", [&] { return sim.simulate_ensemble(c.cfg.n_paths, c.opts.jobs); });
        out.kernel_id = c.cfg.kernel_id;
        return true;
    } catch (const EnvelopeViolation& e) {
        log_of(c.opts) << "error: " << e.what() << "\n";
    } catch (const JumpCapExceeded& e) {
        log_of(c.opts) << "error: " << e.what() << "\n";
    }
    return false;
}

// --- analyses --------------------------------------------------------------

const char* const kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};

struct Outcome {
    std::string kind;
    bool pass = false;
};

void put(Context& c, const std::string& rel, const std::string& text, bool is_csv, bool is_svg)
{
    if (is_csv && !c.cfg.output.csv) return;
    if (is_svg && !c.cfg.output.svg) return;
    write_file(c.dir / rel, text);
}

Outcome analyze_martingale(Context& c, const AnalysisSpec& a, const PathEnsemble& ens)
{
    Report r;
    std::string csv = "t,coordinate,mean,se,z_score,verdict\n";
    bool pass = true;
    std::vector<double> ts, m, lo, hi;
    for (double t : a.times) {
        const auto rep = martingale_test(ens, t);
        pass = pass && rep.pass;
        r.section("t=" + format_double(t));
        r.kv("n_paths", rep.n_paths);
        for (std::size_t i = 0; i < rep.coordinates.size(); ++i) {
            const auto& e = rep.coordinates[i];
            const std::string k = "x" + std::to_string(i + 1);
            r.kv(k + ".mean", e.mean);
            r.kv(k + ".se", e.se);
            r.kv(k + ".z_score", e.z_score());
            csv += format_double(t) + "," + std::to_string(i + 1) + "," + format_double(e.mean) + "," +
                   format_double(e.se) + "," + format_double(e.z_score()) + "," +
                   (std::fabs(e.z_score()) <= 3 ? "pass" : "fail") + "\n";
        }
        r.kv("verdict", rep.pass);
        ts.push_back(t);
        m.push_back(rep.coordinates[0].mean);
        lo.push_back(rep.coordinates[0].mean - 3 * rep.coordinates[0].se);
        hi.push_back(rep.coordinates[0].mean + 3 * rep.coordinates[0].se);
    }
    Report head;
    head.kv("analysis", std::string("martingale"));
    head.kv("verdict", pass);
    put(c, "reports/martingale.txt", head.str() + r.str(), false, false);
    put(c, "reports/martingale.csv", csv, true, false);
    SvgPlot plot("Martingale test: mean of X_t - x0 (first coordinate) with 3 SE", "t", "mean");
    plot.bars(ts, m, lo, hi, kColors[0]);
    plot.hline(0.0, "black", "0", false);
    put(c, "plots/martingale.svg", plot.render(), false, true);
    return {"martingale", pass};
}

Outcome analyze_moment(Context& c, const AnalysisSpec& a, const PathEnsemble& ens)
{
    Report r;
    std::string csv = "t,coordinate,lhs,rhs,rhs_full,difference_mean,difference_se,relative_difference\n";
    bool pass = true;
    std::vector<double> ts, lhs, rhs, lo, hi;
    for (double t : a.times) {
        const auto rep = second_moment_identity(ens, c.cfg.kernel, t, c.opts.jobs);
        pass = pass && rep.pass;
        r.section("t=" + format_double(t));
        r.kv("mean_dropped_variance_fraction", rep.mean_dropped_variance_fraction);
        for (std::size_t i = 0; i < rep.lhs.size(); ++i) {
            const std::string k = "x" + std::to_string(i + 1);
            r.kv(k + ".lhs", rep.lhs[i]);
            r.kv(k + ".rhs", rep.rhs[i]);
            r.kv(k + ".rhs_full", rep.rhs_full[i]);
            r.kv(k + ".difference_mean", rep.difference[i].mean);
            r.kv(k + ".difference_se", rep.difference[i].se);
            r.kv(k + ".relative_difference", rep.relative_difference[i]);
            csv += format_double(t) + "," + std::to_string(i + 1) + "," + format_double(rep.lhs[i]) + "," +
                   format_double(rep.rhs[i]) + "," + format_double(rep.rhs_full[i]) + "," +
                   format_double(rep.difference[i].mean) + "," + format_double(rep.difference[i].se) + "," +
                   format_double(rep.relative_difference[i]) + "\n";
        }
        r.kv("verdict", rep.pass);
        ts.push_back(t);
        lhs.push_back(rep.lhs[0]);
        rhs.push_back(rep.rhs[0]);
        lo.push_back(rep.lhs[0] - 3 * rep.difference[0].se);
        hi.push_back(rep.lhs[0] + 3 * rep.difference[0].se);
    }
    Report head;
    head.kv("analysis", std::string("moment_identity"));
    head.kv("verdict", pass);
    put(c, "reports/moment_identity.txt", head.str() + r.str(), false, false);
    put(c, "reports/moment_identity.csv", csv, true, false);
    SvgPlot plot("Second moment identity (first coordinate)", "t", "E (X_t - x0)^2");
    plot.bars(ts, lhs, lo, hi, kColors[0]);
    plot.line(ts, rhs, kColors[1], 1.5);
    plot.scatter(ts, rhs, kColors[1], 3.0);
    put(c, "plots/moment_identity.svg", plot.render(), false, true);
    return {"moment_identity", pass};
}

Outcome analyze_qv(Context& c, const AnalysisSpec& a, const PathEnsemble& ens)
{
    Report r;
    std::string csv = "t,i,j,realized_mean,predictable_mean,difference_mean,difference_se\n";
    bool pass = true;
    QVReport last;
    for (double t : a.times) {
        last = qv_comparison(ens, c.cfg.kernel, t, c.opts.jobs);
        pass = pass && last.pass;
        r.section("t=" + format_double(t));
        for (int i = 0; i < last.d; ++i)
            for (int j = 0; j < last.d; ++j) {
                const std::size_t k = static_cast<std::size_t>(i * last.d + j);
                const std::string key = "qv" + std::to_string(i + 1) + std::to_string(j + 1);
                r.kv(key + ".realized_mean", last.realized_mean[k]);
                r.kv(key + ".predictable_mean", last.predictable_mean[k]);
                r.kv(key + ".difference_mean", last.difference[k].mean);
                r.kv(key + ".difference_se", last.difference[k].se);
                csv += format_double(t) + "," + std::to_string(i + 1) + "," + std::to_string(j + 1) + "," +
                       format_double(last.realized_mean[k]) + "," + format_double(last.predictable_mean[k]) + "," +
                       format_double(last.difference[k].mean) + "," + format_double(last.difference[k].se) + "\n";
            }
        r.kv("verdict", last.pass);
    }
    Report head;
    head.kv("analysis", std::string("qv"));
    head.kv("verdict", pass);
    put(c, "reports/qv.txt", head.str() + r.str(), false, false);
    put(c, "reports/qv.csv", csv, true, false);
    std::string per = "path,realized_11,predictable_11\n";
    for (std::size_t p = 0; p < last.realized_00.size(); ++p)
        per += std::to_string(p) + "," + format_double(last.realized_00[p]) + "," +
               format_double(last.predictable_00[p]) + "\n";
    put(c, "reports/qv_paths.csv", per, true, false);
    SvgPlot plot("Realized vs predictable quadratic variation at t=" + format_double(a.times.back()),
                 "predictable <X>_t (1,1)", "realized [X]_t (1,1)");
    const std::size_t shown = std::min<std::size_t>(last.realized_00.size(), 2000);
    std::vector<double> px(last.predictable_00.begin(), last.predictable_00.begin() + static_cast<std::ptrdiff_t>(shown));
    std::vector<double> py(last.realized_00.begin(), last.realized_00.begin() + static_cast<std::ptrdiff_t>(shown));
    double top = 0.0;
    for (std::size_t i = 0; i < shown; ++i) top = std::max({top, px[i], py[i]});
    plot.scatter(px, py, kColors[0], 2.0);
    plot.line({0.0, top}, {0.0, top}, "black", 1.0);
    put(c, "plots/qv.svg", plot.render(), false, true);
    return {"qv", pass};
}

Outcome analyze_generator(Context& c, const AnalysisSpec& a, const PathEnsemble& ens)
{
    Report r;
    std::string csv = "function,t,mean,se,z_score,verdict\n";
    bool pass = true;
    SvgPlot plot("Generator martingale M_t^u: mean with 3 SE", "t", "mean");
    std::size_t color = 0;
    for (const auto& name : a.functions) {
        const auto u = TestFunction::by_name(name);
        std::vector<double> ts, m, lo, hi;
        for (double t : a.times) {
            const auto rep = generator_martingale_test(ens, c.cfg.kernel, u, t, c.opts.jobs);
            pass = pass && rep.pass;
            r.section(name + " t=" + format_double(t));
            r.kv("mean", rep.martingale.mean);
            r.kv("se", rep.martingale.se);
            r.kv("z_score", rep.martingale.z_score());
            r.kv("verdict", rep.pass);
            csv += name + "," + format_double(t) + "," + format_double(rep.martingale.mean) + "," +
                   format_double(rep.martingale.se) + "," + format_double(rep.martingale.z_score()) + "," +
                   (rep.pass ? "pass" : "fail") + "\n";
            ts.push_back(t);
            m.push_back(rep.martingale.mean);
            lo.push_back(rep.martingale.mean - 3 * rep.martingale.se);
            hi.push_back(rep.martingale.mean + 3 * rep.martingale.se);
        }
        plot.bars(ts, m, lo, hi, kColors[color++ % 6]);
    }
    plot.hline(0.0, "black", "0", false);
    Report head;
    head.kv("analysis", std::string("generator"));
    head.kv("verdict", pass);
    put(c, "reports/generator.txt", head.str() + r.str(), false, false);
    put(c, "reports/generator.csv", csv, true, false);
    put(c, "plots/generator.svg", plot.render(), false, true);
    return {"generator", pass};
}

LILBand read_band(const Context& c, const AnalysisSpec& a)
{
    LILBand band{a.kappa_lo, a.kappa_hi};
    if (a.band_file.empty()) return band;
    const fs::path p = fs::path(c.cfg.base_dir) / a.band_file;
    const auto text = read_file(p);
    if (!text) throw ConfigError(a.line, "cannot read band file '" + p.string() + "'");
    std::istringstream in(*text);
    std::string line;
    std::size_t n = 0;
    bool lo = false, hi = false;
    while (std::getline(in, line)) {
        ++n;
        if (line.empty() || line[0] == '#') continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) continue;
        std::string k = line.substr(0, eq), v = line.substr(eq + 1);
        k.erase(k.find_last_not_of(" \t") + 1);
        v.erase(0, v.find_first_not_of(" \t"));
        if (k == "kappa_lo") band.kappa_lo = parse_num(v, n), lo = true;
        if (k == "kappa_hi") band.kappa_hi = parse_num(v, n), hi = true;
    }
    if (!lo || !hi) throw ConfigError(a.line, "band file needs kappa_lo and kappa_hi");
    return band;
}

Outcome analyze_lil(Context& c, const AnalysisSpec& a)
{
    SimConfig sc = c.cfg.sim;
    sc.t_end = a.t_end;
    if (a.seed) sc.base_seed = *a.seed;
    LILOptions o;
    o.direction = a.direction;
    o.checkpoints = dyadic_checkpoints(a.t_end);
    o.band = read_band(c, a);
    o.required_coverage = a.required_coverage;
    const double trunc = sc.small_jump_mode == SmallJumpMode::drop ? sc.epsilon : 0.0;
    const auto k = lil_constants(c.cfg.kernel, c.cfg.grid, trunc);
    o.lambda_hat = k.lambda_hat;
    o.Lambda_hat = k.Lambda_hat;
    o.tail_moment_floor = k.tail_moment_floor;
    o.keep_trajectories = true;
    LILReport rep;
    try {
        const Simulator sim(c.cfg.kernel, sc, c.cfg.grid, c.cfg.x0);
        rep = timed(c, "lil", [&] { return lil_statistics_streaming(sim, a.n_paths, o, c.opts.jobs); });
    } catch (const EnvelopeViolation& e) {
        log_of(c.opts) << "error: lil: " << e.what() << "\n";
        return {"lil", false};
    } catch (const JumpCapExceeded& e) {
        log_of(c.opts) << "error: lil: " << e.what() << "\n";
        return {"lil", false};
    }
    Report r;
    r.kv("analysis", std::string("lil"));
    r.kv("verdict", rep.pass);
    r.kv("n_paths", rep.n_paths);
    r.kv("t_end", a.t_end);
    r.kv("seed", std::to_string(sc.base_seed));
    r.kv("epsilon", sc.epsilon);
    r.kv("direction", vec_text(a.direction));
    r.kv("checkpoints", rep.checkpoints.size());
    r.kv("lambda_hat", rep.lambda_hat);
    r.kv("Lambda_hat", rep.Lambda_hat);
    r.kv("kappa_lo", o.band.kappa_lo);
    r.kv("kappa_hi", o.band.kappa_hi);
    r.kv("band_lo", rep.band_lo);
    r.kv("band_hi", rep.band_hi);
    r.kv("required_coverage", o.required_coverage);
    r.kv("coverage", rep.coverage);
    r.kv("degenerate_paths", rep.degenerate_paths);
    r.kv("max_abs_w_median", rep.max_abs_w_median);
    r.kv("max_r_median", rep.max_r_median);
    r.kv("max_r_q05", rep.max_r_q05);
    r.kv("max_r_q95", rep.max_r_q95);
    r.kv("radial_window_lo", 0.5 * std::sqrt(rep.lambda_hat));
    r.kv("radial_window_hi", 1.5 * std::sqrt(rep.Lambda_hat));
    r.kv("tail_moment_floor", rep.tail_moment_floor);
    r.kv("tail_moment_floor_sqrt", rep.tail_moment_floor_sqrt);
    put(c, "reports/lil.txt", r.str(), false, false);

    std::string per = "path,max_abs_w,max_r\n";
    for (std::size_t p = 0; p < rep.n_paths; ++p)
        per += std::to_string(p) + "," + format_double(rep.max_abs_w[p]) + "," + format_double(rep.max_r[p]) + "\n";
    put(c, "reports/lil_paths.csv", per, true, false);
    const std::size_t m = rep.checkpoints.size();
    std::string traj = "path,checkpoint,t,w,r\n";
    for (std::size_t p = 0; p < rep.n_paths; ++p)
        for (std::size_t k2 = 0; k2 < m; ++k2)
            traj += std::to_string(p) + "," + std::to_string(k2) + "," + format_double(rep.checkpoints[k2]) + "," +
                    format_double(rep.w[p * m + k2]) + "," + format_double(rep.r[p * m + k2]) + "\n";
    put(c, "reports/lil_checkpoints.csv", traj, true, false);

    SvgPlot pw("LIL: running max of |W_t|", "t", "max |W_s|, s <= t", true);
    SvgPlot pr("LIL: running max of R_t", "t", "max R_s, s <= t", true);
    for (std::size_t p = 0; p < std::min(a.plot_paths, rep.n_paths); ++p) {
        std::vector<double> mw(m), mr(m);
        double run_w = 0.0, run_r = 0.0;
        for (std::size_t k2 = 0; k2 < m; ++k2) {
            const double w = rep.w[p * m + k2];
            if (std::isfinite(w)) run_w = std::max(run_w, std::fabs(w));
            run_r = std::max(run_r, rep.r[p * m + k2]);
            mw[k2] = run_w;
            mr[k2] = run_r;
        }
        pw.line(rep.checkpoints, mw, kColors[0], 1.0, 0.4);
        pr.line(rep.checkpoints, mr, kColors[0], 1.0, 0.4);
    }
    pw.hline(rep.band_lo, kColors[1], "band lo");
    pw.hline(rep.band_hi, kColors[1], "band hi");
    pw.hline(std::sqrt(rep.lambda_hat), kColors[2], "sqrt(lambda)");
    pw.hline(std::sqrt(rep.Lambda_hat), kColors[2], "sqrt(Lambda)");
    pr.hline(std::sqrt(rep.lambda_hat), kColors[2], "sqrt(lambda)");
    pr.hline(std::sqrt(rep.Lambda_hat), kColors[2], "sqrt(Lambda)");
    put(c, "plots/lil_w.svg", pw.render(), false, true);
    put(c, "plots/lil_r.svg", pr.render(), false, true);
    return {"lil", rep.pass};
}

}  // namespace

std::string run_directory(const ExperimentConfig& config, const RunOptions& options)
{
    std::string root = options.out_root;
    if (root.empty()) root = config.output.dir;
    if (root.empty()) {
        const char* env = std::getenv("JUMPLAB_OUT");
        root = env && *env ? env : "out";
    }
    std::string key = config.source;
    if (options.seed_override) key += "\n#seed-override=" + std::to_string(*options.seed_override);
    return (fs::path(root) / hex16(fnv1a64(key))).string();
}

EnsembleFiles ensemble_to_csv(const PathEnsemble& ens, const Vec& x0)
{
    const int d = x0.dim();
    EnsembleFiles f;
    const std::string head = header_lines(ens.config, x0, ens.paths.size());
    f.paths = head + "path,seed,n_jumps,dropped_variance_fraction,approximate";
    f.jumps = head + "path,jump_time";
    for (int i = 0; i < d; ++i) {
        f.paths += ",x" + std::to_string(i + 1) + "_final";
        f.jumps += ",z" + std::to_string(i + 1);
    }
    f.paths += "\n";
    f.jumps += "\n";
    for (std::size_t p = 0; p < ens.paths.size(); ++p) {
        const Path& path = ens.paths[p];
        const Vec fin = path.final_state();
        f.paths += std::to_string(p) + "," + std::to_string(path.seed) + "," + std::to_string(path.jump_times.size()) +
                   "," + format_double(path.truncation.dropped_variance_fraction) + "," +
                   (path.approximate ? "1" : "0");
        for (int i = 0; i < d; ++i) f.paths += "," + format_double(fin[i]);
        f.paths += "\n";
        const std::string id = std::to_string(p);
        for (std::size_t k = 0; k < path.jump_times.size(); ++k) {
            f.jumps += id + "," + format_double(path.jump_times[k]);
            for (int i = 0; i < d; ++i) f.jumps += "," + format_double(path.jump_vectors[k][i]);
            f.jumps += "\n";
        }
    }
    return f;
}

PathEnsemble ensemble_from_csv(const EnsembleFiles& files)
{
    PathEnsemble ens;
    int d = 0;
    Vec x0;
    std::vector<std::size_t> expected;
    const auto meta = scan_csv(files.paths, [&](const std::vector<std::string_view>& cols, std::size_t line) {
        if (cols.size() < 5) throw ConfigError(line, "short row in ensemble_paths.csv");
        Path p;
        p.seed = parse_u64(cols[1], line);
        expected.push_back(parse_u64(cols[2], line));
        p.truncation.dropped_variance_fraction = parse_num(cols[3], line);
        p.approximate = cols[4] == "1";
        if (parse_u64(cols[0], line) != ens.paths.size()) throw ConfigError(line, "paths out of order");
        ens.paths.push_back(std::move(p));
    });
    auto need = [&](const char* k) -> const std::string& {
        const auto it = meta.find(k);
        if (it == meta.end()) throw ConfigError(0, std::string("ensemble header lacks ") + k);
        return it->second;
    };
    d = static_cast<int>(parse_u64(need("d"), 0));
    if (d < 1 || d > kMaxDim) throw ConfigError(0, "bad dimension in ensemble header");
    std::vector<double> xs;
    for (auto s : split(need("x0"), ';')) xs.push_back(parse_num(s, 0));
    if (static_cast<int>(xs.size()) != d) throw ConfigError(0, "x0 dimension mismatch in ensemble header");
    x0 = Vec::from_span(xs);
    ens.config.t_end = parse_num(need("t_end"), 0);
    ens.config.epsilon = parse_num(need("epsilon"), 0);
    const auto& mode = need("mode");
    ens.config.small_jump_mode = mode == "drop" ? SmallJumpMode::drop : SmallJumpMode::gaussian_substitute;
    ens.config.base_seed = parse_u64(need("base_seed"), 0);
    ens.config.dominating_rate_margin = parse_num(need("margin"), 0);
    ens.config.max_jumps = parse_u64(need("max_jumps"), 0);
    for (auto& p : ens.paths) {
        p.x0 = x0;
        p.t_end = ens.config.t_end;
        ens.seeds.push_back(p.seed);
    }
    scan_csv(files.jumps, [&](const std::vector<std::string_view>& cols, std::size_t line) {
        if (static_cast<int>(cols.size()) != d + 2) throw ConfigError(line, "bad column count in ensemble_jumps.csv");
        const auto idx = parse_u64(cols[0], line);
        if (idx >= ens.paths.size()) throw ConfigError(line, "jump for unknown path");
        Vec z(d);
        for (int i = 0; i < d; ++i) z[i] = parse_num(cols[2 + i], line);
        ens.paths[idx].jump_times.push_back(parse_num(cols[1], line));
        ens.paths[idx].jump_vectors.push_back(z);
    });
    for (std::size_t p = 0; p < ens.paths.size(); ++p)
        if (ens.paths[p].jump_times.size() != expected[p]) throw ConfigError(0, "jump count mismatch for path " + std::to_string(p));
    return ens;
}

int cmd_validate(const std::string& config_path, const RunOptions& options)
{
    Context c = open_run(config_path, options);
    const auto rep = run_validation(c);
    write_manifest(c);
    log_of(options) << "validate: " << (rep.any_fail() ? "fail" : "pass") << " (" << c.dir.string()
                    << "/reports/validation.txt)\n";
    return rep.any_fail() ? kExitFail : kExitOk;
}

int cmd_simulate(const std::string& config_path, const RunOptions& options)
{
    Context c = open_run(config_path, options);
    if (!gate(c) || !resolve_epsilon(c)) {
        write_manifest(c);
        return kExitFail;
    }
    PathEnsemble ens;
    if (!simulate_into(c, ens)) {
        write_manifest(c);
        return kExitFail;
    }
    timed(c, "write_paths", [&] { write_ensemble(c, ens); });
    write_manifest(c);
    log_of(options) << "simulate: " << ens.paths.size() << " paths (" << c.dir.string() << "/paths)\n";
    return kExitOk;
}

int cmd_analyze(const std::string& config_path, const RunOptions& options)
{
    Context c = open_run(config_path, options);
    if (c.cfg.analyses.empty()) throw ConfigError(0, "no [analysis ...] sections in the config");
    if (!gate(c) || !resolve_epsilon(c)) {
        write_manifest(c);
        return kExitFail;
    }
    bool need_ensemble = false;
    for (const auto& a : c.cfg.analyses) need_ensemble = need_ensemble || a.kind != "lil";
    PathEnsemble ens;
    if (need_ensemble) {
        if (c.cfg.inline_simulation) {
            if (!simulate_into(c, ens)) {
                write_manifest(c);
                return kExitFail;
            }
        } else {
            const auto paths = read_file(c.dir / "paths" / "ensemble_paths.csv");
            const auto jumps = read_file(c.dir / "paths" / "ensemble_jumps.csv");
            if (!paths || !jumps) {
                log_of(options) << "error: no ensemble under " << c.dir.string()
                                << "/paths; run simulate first or set inline = true in [sim]\n";
                return kExitUsage;
            }
            ens = ensemble_from_csv({*paths, *jumps});
            ens.kernel_id = c.cfg.kernel_id;
        }
    }
    std::vector<Outcome> outcomes;
    for (const auto& a : c.cfg.analyses) {
        Outcome o;
        if (a.kind == "martingale") o = timed(c, "martingale", [&] { return analyze_martingale(c, a, ens); });
        else if (a.kind == "moment_identity") o = timed(c, "moment_identity", [&] { return analyze_moment(c, a, ens); });
        else if (a.kind == "qv") o = timed(c, "qv", [&] { return analyze_qv(c, a, ens); });
        else if (a.kind == "generator") o = timed(c, "generator", [&] { return analyze_generator(c, a, ens); });
        else o = analyze_lil(c, a);
        outcomes.push_back(o);
        log_of(options) << "analyze: " << o.kind << " " << (o.pass ? "pass" : "fail") << "\n";
    }
    Report s;
    bool all = true;
    for (const auto& o : outcomes) {
        s.kv(o.kind, o.pass);
        all = all && o.pass;
    }
    s.kv("verdict", all);
    write_file(c.dir / "reports" / "analysis.txt", s.str());
    write_manifest(c);
    return all ? kExitOk : kExitFail;
}

}  // namespace jumplab

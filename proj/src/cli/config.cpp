// Copyright 2026 The jumplab Authors.
// SPDX-License-Identifier: Apache-2.0

#include "jumplab/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include "jumplab/error.hpp"
#include "jumplab/test_functions.hpp"

namespace jumplab {

namespace {

struct Entry {
    std::string value;
    std::size_t line = 0;
    std::size_t column = 0;  // 1-based column of the value
    bool used = false;
};

struct Section {
    std::string name;
    std::string arg;
    std::size_t line = 0;
    std::vector<std::pair<std::string, Entry>> entries;

    Entry* get(const std::string& key)
    {
        Entry* found = nullptr;
        for (auto& [k, e] : entries)
            if (k == key) {
                e.used = true;
                found = &e;
            }
        return found;
    }
    std::vector<Entry*> all(const std::string& key)
    {
        std::vector<Entry*> out;
        for (auto& [k, e] : entries)
            if (k == key) {
                e.used = true;
                out.push_back(&e);
            }
        return out;
    }
    const Entry& need(const std::string& key)
    {
        if (Entry* e = get(key)) return *e;
        throw ConfigError(line, "section [" + title() + "] is missing key '" + key + "'");
    }
    std::string title() const { return arg.empty() ? name : name + " " + arg; }
    void reject_unused() const
    {
        for (const auto& [k, e] : entries)
            if (!e.used) throw ConfigError(e.line, "unknown key '" + k + "' in [" + title() + "]");
    }
};

std::string trim(std::string_view s)
{
    std::size_t a = 0, b = s.size();
    while (a < b && (s[a] == ' ' || s[a] == '\t' || s[a] == '\r')) ++a;
    while (b > a && (s[b - 1] == ' ' || s[b - 1] == '\t' || s[b - 1] == '\r')) --b;
    return std::string(s.substr(a, b - a));
}

// Comment start outside double quotes, or npos.
std::size_t comment_pos(std::string_view s)
{
    bool quoted = false;
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (s[i] == '"') quoted = !quoted;
        if (!quoted && (s[i] == '#' || s[i] == ';')) return i;
    }
    return std::string_view::npos;
}

std::vector<Section> split_sections(std::string_view text)
{
    std::vector<Section> out;
    std::size_t line_no = 0, pos = 0;
    while (pos <= text.size()) {
        std::size_t end = text.find('\n', pos);
        if (end == std::string_view::npos) end = text.size();
        std::string_view raw = text.substr(pos, end - pos);
        ++line_no;
        pos = end + 1;
        const std::size_t c = comment_pos(raw);
        if (c != std::string_view::npos) raw = raw.substr(0, c);
        const std::string line = trim(raw);
        if (line.empty()) {
            if (end == text.size()) break;
            continue;
        }
        if (line.front() == '[') {
            if (line.back() != ']') throw ConfigError(line_no, "unterminated section header");
            const std::string inner = trim(std::string_view(line).substr(1, line.size() - 2));
            Section s;
            s.line = line_no;
            const auto sp = inner.find_first_of(" \t");
            s.name = inner.substr(0, sp);
            if (sp != std::string::npos) s.arg = trim(std::string_view(inner).substr(sp));
            if (s.name.empty()) throw ConfigError(line_no, "empty section name");
            out.push_back(std::move(s));
        } else {
            const auto eq = line.find('=');
            if (eq == std::string::npos) throw ConfigError(line_no, "expected 'key = value'");
            if (out.empty()) throw ConfigError(line_no, "key outside of any section");
            Entry e;
            e.line = line_no;
            const std::string key = trim(std::string_view(line).substr(0, eq));
            e.value = trim(std::string_view(line).substr(eq + 1));
            // column of the value in the raw line
            const std::size_t raw_eq = raw.find('=');
            std::size_t col = raw_eq + 1;
            while (col < raw.size() && (raw[col] == ' ' || raw[col] == '\t')) ++col;
            e.column = col + 1;
            if (key.empty()) throw ConfigError(line_no, "empty key");
            if (e.value.empty()) throw ConfigError(line_no, "empty value for '" + key + "'");
            out.back().entries.emplace_back(key, std::move(e));
        }
        if (end == text.size()) break;
    }
    return out;
}

double to_double(const Entry& e, std::string_view s)
{
    double v = 0.0;
    const std::string t = trim(s);
    const auto r = std::from_chars(t.data(), t.data() + t.size(), v);
    if (r.ec != std::errc() || r.ptr != t.data() + t.size() || !std::isfinite(v)) {
        throw ConfigError(e.line, "expected a number, got '" + t + "'");
    }
    return v;
}

double number(const Entry& e) { return to_double(e, e.value); }

std::vector<double> numbers(const Entry& e)
{
    std::vector<double> out;
    std::string_view s = e.value;
    while (true) {
        const auto comma = s.find(',');
        out.push_back(to_double(e, s.substr(0, comma)));
        if (comma == std::string_view::npos) break;
        s = s.substr(comma + 1);
    }
    return out;
}

std::vector<std::string> words(const Entry& e)
{
    std::vector<std::string> out;
    std::string_view s = e.value;
    while (true) {
        const auto comma = s.find(',');
        std::string w = trim(s.substr(0, comma));
        if (w.empty()) throw ConfigError(e.line, "empty list element");
        out.push_back(std::move(w));
        if (comma == std::string_view::npos) break;
        s = s.substr(comma + 1);
    }
    return out;
}

std::size_t count(const Entry& e, bool allow_zero = false)
{
    const double v = number(e);
    if (v < 0 || v != std::floor(v) || v > 1e15) throw ConfigError(e.line, "expected a non-negative integer");
    if (!allow_zero && v == 0) throw ConfigError(e.line, "must be positive");
    return static_cast<std::size_t>(v);
}

std::uint64_t seed_value(const Entry& e)
{
    std::uint64_t v = 0;
    const auto r = std::from_chars(e.value.data(), e.value.data() + e.value.size(), v);
    if (r.ec != std::errc() || r.ptr != e.value.data() + e.value.size()) {
        throw ConfigError(e.line, "expected an unsigned 64-bit seed");
    }
    return v;
}

bool boolean(const Entry& e)
{
    if (e.value == "true" || e.value == "yes" || e.value == "1") return true;
    if (e.value == "false" || e.value == "no" || e.value == "0") return false;
    throw ConfigError(e.line, "expected true or false");
}

std::string unquote(const Entry& e)
{
    if (e.value.size() < 2 || e.value.front() != '"' || e.value.back() != '"') {
        throw ConfigError(e.line, "expected a quoted string");
    }
    return e.value.substr(1, e.value.size() - 2);
}

expr::Expr expression(const Entry& e, expr::Domain domain, int d)
{
    const std::string src = unquote(e);
    expr::Expr out;
    try {
        out = expr::parse(src, domain);
    } catch (const SyntaxError& err) {
        throw ConfigError(e.line, "column " + std::to_string(e.column + 1 + err.offset()) + ": " + err.what());
    } catch (const UnknownIdentifier& err) {
        throw ConfigError(e.line, "column " + std::to_string(e.column + 1 + err.offset()) + ": " + err.what());
    }
    if (out.max_coordinate() >= d) {
        throw ConfigError(e.line, "expression uses x[" + std::to_string(out.max_coordinate()) + "] but the dimension is " +
                                      std::to_string(d));
    }
    return out;
}

CoefficientFn coefficient(Section& s, const std::string& key, int d, expr::Domain domain = expr::Domain::state)
{
    const Entry& e = s.need(key);
    CoefficientFn f;
    try {
        if (e.value.front() == '"') {
            f = CoefficientFn::from_expr(expression(e, domain, d));
        } else if (e.value.front() == '@') {
            const auto open = e.value.find('(');
            if (open == std::string::npos || e.value.back() != ')') {
                throw ConfigError(e.line, "expected @family(parameters)");
            }
            const std::string name = e.value.substr(1, open - 1);
            Entry inner = e;
            inner.value = e.value.substr(open + 1, e.value.size() - open - 2);
            const auto params = trim(inner.value).empty() ? std::vector<double>{} : numbers(inner);
            f = CoefficientFn::family(name, params, domain);
        } else {
            f = CoefficientFn::constant(number(e), domain);
        }
    } catch (const DomainError& err) {
        throw ConfigError(e.line, err.what());
    }
    if (Entry* b = s.get(key + ".bounds")) {
        const auto v = numbers(*b);
        if (v.size() != 2 || v[0] > v[1]) throw ConfigError(b->line, "bounds take 'lo, hi' with lo <= hi");
        f = f.with_bounds(Bounds{v[0], v[1]});
    }
    if (Entry* l = s.get(key + ".lipschitz")) {
        const double v = number(*l);
        if (v < 0) throw ConfigError(l->line, "Lipschitz constant must be non-negative");
        f = f.with_lipschitz(v);
    }
    return f;
}

RadialComponent radial_component(Section& s, const std::string& type, int d)
{
    if (type == "stable_like") {
        StableLikeSmall c{coefficient(s, "c", d), coefficient(s, "alpha", d), false};
        if (Entry* b = s.get("bass_normalized")) c.bass_normalized = boolean(*b);
        return c;
    }
    if (type == "power_law") return BigJumpPowerLaw{coefficient(s, "c0", d), coefficient(s, "beta1", d)};
    if (type == "stretched_exp") {
        const Entry& l = s.need("lambda");
        const double lambda = number(l);
        if (!(lambda > 0)) throw ConfigError(l.line, "lambda must be positive");
        return BigJumpStretchedExp{coefficient(s, "c0", d), lambda, coefficient(s, "beta2", d)};
    }
    if (type == "hunt") return HuntDifference{coefficient(s, "c", d), coefficient(s, "alpha_r", d, expr::Domain::radial)};
    throw ConfigError(s.line, "unknown component type '" + type + "'");
}

KernelComponent component(Section& s, int d)
{
    const std::string& type = s.arg;
    if (type == "atoms") {
        CompoundPoissonAtoms a;
        for (Entry* e : s.all("atom")) {
            const auto v = numbers(*e);
            if (static_cast<int>(v.size()) != d + 1) {
                throw ConfigError(e->line, "atom takes 'weight, z1..z" + std::to_string(d) + "'");
            }
            if (v[0] < 0) throw ConfigError(e->line, "atom weight must be non-negative");
            Vec z(d);
            for (int i = 0; i < d; ++i) z[i] = v[1 + i];
            if (z.norm() == 0.0) throw ConfigError(e->line, "atoms must avoid the origin");
            a.atoms.push_back(Atom{v[0], z});
        }
        if (a.atoms.empty()) throw ConfigError(s.line, "[" + s.title() + "] needs at least one 'atom'");
        return a;
    }
    if (type == "cone") {
        const Entry& b = s.need("base");
        Cone cone{expression(s.need("predicate"), expr::Domain::state, d), false, false};
        if (Entry* e = s.get("symmetric")) cone.symmetric = boolean(*e);
        if (Entry* e = s.get("permutation_symmetric")) cone.permutation_symmetric = boolean(*e);
        if (b.value == "atoms" || b.value == "cone") throw ConfigError(b.line, "cone base must be a radial family");
        return ConeRestriction{radial_component(s, b.value, d), cone};
    }
    return std::visit([](auto&& v) -> KernelComponent { return v; }, radial_component(s, type, d));
}

Vec vector_of(const Entry& e, int d)
{
    const auto v = numbers(e);
    if (static_cast<int>(v.size()) != d) {
        throw ConfigError(e.line, "expected " + std::to_string(d) + " components, got " + std::to_string(v.size()));
    }
    return Vec::from_span(v);
}

const char* const kAnalyses[] = {"martingale", "moment_identity", "qv", "generator", "lil"};

}  // namespace

std::uint64_t fnv1a64(std::string_view bytes) noexcept
{
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

ExperimentConfig parse_config(std::string_view text, std::string base_dir)
{
    auto sections = split_sections(text);
    ExperimentConfig cfg;
    cfg.source = std::string(text);
    cfg.base_dir = std::move(base_dir);

    Section* kernel = nullptr;
    for (auto& s : sections)
        if (s.name == "kernel") {
            if (kernel) throw ConfigError(s.line, "duplicate [kernel] section");
            kernel = &s;
        }
    if (!kernel) throw ConfigError(0, "missing [kernel] section");
    {
        const Entry& e = kernel->need("dimension");
        const double d = number(e);
        if (d != 1 && d != 2 && d != 3) throw ConfigError(e.line, "dimension must be 1, 2 or 3");
        cfg.d = static_cast<int>(d);
        if (Entry* id = kernel->get("id")) cfg.kernel_id = id->value;
        kernel->reject_unused();
    }
    const int d = cfg.d;

    std::vector<KernelComponent> comps, lower, upper;
    bool have_sim = false, have_grid = false, have_output = false, have_validate = false;
    for (auto& s : sections) {
        if (s.name == "kernel") continue;
        if (s.name == "component" || s.name == "lower" || s.name == "upper") {
            if (s.arg.empty()) throw ConfigError(s.line, "[" + s.name + "] needs a type, e.g. [" + s.name + " power_law]");
            auto c = component(s, d);
            (s.name == "component" ? comps : s.name == "lower" ? lower : upper).push_back(std::move(c));
        } else if (s.name == "grid") {
            if (have_grid) throw ConfigError(s.line, "duplicate [grid] section");
            have_grid = true;
            if (Entry* e = s.get("lo")) cfg.grid_spec.lo = number(*e);
            else if (d > 1) cfg.grid_spec.lo = -5.0;
            if (Entry* e = s.get("hi")) cfg.grid_spec.hi = number(*e);
            else if (d > 1) cfg.grid_spec.hi = 5.0;
            if (Entry* e = s.get("n")) cfg.grid_spec.n = static_cast<int>(count(*e));
            if (Entry* e = s.get("pair_radii")) cfg.grid_spec.pair_radii = numbers(*e);
        } else if (s.name == "validate") {
            if (have_validate) throw ConfigError(s.line, "duplicate [validate] section");
            have_validate = true;
            if (Entry* e = s.get("drift_tolerance")) cfg.validator.drift_tolerance = number(*e);
            if (Entry* e = s.get("eigenvalue_tolerance")) cfg.validator.eigenvalue_tolerance = number(*e);
            if (Entry* e = s.get("epsilons")) {
                cfg.validator.epsilons = numbers(*e);
                for (double v : cfg.validator.epsilons)
                    if (!(v > 0)) throw ConfigError(e->line, "epsilons must be positive");
            }
        } else if (s.name == "sim") {
            if (have_sim) throw ConfigError(s.line, "duplicate [sim] section");
            have_sim = true;
            cfg.x0 = s.get("x0") ? vector_of(*s.get("x0"), d) : Vec::zero(d);
            if (Entry* e = s.get("t_end")) cfg.sim.t_end = number(*e);
            if (Entry* e = s.get("epsilon")) {
                if (e->value == "auto") cfg.epsilon_auto = true;
                else cfg.sim.epsilon = number(*e);
            }
            if (Entry* e = s.get("epsilon_target")) cfg.epsilon_target = number(*e);
            if (Entry* e = s.get("margin")) cfg.sim.dominating_rate_margin = number(*e);
            cfg.sim.base_seed = seed_value(s.need("seed"));
            if (Entry* e = s.get("max_jumps")) cfg.sim.max_jumps = count(*e);
            if (Entry* e = s.get("mode")) {
                if (e->value == "drop") cfg.sim.small_jump_mode = SmallJumpMode::drop;
                else if (e->value == "gaussian_substitute") cfg.sim.small_jump_mode = SmallJumpMode::gaussian_substitute;
                else throw ConfigError(e->line, "mode is drop or gaussian_substitute");
            }
            cfg.n_paths = count(s.need("n_paths"), true);
            if (cfg.n_paths == 0) throw ConfigError(s.get("n_paths")->line, "n_paths must be positive");
            if (Entry* e = s.get("path_files")) cfg.path_files = count(*e, true);
            if (Entry* e = s.get("inline")) cfg.inline_simulation = boolean(*e);
            try {
                SimConfig probe = cfg.sim;
                probe.validate();
            } catch (const DomainError& err) {
                throw ConfigError(s.line, err.what());
            }
        } else if (s.name == "analysis") {
            bool known = false;
            for (const char* k : kAnalyses) known = known || s.arg == k;
            if (!known) throw ConfigError(s.line, "unknown analysis '" + s.arg + "'");
            AnalysisSpec a;
            a.kind = s.arg;
            a.line = s.line;
            if (Entry* e = s.get("times")) a.times = numbers(*e);
            if (Entry* e = s.get("t")) a.times = numbers(*e);
            for (double t : a.times)
                if (!(t > 0)) throw ConfigError(s.line, "analysis times must be positive");
            if (Entry* e = s.get("functions")) a.functions = words(*e);
            for (const auto& f : a.functions) {
                bool ok = false;
                for (const auto& n : TestFunction::names()) ok = ok || n == f;
                if (!ok) throw ConfigError(s.line, "unknown test function '" + f + "'");
            }
            if (a.kind == "lil") {
                a.direction = s.get("direction") ? vector_of(*s.get("direction"), d) : Vec::unit(d, 0);
                if (std::fabs(a.direction.norm() - 1.0) > 1e-12) {
                    throw ConfigError(s.get("direction")->line, "direction must be a unit vector");
                }
                a.t_end = number(s.need("t_end"));
                a.n_paths = count(s.need("n_paths"));
                if (Entry* e = s.get("band")) a.band_file = unquote(*e);
                if (Entry* e = s.get("kappa_lo")) a.kappa_lo = number(*e);
                if (Entry* e = s.get("kappa_hi")) a.kappa_hi = number(*e);
                if (a.band_file.empty() && !(a.kappa_hi > 0)) {
                    throw ConfigError(s.line, "lil needs 'band' or 'kappa_lo'/'kappa_hi'");
                }
                if (Entry* e = s.get("required_coverage")) a.required_coverage = number(*e);
                if (Entry* e = s.get("seed")) a.seed = seed_value(*e);
                if (Entry* e = s.get("plot_paths")) a.plot_paths = count(*e, true);
                if (a.t_end < std::exp(std::exp(1.0))) throw ConfigError(s.line, "lil t_end must be at least e^e");
            } else if (a.times.empty()) {
                a.times = {1.0};
            }
            if (a.kind == "generator" && a.functions.empty()) a.functions = {"constant", "sin1"};
            cfg.analyses.push_back(std::move(a));
        } else if (s.name == "output") {
            if (have_output) throw ConfigError(s.line, "duplicate [output] section");
            have_output = true;
            if (Entry* e = s.get("dir")) cfg.output.dir = e->value.front() == '"' ? unquote(*e) : e->value;
            if (Entry* e = s.get("formats")) {
                cfg.output.csv = cfg.output.svg = false;
                for (const auto& f : words(*e)) {
                    if (f == "csv") cfg.output.csv = true;
                    else if (f == "svg") cfg.output.svg = true;
                    else throw ConfigError(e->line, "unknown format '" + f + "'");
                }
            }
        } else {
            throw ConfigError(s.line, "unknown section [" + s.name + "]");
        }
        s.reject_unused();
    }
    if (!have_sim) throw ConfigError(0, "missing [sim] section (seeds must be explicit)");
    for (const auto& a : cfg.analyses) {
        if (a.kind == "lil") continue;
        for (double t : a.times)
            if (t > cfg.sim.t_end) throw ConfigError(a.line, "analysis time exceeds sim t_end");
    }

    try {
        cfg.kernel = KernelSpec(d, std::move(comps), cfg.kernel_id);
        if (!upper.empty()) {
            cfg.envelopes.emplace(KernelSpec(d, std::move(lower)), KernelSpec(d, std::move(upper)));
        } else if (!lower.empty()) {
            throw ConfigError(0, "a [lower ...] envelope needs an [upper ...] envelope");
        }
    } catch (const ConfigError&) {
        throw;
    } catch (const Error& err) {
        throw ConfigError(0, err.what());
    }

    const GridSpec& g = cfg.grid_spec;
    if (!(g.hi >= g.lo)) throw ConfigError(0, "grid hi must be >= lo");
    cfg.grid = g.n > 0 ? StateGrid::uniform(d, g.lo, g.hi, g.n)
                       : StateGrid::uniform(d, g.lo, g.hi, d == 1 ? 201 : 41);
    if (!g.pair_radii.empty()) cfg.grid.pair_radii = g.pair_radii;
    try {
        cfg.grid.validate();
    } catch (const Error& err) {
        throw ConfigError(0, err.what());
    }
    return cfg;
}

ExperimentConfig load_config(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError(0, "cannot read config file '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    const auto slash = path.find_last_of('/');
    return parse_config(ss.str(), slash == std::string::npos ? "." : path.substr(0, slash));
}

}  // namespace jumplab

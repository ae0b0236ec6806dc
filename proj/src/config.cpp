#include "cylwave/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <variant>

#include "cylwave/field_io.hpp"

namespace cylwave {

namespace {

using Value = std::variant<double, bool, std::string, std::vector<double>>;

struct Entry {
    Value value;
    int line = 0;
    bool used = false;
};

struct ParsedText {
    std::map<std::string, Entry> entries;
    std::vector<std::string> order;
};

std::string trim(std::string s) {
    const auto notspace = [](unsigned char c) { return !std::isspace(c); };
    s.erase(s.begin(), std::find_if(s.begin(), s.end(), notspace));
    s.erase(std::find_if(s.rbegin(), s.rend(), notspace).base(), s.end());
    return s;
}

[[noreturn]] void fail(int line, const std::string& msg) {
    throw ParseError("config line " + std::to_string(line) + ": " + msg);
}

double parse_number(const std::string& tok, int line) {
    const std::string t = trim(tok);
    double v = 0.0;
    const auto [p, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
    if (ec != std::errc() || p != t.data() + t.size()) fail(line, "cannot parse number '" + t + "'");
    return v;
}

Value parse_value(const std::string& raw, int line) {
    const std::string t = trim(raw);
    if (t.empty()) fail(line, "missing value");
    if (t == "true") return true;
    if (t == "false") return false;
    if (t.front() == '"') {
        if (t.size() < 2 || t.back() != '"') fail(line, "unterminated string");
        return t.substr(1, t.size() - 2);
    }
    if (t.front() == '[') {
        if (t.back() != ']') fail(line, "unterminated array");
        std::vector<double> arr;
        std::string body = t.substr(1, t.size() - 2);
        std::stringstream ss(body);
        std::string item;
        while (std::getline(ss, item, ',')) {
            if (trim(item).empty()) continue;
            arr.push_back(parse_number(item, line));
        }
        return arr;
    }
    return parse_number(t, line);
}

ParsedText tokenize(const std::string& text) {
    ParsedText out;
    std::string section;
    std::istringstream stream(text);
    std::string line;
    int lineno = 0;
    while (std::getline(stream, line)) {
        ++lineno;
        // strip comments outside quotes
        bool in_quote = false;
        for (std::size_t i = 0; i < line.size(); ++i) {
            if (line[i] == '"') in_quote = !in_quote;
            if (line[i] == '#' && !in_quote) {
                line.resize(i);
                break;
            }
        }
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']') fail(lineno, "unterminated section header");
            section = trim(line.substr(1, line.size() - 2));
            if (section.empty()) fail(lineno, "empty section name");
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) fail(lineno, "expected key = value");
        const std::string key = trim(line.substr(0, eq));
        if (key.empty()) fail(lineno, "empty key");
        const std::string full = section.empty() ? key : section + "." + key;
        if (out.entries.count(full)) fail(lineno, "duplicate key '" + full + "'");
        out.entries[full] = {parse_value(line.substr(eq + 1), lineno), lineno, false};
        out.order.push_back(full);
    }
    return out;
}

class Reader {
public:
    explicit Reader(ParsedText& text) : text_(text) {}

    void number(const std::string& key, double& field) {
        if (auto* e = find(key)) field = expect<double>(key, *e);
    }
    void integer(const std::string& key, int& field) {
        if (auto* e = find(key)) {
            const double v = expect<double>(key, *e);
            field = static_cast<int>(std::llround(v));
            if (std::abs(v - field) > 1e-12) fail(e->line, "'" + key + "' must be an integer");
        }
    }
    void uinteger(const std::string& key, std::uint64_t& field) {
        if (auto* e = find(key)) {
            const double v = expect<double>(key, *e);
            if (v < 0) fail(e->line, "'" + key + "' must be non-negative");
            field = static_cast<std::uint64_t>(v);
        }
    }
    void boolean(const std::string& key, bool& field) {
        if (auto* e = find(key)) field = expect<bool>(key, *e);
    }
    void string(const std::string& key, std::string& field) {
        if (auto* e = find(key)) field = expect<std::string>(key, *e);
    }
    void vector(const std::string& key, std::vector<double>& field) {
        if (auto* e = find(key)) field = expect<std::vector<double>>(key, *e);
    }
    template <std::size_t N>
    void fixed(const std::string& key, std::array<double, N>& field) {
        if (auto* e = find(key)) {
            const auto v = expect<std::vector<double>>(key, *e);
            if (v.size() != N) {
                fail(e->line, "'" + key + "' needs exactly " + std::to_string(N) + " entries");
            }
            std::copy(v.begin(), v.end(), field.begin());
        }
    }

    void reject_unknown() const {
        for (const auto& key : text_.order) {
            const auto& e = text_.entries.at(key);
            if (!e.used) fail(e.line, "unknown key '" + key + "'");
        }
    }

private:
    Entry* find(const std::string& key) {
        const auto it = text_.entries.find(key);
        if (it == text_.entries.end()) return nullptr;
        it->second.used = true;
        return &it->second;
    }
    template <class T>
    T expect(const std::string& key, const Entry& e) {
        if (!std::holds_alternative<T>(e.value)) {
            fail(e.line, "'" + key + "' has the wrong type");
        }
        return std::get<T>(e.value);
    }

    ParsedText& text_;
};

} // namespace

RunConfig parse_config(const std::string& text) {
    ParsedText parsed = tokenize(text);
    Reader r(parsed);
    RunConfig cfg;

    r.fixed<3>("domain.outer_lo", cfg.outer.lo);
    r.fixed<3>("domain.outer_hi", cfg.outer.hi);
    r.fixed<3>("domain.inner_lo", cfg.inner.lo);
    r.fixed<3>("domain.inner_hi", cfg.inner.hi);
    r.number("domain.h", cfg.h);
    r.integer("domain.front_axis", cfg.front_axis);

    r.number("time.tau", cfg.tau);
    r.number("time.T", cfg.T);

    r.number("source.omega_p", cfg.omega_p);

    r.number("init.amplitude", cfg.init_amplitude);
    r.fixed<3>("init.center", cfg.init_center);
    r.fixed<3>("init.widths", cfg.init_widths);
    r.boolean("init.literal_cubic", cfg.init_literal_cubic);

    r.number("model.background", cfg.background);
    {
        std::vector<double> amp, cen, wid;
        for (const auto& g : cfg.phantom) {
            amp.push_back(g.amplitude);
            for (double v : g.center) cen.push_back(v);
            for (double v : g.widths) wid.push_back(v);
        }
        r.vector("model.phantom_amplitudes", amp);
        r.vector("model.phantom_centers", cen);
        r.vector("model.phantom_widths", wid);
        if (cen.size() != 3 * amp.size() || wid.size() != 3 * amp.size()) {
            throw ValidationError("phantom centers/widths must hold 3 entries per amplitude");
        }
        cfg.phantom.clear();
        for (std::size_t i = 0; i < amp.size(); ++i) {
            Gaussian3 g;
            g.amplitude = amp[i];
            for (int d = 0; d < 3; ++d) {
                g.center[d] = cen[3 * i + d];
                g.widths[d] = wid[3 * i + d];
            }
            cfg.phantom.push_back(g);
        }
    }
    r.number("model.time_amplitude", cfg.time_part.amplitude);
    r.fixed<3>("model.time_center", cfg.time_part.center);
    r.fixed<3>("model.time_widths", cfg.time_part.widths);

    r.integer("data.refine", cfg.refine);
    r.number("data.sigma", cfg.sigma);
    r.uinteger("data.seed", cfg.seed);
    r.string("data.path", cfg.data_path);

    r.number("inversion.gamma", cfg.gamma_reg);
    r.number("inversion.c_low", cfg.c_low);
    r.number("inversion.c_high", cfg.c_high);
    r.integer("inversion.max_iters", cfg.max_iters);
    r.number("inversion.T_inv", cfg.T_inv);
    r.number("inversion.armijo_c1", cfg.armijo_c1);
    r.number("inversion.backtrack", cfg.backtrack);
    r.number("inversion.step_init", cfg.step_init);
    r.number("inversion.c_true_max", cfg.c_true_max);

    r.string("carleman.fixture", cfg.carleman.fixture);
    r.number("carleman.base", cfg.carleman.base);
    r.number("carleman.slope", cfg.carleman.slope);
    r.fixed<2>("carleman.cross_lo", cfg.carleman.setup.cross_lo);
    r.fixed<2>("carleman.cross_hi", cfg.carleman.setup.cross_hi);
    r.fixed<2>("carleman.a_prime", cfg.carleman.setup.a_prime);
    r.number("carleman.a0", cfg.carleman.setup.a0);
    r.number("carleman.c_m", cfg.carleman.setup.c_m);
    r.number("carleman.c_M", cfg.carleman.setup.c_M);
    r.number("carleman.gamma_w", cfg.carleman.setup.gamma_w);
    r.number("carleman.ell", cfg.carleman.setup.ell);
    r.number("carleman.delta", cfg.carleman.setup.delta);
    r.number("carleman.L", cfg.carleman.setup.L);
    r.number("carleman.T", cfg.carleman.setup.T);
    r.integer("carleman.samples", cfg.carleman.samples);
    r.uinteger("carleman.seed", cfg.carleman.seed);
    r.integer("carleman.resolution", cfg.carleman.resolution);

    r.number("probe.ell", cfg.probe.ell);
    r.number("probe.L", cfg.probe.L);
    r.number("probe.T", cfg.probe.T);
    r.number("probe.base", cfg.probe.base);
    r.number("probe.slope", cfg.probe.slope);
    r.number("probe.theta0_width", cfg.probe.theta0_width);
    r.vector("probe.epsilons", cfg.probe.epsilons);

    r.number("postprocess.fraction", cfg.post_fraction);
    r.string("postprocess.input", cfg.post_input);

    r.string("output.dir", cfg.out_dir);
    r.integer("output.stride", cfg.snapshot_stride);

    r.reject_unknown();
    validate_config(cfg);
    return cfg;
}

RunConfig parse_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open config file " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

void validate_config(const RunConfig& cfg) {
    if (!(cfg.h > 0.0)) throw ValidationError("domain.h must be positive");
    if (cfg.front_axis < 0 || cfg.front_axis > 2) {
        throw ValidationError("domain.front_axis must be 0, 1 or 2");
    }
    const Grid3 grid = build_grid(cfg.outer, cfg.h); // throws NonDivisibleExtent
    for (int d = 0; d < 3; ++d) {
        if (!(cfg.inner.lo[d] > cfg.outer.lo[d] && cfg.inner.hi[d] < cfg.outer.hi[d])) {
            throw ValidationError("inner box must be strictly inside the outer box");
        }
        if (!(cfg.inner.lo[d] < cfg.inner.hi[d])) {
            throw ValidationError("inner box has empty extent");
        }
    }
    (void)grid;
    if (!(cfg.tau > 0.0)) throw ValidationError("time.tau must be positive");
    if (!(cfg.T > 0.0)) throw ValidationError("time.T must be positive");
    const double q = cfg.T / cfg.tau;
    if (std::abs(q - std::round(q)) > 1e-9) {
        throw ValidationError("time.T must be an integer multiple of time.tau");
    }
    if (!(cfg.omega_p > 0.0)) throw ValidationError("source.omega_p must be positive");
    for (double w : cfg.init_widths) {
        if (!(w > 0.0)) throw ValidationError("init.widths must be positive");
    }
    for (const auto& g : cfg.phantom) {
        for (double w : g.widths) {
            if (!(w > 0.0)) throw ValidationError("phantom widths must be positive");
        }
    }
    for (double w : cfg.time_part.widths) {
        if (!(w > 0.0)) throw ValidationError("time-part widths must be positive");
    }
    if (cfg.refine < 2) throw ValidationError("data.refine must be >= 2");
    if (cfg.sigma < 0.0) throw ValidationError("data.sigma must be >= 0");
    if (cfg.gamma_reg < 0.0) throw ValidationError("inversion.gamma must be >= 0");
    if (!(cfg.c_low < cfg.c_high)) throw ValidationError("inversion bounds are inverted");
    if (cfg.max_iters < 1) throw ValidationError("inversion.max_iters must be >= 1");
    if (!(cfg.T_inv > 0.0) || cfg.T_inv > cfg.T + 1e-12) {
        throw ValidationError("inversion.T_inv must lie in (0, time.T]");
    }
    const double qi = cfg.T_inv / cfg.tau;
    if (std::abs(qi - std::round(qi)) > 1e-9) {
        throw ValidationError("inversion.T_inv must be an integer multiple of time.tau");
    }
    if (!(cfg.armijo_c1 > 0.0 && cfg.armijo_c1 < 1.0)) {
        throw ValidationError("inversion.armijo_c1 must lie in (0,1)");
    }
    if (!(cfg.backtrack > 0.0 && cfg.backtrack < 1.0)) {
        throw ValidationError("inversion.backtrack must lie in (0,1)");
    }
    if (!(cfg.step_init > 0.0)) throw ValidationError("inversion.step_init must be positive");
    if (!(cfg.c_true_max > 0.0)) throw ValidationError("inversion.c_true_max must be positive");
    if (!(cfg.post_fraction > 0.0 && cfg.post_fraction < 1.0)) {
        throw ValidationError("postprocess.fraction must lie in (0,1)");
    }
    if (cfg.snapshot_stride < 0) throw ValidationError("output.stride must be >= 0");
    if (cfg.carleman.fixture != "monotone" && cfg.carleman.fixture != "phantom") {
        throw ValidationError("carleman.fixture must be 'monotone' or 'phantom'");
    }
    if (cfg.carleman.samples < 1) throw ValidationError("carleman.samples must be >= 1");
    if (cfg.carleman.resolution < 3) throw ValidationError("carleman.resolution must be >= 3");
    if (!(cfg.probe.ell < cfg.probe.L)) throw ValidationError("probe needs ell < L");
    if (cfg.probe.epsilons.empty()) throw ValidationError("probe.epsilons must be nonempty");
    for (double e : cfg.probe.epsilons) {
        if (!(e > 0.0)) throw ValidationError("probe.epsilons must be positive");
    }
}

std::string canonical_config(const RunConfig& cfg) {
    std::ostringstream out;
    auto put = [&](const std::string& key, const std::string& v) { out << key << " = " << v << "\n"; };
    auto num = [&](const std::string& key, double v) { put(key, fmt_double(v)); };
    auto integer = [&](const std::string& key, long long v) { put(key, std::to_string(v)); };
    auto arr = [&](const std::string& key, const auto& values) {
        std::string s = "[";
        bool first = true;
        for (double v : values) {
            if (!first) s += ", ";
            s += fmt_double(v);
            first = false;
        }
        s += "]";
        put(key, s);
    };

    arr("domain.outer_lo", cfg.outer.lo);
    arr("domain.outer_hi", cfg.outer.hi);
    arr("domain.inner_lo", cfg.inner.lo);
    arr("domain.inner_hi", cfg.inner.hi);
    num("domain.h", cfg.h);
    integer("domain.front_axis", cfg.front_axis);
    num("time.tau", cfg.tau);
    num("time.T", cfg.T);
    num("source.omega_p", cfg.omega_p);
    num("init.amplitude", cfg.init_amplitude);
    arr("init.center", cfg.init_center);
    arr("init.widths", cfg.init_widths);
    put("init.literal_cubic", cfg.init_literal_cubic ? "true" : "false");
    num("model.background", cfg.background);
    {
        std::vector<double> amp, cen, wid;
        for (const auto& g : cfg.phantom) {
            amp.push_back(g.amplitude);
            for (double v : g.center) cen.push_back(v);
            for (double v : g.widths) wid.push_back(v);
        }
        arr("model.phantom_amplitudes", amp);
        arr("model.phantom_centers", cen);
        arr("model.phantom_widths", wid);
    }
    num("model.time_amplitude", cfg.time_part.amplitude);
    arr("model.time_center", cfg.time_part.center);
    arr("model.time_widths", cfg.time_part.widths);
    integer("data.refine", cfg.refine);
    num("data.sigma", cfg.sigma);
    integer("data.seed", static_cast<long long>(cfg.seed));
    put("data.path", '"' + cfg.data_path + '"');
    num("inversion.gamma", cfg.gamma_reg);
    num("inversion.c_low", cfg.c_low);
    num("inversion.c_high", cfg.c_high);
    integer("inversion.max_iters", cfg.max_iters);
    num("inversion.T_inv", cfg.T_inv);
    num("inversion.armijo_c1", cfg.armijo_c1);
    num("inversion.backtrack", cfg.backtrack);
    num("inversion.step_init", cfg.step_init);
    num("inversion.c_true_max", cfg.c_true_max);
    put("carleman.fixture", '"' + cfg.carleman.fixture + '"');
    num("carleman.base", cfg.carleman.base);
    num("carleman.slope", cfg.carleman.slope);
    arr("carleman.cross_lo", cfg.carleman.setup.cross_lo);
    arr("carleman.cross_hi", cfg.carleman.setup.cross_hi);
    arr("carleman.a_prime", cfg.carleman.setup.a_prime);
    num("carleman.a0", cfg.carleman.setup.a0);
    num("carleman.c_m", cfg.carleman.setup.c_m);
    num("carleman.c_M", cfg.carleman.setup.c_M);
    num("carleman.gamma_w", cfg.carleman.setup.gamma_w);
    num("carleman.ell", cfg.carleman.setup.ell);
    num("carleman.delta", cfg.carleman.setup.delta);
    num("carleman.L", cfg.carleman.setup.L);
    num("carleman.T", cfg.carleman.setup.T);
    integer("carleman.samples", cfg.carleman.samples);
    integer("carleman.seed", static_cast<long long>(cfg.carleman.seed));
    integer("carleman.resolution", cfg.carleman.resolution);
    num("probe.ell", cfg.probe.ell);
    num("probe.L", cfg.probe.L);
    num("probe.T", cfg.probe.T);
    num("probe.base", cfg.probe.base);
    num("probe.slope", cfg.probe.slope);
    num("probe.theta0_width", cfg.probe.theta0_width);
    arr("probe.epsilons", cfg.probe.epsilons);
    num("postprocess.fraction", cfg.post_fraction);
    put("postprocess.input", '"' + cfg.post_input + '"');
    put("output.dir", '"' + cfg.out_dir + '"');
    integer("output.stride", cfg.snapshot_stride);
    return out.str();
}

} // namespace cylwave

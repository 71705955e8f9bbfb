#include "vecthost/config.hpp"

#include <cctype>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace vecthost {

namespace {

struct RawValue {
    std::string text;
    int line = 0;
    bool used = false;
};

using Section = std::map<std::string, RawValue>;

const std::set<std::string> kSections = {"domain", "subdomains", "coefficients", "age",
                                         "initial",  "time",      "tolerances",  "mode"};

std::string trim(const std::string& s) {
    size_t a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    size_t b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

[[noreturn]] void fail(const std::string& name, int line, const std::string& msg) {
    std::ostringstream os;
    os << name << ":" << line << ": " << msg;
    throw SimError(os.str());
}

// Cut a trailing comment, leaving '#' and ';' inside double quotes alone.
std::string strip_comment(const std::string& s) {
    bool quoted = false;
    for (size_t i = 0; i < s.size(); ++i) {
        if (s[i] == '"') quoted = !quoted;
        if (!quoted && (s[i] == '#' || s[i] == ';')) return s.substr(0, i);
    }
    return s;
}

class Extractor {
public:
    Extractor(std::map<std::string, Section>& data, const std::string& name)
        : data_(data), name_(name) {}

    RawValue* find(const std::string& sec, const std::string& key) {
        auto s = data_.find(sec);
        if (s == data_.end()) return nullptr;
        auto k = s->second.find(key);
        if (k == s->second.end()) return nullptr;
        k->second.used = true;
        return &k->second;
    }

    RawValue& require(const std::string& sec, const std::string& key) {
        RawValue* v = find(sec, key);
        if (!v)
            throw SimError(name_ + ": missing required key '" + key + "' in section [" + sec +
                           "]");
        return *v;
    }

    double number(const std::string& sec, const std::string& key) {
        return to_number(require(sec, key), key);
    }

    double number_or(const std::string& sec, const std::string& key, double fallback) {
        RawValue* v = find(sec, key);
        return v ? to_number(*v, key) : fallback;
    }

    int integer(const std::string& sec, const std::string& key) {
        RawValue& v = require(sec, key);
        double d = to_number(v, key);
        int i = static_cast<int>(d);
        if (d != static_cast<double>(i)) fail(name_, v.line, "key '" + key + "' expects an integer");
        return i;
    }

    int integer_or(const std::string& sec, const std::string& key, int fallback) {
        RawValue* v = find(sec, key);
        if (!v) return fallback;
        double d = to_number(*v, key);
        int i = static_cast<int>(d);
        if (d != static_cast<double>(i))
            fail(name_, v->line, "key '" + key + "' expects an integer");
        return i;
    }

    Rect rect(const std::string& sec, const std::string& key) {
        RawValue& v = require(sec, key);
        std::vector<double> parts;
        std::string cur;
        std::istringstream is(v.text);
        while (std::getline(is, cur, ',')) parts.push_back(to_number_text(trim(cur), v.line, key));
        if (parts.size() != 4)
            fail(name_, v.line, "key '" + key + "' expects four numbers: x0, y0, x1, y1");
        return Rect{parts[0], parts[1], parts[2], parts[3]};
    }

    Expression expr(const std::string& sec, const std::string& key) {
        return to_expr(require(sec, key), key);
    }

    Expression expr_or(const std::string& sec, const std::string& key, const std::string& fb) {
        RawValue* v = find(sec, key);
        if (v) return to_expr(*v, key);
        return Expression::parse(fb);
    }

    void check_unused() const {
        for (const auto& [sec, kv] : data_)
            for (const auto& [key, v] : kv)
                if (!v.used) fail(name_, v.line, "unknown key '" + key + "' in section [" + sec + "]");
    }

private:
    double to_number_text(const std::string& t, int line, const std::string& key) {
        if (t.empty()) fail(name_, line, "key '" + key + "' expects a number, got nothing");
        char* end = nullptr;
        double d = std::strtod(t.c_str(), &end);
        if (end != t.c_str() + t.size() || !std::isfinite(d))
            fail(name_, line, "key '" + key + "' expects a number, got '" + t + "'");
        return d;
    }

    double to_number(RawValue& v, const std::string& key) {
        return to_number_text(v.text, v.line, key);
    }

    Expression to_expr(RawValue& v, const std::string& key) {
        const std::string& t = v.text;
        if (t.size() < 2 || t.front() != '"' || t.back() != '"')
            fail(name_, v.line, "key '" + key + "' expects a double-quoted expression");
        try {
            return Expression::parse(t.substr(1, t.size() - 2));
        } catch (const ParseError& e) {
            fail(name_, v.line, std::string("in expression for '") + key + "': " + e.what());
        }
    }

    std::map<std::string, Section>& data_;
    std::string name_;
};

} // namespace

Config parse_config(const std::string& text, const std::string& name) {
    std::map<std::string, Section> data;
    std::string section;

    std::istringstream is(text);
    std::string raw;
    int line = 0;
    while (std::getline(is, raw)) {
        ++line;
        std::string s = trim(strip_comment(raw));
        if (s.empty()) continue;
        if (s.front() == '[') {
            if (s.back() != ']') fail(name, line, "unterminated section header");
            section = trim(s.substr(1, s.size() - 2));
            if (!kSections.count(section)) fail(name, line, "unknown section [" + section + "]");
            data[section]; // a section may be mentioned and left empty
            continue;
        }
        size_t eq = s.find('=');
        if (eq == std::string::npos) fail(name, line, "expected 'key = value'");
        if (section.empty()) fail(name, line, "key outside any [section]");
        std::string key = trim(s.substr(0, eq));
        std::string val = trim(s.substr(eq + 1));
        if (key.empty()) fail(name, line, "empty key");
        if (val.empty()) fail(name, line, "key '" + key + "' has no value");
        auto [it, fresh] = data[section].emplace(key, RawValue{val, line, false});
        if (!fresh) fail(name, line, "duplicate key '" + key + "'");
    }

    Extractor ex(data, name);
    Config cfg;
    cfg.Lx = ex.number("domain", "Lx");
    cfg.Ly = ex.number("domain", "Ly");
    cfg.nx = ex.integer("domain", "nx");
    cfg.ny = ex.integer("domain", "ny");
    cfg.star = ex.rect("subdomains", "star");
    cfg.starstar = ex.rect("subdomains", "starstar");

    cfg.d1 = ex.expr("coefficients", "d1");
    cfg.d2 = ex.expr("coefficients", "d2");
    cfg.beta = ex.expr("coefficients", "beta");
    cfg.m = ex.expr("coefficients", "m");
    cfg.sigma1 = ex.expr("coefficients", "sigma1");
    cfg.sigma2 = ex.expr("coefficients", "sigma2");

    cfg.lambda = ex.expr("age", "lambda");
    cfg.tau = ex.number("age", "tau");
    if (RawValue* v = ex.find("age", "a_max")) {
        char* end = nullptr;
        double d = std::strtod(v->text.c_str(), &end);
        if (end != v->text.c_str() + v->text.size() || !std::isfinite(d))
            fail(name, v->line, "key 'a_max' expects a number, got '" + v->text + "'");
        cfg.a_max = d;
    }

    cfg.u0 = ex.expr("initial", "u0");
    cfg.phi0 = ex.expr("initial", "phi0");
    cfg.psi0 = ex.expr_or("initial", "psi0", "0");
    cfg.z0 = ex.expr("initial", "z0");
    cfg.k = ex.expr("initial", "k");

    cfg.dt = ex.number("time", "dt");
    cfg.t_end = ex.number("time", "t_end");
    cfg.output_every = ex.integer_or("time", "output_every", 1);

    cfg.tol.cg_tol = ex.number_or("tolerances", "cg_tol", cfg.tol.cg_tol);
    cfg.tol.steady_tol = ex.number_or("tolerances", "steady_tol", cfg.tol.steady_tol);
    cfg.tol.invariant_tol = ex.number_or("tolerances", "invariant_tol", cfg.tol.invariant_tol);

    if (RawValue* v = ex.find("mode", "mode")) {
        if (v->text == "paper")
            cfg.strict = true;
        else if (v->text == "lab")
            cfg.strict = false;
        else
            fail(name, v->line, "mode must be 'paper' or 'lab', got '" + v->text + "'");
    }

    ex.check_unused();
    return cfg;
}

Config load_config(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw SimError("cannot open config file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str(), path);
}

ScenarioBuild build_scenario(const Config& cfg) {
    if (!(cfg.dt > 0.0)) throw SimError("config: dt must be positive");
    if (!(cfg.t_end >= 0.0)) throw SimError("config: t_end must be nonnegative");
    if (cfg.output_every < 1) throw SimError("config: output_every must be at least 1");
    if (cfg.tau < 0.0) throw SimError("config: tau must be nonnegative");

    std::vector<std::string> warnings;

    auto grid = std::make_shared<const Grid>(
        Grid::build(cfg.Lx, cfg.Ly, cfg.nx, cfg.ny, cfg.star, cfg.starstar));
    const Grid& g = *grid;

    CoefficientSet coeffs =
        build_coefficients(cfg.d1, cfg.d2, cfg.beta, cfg.m, cfg.sigma1, cfg.sigma2, cfg.lambda, g);

    AgeGridSelection sel = select_age_grid(cfg.lambda, cfg.dt, cfg.a_max);
    coeffs.lambda_star = sel.lambda_star;
    if (cfg.a_max && std::abs(sel.a_max - *cfg.a_max) > 1e-12 * std::max(1.0, *cfg.a_max)) {
        std::ostringstream os;
        os << "a_max = " << *cfg.a_max << " is not a multiple of dt, extended to " << sel.a_max;
        warnings.push_back(os.str());
    }
    SurvivalTable survival = build_survival(cfg.lambda, cfg.dt, sel.cohorts);

    // tau lands on the step grid: nearest multiple of dt, ties rounding up.
    const long q = static_cast<long>(std::floor(cfg.tau / cfg.dt + 0.5));
    const double tau_snapped = static_cast<double>(q) * cfg.dt;
    if (std::abs(tau_snapped - cfg.tau) > 1e-12 * std::max(1.0, std::abs(cfg.tau))) {
        std::ostringstream os;
        os << "tau = " << cfg.tau << " is not a multiple of dt, snapped to " << tau_snapped;
        warnings.push_back(os.str());
    }
    if (q >= sel.cohorts)
        throw SimError("config: tau must be below the age-grid extent a_max");

    InitialData init{evaluate_field(cfg.u0, g, Mask::Omega),
                     evaluate_field(cfg.phi0, g, Mask::Star),
                     evaluate_field(cfg.psi0, g, Mask::Star),
                     normalize_k(clip_to_starstar(evaluate_field(cfg.k, g, Mask::Omega), g), g),
                     {},
                     cfg.z0.eval_age(0.0)};
    init.z0_samples.resize(static_cast<size_t>(sel.cohorts));
    for (int j = 0; j < sel.cohorts; ++j) {
        double a = (j + 0.5) * cfg.dt;
        double z = cfg.z0.eval_age(a);
        if (!std::isfinite(z)) {
            std::ostringstream os;
            os << "config: seed age profile is not finite at age " << a;
            throw SimError(os.str());
        }
        init.z0_samples[static_cast<size_t>(j)] = z;
    }

    Scenario sc{std::move(grid),
                std::move(coeffs),
                std::move(init),
                cfg.z0,
                std::move(survival),
                sel.cohorts,
                sel.a_max,
                tau_snapped,
                static_cast<int>(q),
                cfg.dt,
                cfg.t_end,
                cfg.output_every,
                cfg.tol,
                cfg.strict};
    return ScenarioBuild{std::move(sc), std::move(warnings)};
}

} // namespace vecthost

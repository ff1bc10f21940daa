#include "kslg/config.hpp"

#include "kslg/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <map>
#include <sstream>

namespace kslg {

namespace {

struct KnownKey {
    const char* section;
    const char* key;
    bool required;
};

constexpr KnownKey kKeys[] = {
    {"grid", "dim", true},          {"grid", "nx", true},          {"grid", "ny", false},
    {"grid", "lx", true},           {"grid", "ly", false},         {"model", "n", true},
    {"model", "kappa", true},       {"model", "s", false},         {"model", "epsilon", true},
    {"model", "cutoff", false},     {"model", "chi", false},       {"coefficients", "lambda", true},
    {"coefficients", "mu", true},   {"initial", "u0", true},       {"initial", "v0", true},
    {"initial", "seed", false},     {"time", "T", true},           {"time", "dt", true},
    {"time", "policy", false},      {"time", "cfl", false},        {"time", "output_every", false},
    {"tolerances", "c_tol", false}, {"tolerances", "cg_tol", false}, {"sweep", "epsilon0", false},
    {"sweep", "levels", false},     {"sweep", "sample_every", false},
};

std::string trim(std::string s) {
    const auto not_space = [](unsigned char c) { return !std::isspace(c); };
    s.erase(s.begin(), std::find_if(s.begin(), s.end(), not_space));
    s.erase(std::find_if(s.rbegin(), s.rend(), not_space).base(), s.end());
    return s;
}

bool known_section(const std::string& s) {
    return std::any_of(std::begin(kKeys), std::end(kKeys), [&](const KnownKey& k) { return s == k.section; });
}

std::string suggestion(const std::string& section, const std::string& key) {
    std::string best;
    std::size_t best_d = 3;
    for (bool same_section : {true, false}) {
        for (const auto& k : kKeys) {
            if ((section == k.section) != same_section) continue;
            const std::size_t d = edit_distance(key, k.key);
            if (d < best_d) {
                best_d = d;
                best = same_section ? std::string(k.key) : "[" + std::string(k.section) + "] " + k.key;
            }
        }
        if (!best.empty()) break;
    }
    return best.empty() ? std::string() : "; did you mean '" + best + "'?";
}

class Reader {
public:
    Reader(std::vector<ConfigError>& errors) : errors_(errors) {}

    void parse(const std::string& text) {
        std::istringstream in(text);
        std::string raw, section;
        int line = 0;
        while (std::getline(in, raw)) {
            ++line;
            std::string s = trim(raw);
            if (s.empty() || s[0] == '#' || s[0] == ';') continue;
            for (std::size_t i = 1; i < s.size(); ++i) {
                if ((s[i] == '#' || s[i] == ';') && std::isspace(static_cast<unsigned char>(s[i - 1]))) {
                    s = trim(s.substr(0, i));
                    break;
                }
            }
            if (s.front() == '[') {
                if (s.back() != ']') {
                    error(line, s, "malformed section header");
                    continue;
                }
                section = trim(s.substr(1, s.size() - 2));
                if (!known_section(section)) {
                    std::string hint;
                    for (const auto& k : kKeys)
                        if (edit_distance(section, k.section) <= 2) hint = std::string("; did you mean '") + k.section + "'?";
                    error(line, section, "unknown section" + hint);
                }
                continue;
            }
            const auto eq = s.find('=');
            if (eq == std::string::npos) {
                error(line, section, "expected 'key = value'");
                continue;
            }
            const std::string key = trim(s.substr(0, eq));
            const std::string value = trim(s.substr(eq + 1));
            if (section.empty()) {
                error(line, key, "key outside of any section");
                continue;
            }
            if (!known_section(section)) continue;
            const std::string path = section + "." + key;
            const bool known = std::any_of(std::begin(kKeys), std::end(kKeys),
                                           [&](const KnownKey& k) { return section == k.section && key == k.key; });
            if (!known) {
                error(line, path, "unknown key" + suggestion(section, key));
                continue;
            }
            if (values_.count(path)) {
                error(line, path, "duplicate key (first set on line " + std::to_string(values_[path].line) + ")");
                continue;
            }
            if (value.empty()) {
                error(line, path, "empty value");
                continue;
            }
            values_[path] = {value, line};
        }
        for (const auto& k : kKeys) {
            const std::string path = std::string(k.section) + "." + k.key;
            if (k.required && !values_.count(path)) error(0, path, "missing required key");
        }
    }

    bool has(const std::string& path) const { return values_.count(path) > 0; }
    int line(const std::string& path) const { return has(path) ? values_.at(path).line : 0; }
    const std::string& raw(const std::string& path) const { return values_.at(path).value; }

    void error(int line, const std::string& key, const std::string& message) { errors_.push_back({line, key, message}); }

    std::optional<double> number(const std::string& path) {
        if (!has(path)) return std::nullopt;
        const std::string& v = raw(path);
        double x = 0.0;
        const auto res = std::from_chars(v.data(), v.data() + v.size(), x);
        if (res.ec != std::errc() || res.ptr != v.data() + v.size() || !std::isfinite(x)) {
            error(line(path), path, "expected a number, got '" + v + "'");
            return std::nullopt;
        }
        return x;
    }

    std::optional<long long> integer(const std::string& path) {
        if (!has(path)) return std::nullopt;
        const std::string& v = raw(path);
        long long x = 0;
        const auto res = std::from_chars(v.data(), v.data() + v.size(), x);
        if (res.ec != std::errc() || res.ptr != v.data() + v.size()) {
            error(line(path), path, "expected an integer, got '" + v + "'");
            return std::nullopt;
        }
        return x;
    }

    std::optional<Rational> rational(const std::string& path) {
        if (!has(path)) return std::nullopt;
        try {
            return parse_rational(raw(path));
        } catch (const std::exception& e) {
            error(line(path), path, std::string("expected a rational (a/b or decimal): ") + e.what());
            return std::nullopt;
        }
    }

    /// Reports `message` when the value is present and `ok` is false.
    template <class T>
    void require(const std::optional<T>& v, bool ok, const std::string& path, const std::string& message) {
        if (v && !ok) error(line(path), path, message);
    }

private:
    struct Entry {
        std::string value;
        int line = 0;
    };
    std::map<std::string, Entry> values_;
    std::vector<ConfigError>& errors_;
};

}  // namespace

std::string ConfigError::str() const {
    std::ostringstream os;
    if (line > 0) os << "line " << line << ": ";
    os << key << ": " << message;
    return os.str();
}

std::size_t edit_distance(const std::string& a, const std::string& b) {
    std::vector<std::size_t> prev(b.size() + 1), cur(b.size() + 1);
    for (std::size_t j = 0; j <= b.size(); ++j) prev[j] = j;
    for (std::size_t i = 1; i <= a.size(); ++i) {
        cur[0] = i;
        for (std::size_t j = 1; j <= b.size(); ++j)
            cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1)});
        std::swap(prev, cur);
    }
    return prev[b.size()];
}

ConfigResult parse_config(const std::string& text, const std::filesystem::path& base_dir) {
    ConfigResult result;
    auto& errors = result.errors;
    Reader r(errors);
    r.parse(text);

    AppConfig cfg;
    cfg.text = text;
    ProblemSpec& p = cfg.problem;

    // grid
    const auto dim = r.integer("grid.dim");
    r.require(dim, dim && (*dim == 1 || *dim == 2), "grid.dim", "must be 1 or 2");
    const bool planar = dim && *dim == 2;
    const auto nx = r.integer("grid.nx");
    r.require(nx, nx && *nx >= 4 && *nx <= 1 << 16, "grid.nx", "must lie in [4, 65536]");
    const auto lx = r.number("grid.lx");
    r.require(lx, lx && *lx > 0.0, "grid.lx", "must be positive");
    std::optional<long long> ny;
    std::optional<double> ly;
    if (planar) {
        if (!r.has("grid.ny")) r.error(0, "grid.ny", "missing required key for dim = 2");
        if (!r.has("grid.ly")) r.error(0, "grid.ly", "missing required key for dim = 2");
        ny = r.integer("grid.ny");
        r.require(ny, ny && *ny >= 4 && *ny <= 1 << 16, "grid.ny", "must lie in [4, 65536]");
        ly = r.number("grid.ly");
        r.require(ly, ly && *ly > 0.0, "grid.ly", "must be positive");
    } else if (dim) {
        for (const char* k : {"grid.ny", "grid.ly"})
            if (r.has(k)) r.error(r.line(k), k, "only allowed for dim = 2");
    }

    // model
    const auto n = r.integer("model.n");
    r.require(n, n && *n == 2, "model.n", "must be 2 (one-dimensional runs use the planar exponents)");
    const auto kappa = r.rational("model.kappa");
    r.require(kappa, kappa && *kappa > 1, "model.kappa", "must satisfy kappa > 1");
    auto s = r.rational("model.s");
    r.require(s, s && *s > 0, "model.s", "must be positive");
    const auto eps = r.number("model.epsilon");
    r.require(eps, eps && *eps > 0.0 && *eps <= 1.0, "model.epsilon", "must lie in (0, 1]");
    if (r.has("model.cutoff")) {
        const std::string& c = r.raw("model.cutoff");
        if (c == "quintic") {
            p.truncation.cutoff = Cutoff::quintic;
        } else if (c == "linear") {
            p.truncation.cutoff = Cutoff::linear;
        } else {
            r.error(r.line("model.cutoff"), "model.cutoff", "must be 'quintic' or 'linear'");
        }
    }
    if (const auto chi = r.number("model.chi")) p.chi = *chi;

    // fields
    const auto field = [&](const std::string& path, FieldSpec& out) {
        if (!r.has(path)) return false;
        try {
            out = FieldSpec::parse(r.raw(path));
            if (out.kind == FieldSpec::Kind::file && std::filesystem::path(out.path).is_relative() && !base_dir.empty())
                out.path = (base_dir / out.path).string();
            return true;
        } catch (const std::exception& e) {
            r.error(r.line(path), path, e.what());
            return false;
        }
    };
    field("coefficients.lambda", p.lambda);
    const bool have_mu = field("coefficients.mu", p.mu);
    field("initial.u0", p.u0);
    field("initial.v0", p.v0);
    if (const auto seed = r.integer("initial.seed")) {
        if (*seed < 0) {
            r.error(r.line("initial.seed"), "initial.seed", "must be nonnegative");
        } else {
            p.seed = static_cast<std::uint64_t>(*seed);
        }
    }

    // time
    const auto T = r.number("time.T");
    r.require(T, T && *T > 0.0, "time.T", "must be positive");
    const auto dt = r.number("time.dt");
    r.require(dt, dt && *dt > 0.0, "time.dt", "must be positive");
    if (T && dt && *T > 0.0 && *dt > 0.0 && *T / *dt > 1e8) r.error(r.line("time.dt"), "time.dt", "more than 1e8 steps");
    if (r.has("time.policy")) {
        const std::string& pol = r.raw("time.policy");
        if (pol == "fixed") {
            p.time.policy = DtPolicy::fixed;
        } else if (pol == "adaptive") {
            p.time.policy = DtPolicy::adaptive;
        } else {
            r.error(r.line("time.policy"), "time.policy", "must be 'fixed' or 'adaptive'");
        }
    }
    if (const auto cfl = r.number("time.cfl")) {
        r.require(std::optional<double>(*cfl), *cfl > 0.0 && *cfl <= 1.0, "time.cfl", "must lie in (0, 1]");
        p.time.cfl = *cfl;
    }
    if (const auto every = r.integer("time.output_every")) {
        r.require(every, *every >= 1, "time.output_every", "must be at least 1");
        if (*every >= 1) cfg.output_every = static_cast<std::size_t>(*every);
    }

    // tolerances
    if (const auto c = r.number("tolerances.c_tol")) {
        r.require(c, *c > 0.0, "tolerances.c_tol", "must be positive");
        cfg.c_tol = *c;
    }
    if (const auto c = r.number("tolerances.cg_tol")) {
        r.require(c, *c > 0.0 && *c < 1.0, "tolerances.cg_tol", "must lie in (0, 1)");
        p.cg_tol = *c;
    }

    // sweep
    if (const auto e0 = r.number("sweep.epsilon0")) {
        r.require(e0, *e0 > 0.0 && *e0 <= 1.0, "sweep.epsilon0", "must lie in (0, 1]");
        cfg.epsilon0 = *e0;
    }
    if (const auto lv = r.integer("sweep.levels")) {
        r.require(lv, *lv >= 0 && *lv <= 40, "sweep.levels", "must lie in [0, 40]");
        cfg.sweep_levels = static_cast<int>(*lv);
    }
    if (const auto se = r.integer("sweep.sample_every")) {
        r.require(se, *se >= 1, "sweep.sample_every", "must be at least 1");
        if (*se >= 1) cfg.sample_every = static_cast<std::size_t>(*se);
    }

    // exponent parameters
    if (have_mu && p.mu.kind == FieldSpec::Kind::prototype) {
        std::istringstream tokens(r.raw("coefficients.mu"));
        std::string word, mu1, alpha;
        tokens >> word >> mu1 >> alpha;
        try {
            cfg.params.mu1 = parse_rational(mu1);
            cfg.params.alpha = parse_rational(alpha);
        } catch (const std::exception& e) {
            r.error(r.line("coefficients.mu"), "coefficients.mu", e.what());
        }
    }
    if (n && *n == 2 && kappa && *kappa > 1) {
        cfg.params.n = 2;
        cfg.params.kappa = *kappa;
        if (!r.has("model.s")) {
            if (cfg.params.alpha) {
                s = exponents::bridging_s(2, *cfg.params.alpha, *kappa);
                if (!s)
                    r.error(0, "model.s", "no admissible s exists for this prototype mu and kappa");
            } else {
                r.error(0, "model.s", "missing required key (only derivable when mu is a prototype)");
            }
        }
        if (s && *s > 0) {
            cfg.params.s = *s;
            const Rational threshold = exponents::kappa_threshold(2, *s);
            if (!(*kappa > threshold))
                r.error(r.line("model.kappa"), "model.kappa",
                        "(n, s, kappa) is not admissible: kappa must exceed " + to_string(threshold));
            if (cfg.params.alpha && sgn(*cfg.params.alpha) > 0 &&
                !(ExtendedRational(*s) < exponents::mu_integrability_exponent_bound(2, *cfg.params.alpha)))
                r.error(r.has("model.s") ? r.line("model.s") : 0, "model.s",
                        "mu^-s is not integrable: s must be below n/alpha");
        }
    }

    if (errors.empty()) {
        p.grid = planar ? GridSpec::rectangle(static_cast<int>(*nx), static_cast<int>(*ny), *lx, *ly)
                        : GridSpec::line(static_cast<int>(*nx), *lx);
        p.kappa = to_double(*kappa);
        p.truncation.epsilon = *eps;
        p.T = *T;
        p.time.dt = *dt;
        const std::pair<const char*, FieldSpec*> fields[] = {
            {"coefficients.lambda", &p.lambda}, {"coefficients.mu", &p.mu}, {"initial.u0", &p.u0}, {"initial.v0", &p.v0}};
        for (const auto& [path, spec] : fields) {
            try {
                const Field f = realize(*spec, p.grid, p.seed);
                if (std::string(path) == "coefficients.mu" && f.min() < 0.0) r.error(r.line(path), path, "mu must be nonnegative");
                if (std::string(path).rfind("initial.", 0) == 0 && f.min() < 0.0)
                    r.error(r.line(path), path, "initial data must be nonnegative");
            } catch (const std::exception& e) {
                r.error(r.line(path), path, e.what());
            }
        }
    }

    std::stable_sort(errors.begin(), errors.end(), [](const ConfigError& a, const ConfigError& b) {
        return (a.line == 0 ? 1 << 30 : a.line) < (b.line == 0 ? 1 << 30 : b.line);
    });
    if (errors.empty()) result.config = std::move(cfg);
    return result;
}

ConfigResult parse_config_file(const std::filesystem::path& path) {
    std::string text;
    try {
        text = io::read_file(path);
    } catch (const std::exception& e) {
        ConfigResult r;
        r.errors.push_back({0, path.string(), std::string("cannot read config: ") + e.what()});
        return r;
    }
    return parse_config(text, path.parent_path());
}

}  // namespace kslg

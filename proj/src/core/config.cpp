#include "config.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include "errors.hpp"
#include "snapshot.hpp"

namespace nlch {

namespace {

std::string trim(const std::string& s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

bool parse_double(const std::string& s, double& out) {
    const char* c = s.c_str();
    char* end = nullptr;
    out = std::strtod(c, &end);
    return end != c && *end == '\0';
}

bool parse_int(const std::string& s, long& out) {
    const char* c = s.c_str();
    char* end = nullptr;
    out = std::strtol(c, &end, 10);
    return end != c && *end == '\0';
}

bool parse_u64(const std::string& s, std::uint64_t& out) {
    const char* c = s.c_str();
    char* end = nullptr;
    out = std::strtoull(c, &end, 10);
    return end != c && *end == '\0';
}

std::string unquote(const std::string& s) {
    if (s.size() >= 2 && s.front() == '"' && s.back() == '"') return s.substr(1, s.size() - 2);
    return s;
}

// Setter registry: every recognized "section.key" knows how to ingest a raw
// value string and complain precisely.
struct Setter {
    std::function<std::string(ScenarioConfig&, const std::string&)> apply; // returns error or ""
};

std::string need_double(const std::string& raw, double& slot) {
    if (!parse_double(raw, slot)) return "expected a number, got '" + raw + "'";
    return "";
}

std::string need_int(const std::string& raw, int& slot) {
    long v;
    if (!parse_int(raw, v)) return "expected an integer, got '" + raw + "'";
    slot = static_cast<int>(v);
    return "";
}

std::string need_long(const std::string& raw, long& slot) {
    if (!parse_int(raw, slot)) return "expected an integer, got '" + raw + "'";
    return "";
}

std::string need_u64(const std::string& raw, std::uint64_t& slot) {
    if (!parse_u64(raw, slot)) return "expected a nonnegative integer, got '" + raw + "'";
    return "";
}

std::string need_string(const std::string& raw, std::string& slot) {
    slot = unquote(raw);
    return "";
}

std::string need_array(const std::string& raw, std::vector<double>& slot) {
    std::string t = trim(raw);
    if (t.size() < 2 || t.front() != '[' || t.back() != ']')
        return "expected an array like [1, 0, -0.5], got '" + raw + "'";
    slot.clear();
    std::stringstream ss(t.substr(1, t.size() - 2));
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (item.empty()) continue;
        double v;
        if (!parse_double(item, v)) return "bad array element '" + item + "'";
        slot.push_back(v);
    }
    if (slot.empty()) return "array must not be empty";
    return "";
}

const std::map<std::string, Setter>& setters() {
    static const std::map<std::string, Setter> table = [] {
        std::map<std::string, Setter> t;
        auto add = [&](const std::string& key, auto fn) { t[key] = Setter{fn}; };

        add("domain.dimension", [](ScenarioConfig& c, const std::string& raw) {
            return need_int(raw, c.domain.dim);
        });
        add("domain.extent", [](ScenarioConfig& c, const std::string& raw) {
            std::string err = need_double(raw, c.domain.extent[0]);
            c.domain.extent[1] = c.domain.extent[0];
            return err;
        });
        add("domain.extent_x", [](ScenarioConfig& c, const std::string& raw) {
            return need_double(raw, c.domain.extent[0]);
        });
        add("domain.extent_y", [](ScenarioConfig& c, const std::string& raw) {
            return need_double(raw, c.domain.extent[1]);
        });
        add("domain.cells", [](ScenarioConfig& c, const std::string& raw) {
            std::string err = need_int(raw, c.domain.cells[0]);
            c.domain.cells[1] = c.domain.cells[0];
            return err;
        });
        add("domain.cells_x", [](ScenarioConfig& c, const std::string& raw) {
            return need_int(raw, c.domain.cells[0]);
        });
        add("domain.cells_y", [](ScenarioConfig& c, const std::string& raw) {
            return need_int(raw, c.domain.cells[1]);
        });
        add("domain.max_cells", [](ScenarioConfig& c, const std::string& raw) {
            return need_int(raw, c.domain.max_cells);
        });

        add("kernel.family", [](ScenarioConfig& c, const std::string& raw) {
            return need_string(raw, c.kernel.family);
        });
        add("kernel.alpha", [](ScenarioConfig& c, const std::string& raw) {
            return need_double(raw, c.kernel.alpha);
        });
        add("kernel.amplitude", [](ScenarioConfig& c, const std::string& raw) {
            return need_double(raw, c.kernel.amplitude);
        });
        add("kernel.modulation", [](ScenarioConfig& c, const std::string& raw) {
            return need_string(raw, c.kernel.modulation);
        });

        add("potential.family", [](ScenarioConfig& c, const std::string& raw) {
            return need_string(raw, c.potential.family);
        });
        add("potential.T_abs", [](ScenarioConfig& c, const std::string& raw) {
            return need_double(raw, c.potential.T_abs);
        });
        add("potential.T_crit", [](ScenarioConfig& c, const std::string& raw) {
            return need_double(raw, c.potential.T_crit);
        });
        add("potential.coeffs", [](ScenarioConfig& c, const std::string& raw) {
            return need_array(raw, c.potential.coeffs);
        });
        add("potential.a", [](ScenarioConfig& c, const std::string& raw) {
            return need_double(raw, c.potential.a);
        });
        add("potential.b", [](ScenarioConfig& c, const std::string& raw) {
            return need_double(raw, c.potential.b);
        });
        add("potential.d_override", [](ScenarioConfig& c, const std::string& raw) {
            double v;
            std::string err = need_double(raw, v);
            if (err.empty()) c.potential.d_override = v;
            return err;
        });

        add("scheme.dt", [](ScenarioConfig& c, const std::string& raw) {
            return need_double(raw, c.scheme.dt);
        });
        add("scheme.theta_reg", [](ScenarioConfig& c, const std::string& raw) {
            return need_double(raw, c.scheme.theta_reg);
        });
        add("scheme.splitting", [](ScenarioConfig& c, const std::string& raw) {
            return need_string(raw, c.scheme.splitting);
        });
        add("scheme.newton_tol", [](ScenarioConfig& c, const std::string& raw) {
            return need_double(raw, c.scheme.newton_tol);
        });
        add("scheme.newton_max_iter", [](ScenarioConfig& c, const std::string& raw) {
            return need_int(raw, c.scheme.newton_max_iter);
        });
        add("scheme.backtrack_factor", [](ScenarioConfig& c, const std::string& raw) {
            return need_double(raw, c.scheme.backtrack_factor);
        });
        add("scheme.feasibility_margin", [](ScenarioConfig& c, const std::string& raw) {
            return need_double(raw, c.scheme.feasibility_margin);
        });

        add("initial.family", [](ScenarioConfig& c, const std::string& raw) {
            return need_string(raw, c.initial.family);
        });
        add("initial.mean", [](ScenarioConfig& c, const std::string& raw) {
            return need_double(raw, c.initial.mean);
        });
        add("initial.amplitude", [](ScenarioConfig& c, const std::string& raw) {
            return need_double(raw, c.initial.amplitude);
        });
        add("initial.seed", [](ScenarioConfig& c, const std::string& raw) {
            return need_u64(raw, c.initial.seed);
        });
        add("initial.expression", [](ScenarioConfig& c, const std::string& raw) {
            return need_string(raw, c.initial.expression);
        });
        add("initial.snapshot", [](ScenarioConfig& c, const std::string& raw) {
            return need_string(raw, c.initial.snapshot);
        });

        add("output.directory", [](ScenarioConfig& c, const std::string& raw) {
            return need_string(raw, c.output.directory);
        });
        add("output.snapshot_stride", [](ScenarioConfig& c, const std::string& raw) {
            return need_int(raw, c.output.snapshot_stride);
        });
        add("output.diagnostic_stride", [](ScenarioConfig& c, const std::string& raw) {
            return need_int(raw, c.output.diagnostic_stride);
        });

        add("run.t_final", [](ScenarioConfig& c, const std::string& raw) {
            return need_double(raw, c.run.t_final);
        });
        add("run.steps", [](ScenarioConfig& c, const std::string& raw) {
            return need_long(raw, c.run.steps);
        });
        add("run.max_halvings", [](ScenarioConfig& c, const std::string& raw) {
            return need_int(raw, c.run.max_halvings);
        });

        add("operator.refinement", [](ScenarioConfig& c, const std::string& raw) {
            return need_int(raw, c.op.refinement);
        });
        add("operator.max_coupling_cells", [](ScenarioConfig& c, const std::string& raw) {
            return need_int(raw, c.op.max_coupling_cells);
        });
        return t;
    }();
    return table;
}

} // namespace

ScenarioConfig parse_config(const std::string& text, std::vector<ConfigDiagnostic>& diags) {
    ScenarioConfig config;
    std::istringstream in(text);
    std::string line;
    std::string section;
    int lineno = 0;
    std::map<std::string, int> assigned_at;

    while (std::getline(in, line)) {
        ++lineno;
        // strip comments outside quotes
        bool quoted = false;
        for (std::size_t i = 0; i < line.size(); ++i) {
            if (line[i] == '"') quoted = !quoted;
            if (line[i] == '#' && !quoted) {
                line = line.substr(0, i);
                break;
            }
        }
        std::string t = trim(line);
        if (t.empty()) continue;

        if (t.front() == '[') {
            if (t.back() != ']') {
                diags.push_back({lineno, "unterminated section header"});
                continue;
            }
            section = trim(t.substr(1, t.size() - 2));
            if (section.empty()) diags.push_back({lineno, "empty section name"});
            continue;
        }

        auto eq = t.find('=');
        if (eq == std::string::npos) {
            diags.push_back({lineno, "expected 'key = value', got '" + t + "'"});
            continue;
        }
        std::string key = trim(t.substr(0, eq));
        std::string value = trim(t.substr(eq + 1));
        if (key.empty() || value.empty()) {
            diags.push_back({lineno, "expected 'key = value', got '" + t + "'"});
            continue;
        }
        std::string full = section.empty() ? key : section + "." + key;

        auto it = setters().find(full);
        if (it == setters().end()) {
            diags.push_back({lineno, "unknown key '" + full + "'"});
            continue;
        }
        std::string err = it->second.apply(config, value);
        if (!err.empty())
            diags.push_back({lineno, full + ": " + err});
        else
            assigned_at[full] = lineno;
    }

    for (ConfigDiagnostic& d : validate_config(config)) {
        // attach the source line of the offending key when we have one
        for (const auto& [key, at] : assigned_at)
            if (d.message.rfind(key, 0) == 0) {
                d.line = at;
                break;
            }
        diags.push_back(d);
    }
    return config;
}

std::vector<ConfigDiagnostic> validate_config(const ScenarioConfig& c) {
    std::vector<ConfigDiagnostic> out;
    auto bad = [&](const std::string& msg) { out.push_back({0, msg}); };

    if (c.domain.dim != 1 && c.domain.dim != 2) bad("domain.dimension must be 1 or 2");
    for (int a = 0; a < std::min(c.domain.dim, 2); ++a) {
        if (c.domain.extent[static_cast<std::size_t>(a)] <= 0.0)
            bad("domain.extent must be positive");
        if (c.domain.cells[static_cast<std::size_t>(a)] < 2)
            bad("domain.cells must be at least 2 per axis");
    }
    long total = c.domain.cells[0] * (c.domain.dim == 2 ? c.domain.cells[1] : 1);
    if (total > c.domain.max_cells)
        bad("domain.cells: grid of " + std::to_string(total) + " cells exceeds max_cells " +
            std::to_string(c.domain.max_cells));

    if (c.kernel.family != "homogeneous" && c.kernel.family != "modulated")
        bad("kernel.family must be 'homogeneous' or 'modulated'");
    if (!(c.kernel.alpha > 1.0 && c.kernel.alpha < 2.0))
        bad("kernel.alpha = " + std::to_string(c.kernel.alpha) +
            " violates the admissible range (1,2), endpoints excluded");
    if (c.kernel.amplitude <= 0.0) bad("kernel.amplitude must be positive");
    if (c.kernel.family == "modulated") {
        if (c.kernel.modulation.empty())
            bad("kernel.modulation is required for the modulated family");
        else {
            try {
                Expression::parse(c.kernel.modulation);
            } catch (const Error& e) {
                bad(std::string("kernel.modulation: ") + e.what());
            }
        }
    }

    double a = -1.0, b = 1.0;
    if (c.potential.family == "logarithmic") {
        if (c.potential.T_abs <= 0.0) bad("potential.T_abs must be positive");
        if (c.potential.T_crit <= 0.0) bad("potential.T_crit must be positive");
    } else if (c.potential.family == "polynomial") {
        a = c.potential.a;
        b = c.potential.b;
        if (c.potential.coeffs.empty()) bad("potential.coeffs is required for polynomials");
        if (!(a < 0.0 && 0.0 < b)) bad("potential.a/b must satisfy a < 0 < b");
    } else {
        bad("potential.family must be 'logarithmic' or 'polynomial'");
    }
    if (c.potential.d_override && *c.potential.d_override < 0.0)
        bad("potential.d_override must be nonnegative");

    if (c.scheme.dt <= 0.0) bad("scheme.dt must be positive");
    if (c.scheme.theta_reg < 0.0) bad("scheme.theta_reg must be nonnegative");
    if (c.scheme.splitting != "convex_split" && c.scheme.splitting != "fully_implicit")
        bad("scheme.splitting must be 'convex_split' or 'fully_implicit'");
    if (c.scheme.newton_tol <= 0.0) bad("scheme.newton_tol must be positive");
    if (c.scheme.newton_max_iter < 1) bad("scheme.newton_max_iter must be >= 1");
    if (!(c.scheme.backtrack_factor > 0.0 && c.scheme.backtrack_factor < 1.0))
        bad("scheme.backtrack_factor must lie in (0,1)");
    if (c.scheme.feasibility_margin >= 0.25 * (b - a))
        bad("scheme.feasibility_margin must lie in (0, (b-a)/4)");

    if (c.initial.family != "constant_noise" && c.initial.family != "constant+noise" &&
        c.initial.family != "expression" && c.initial.family != "snapshot")
        bad("initial.family must be 'constant_noise', 'expression' or 'snapshot'");
    if (c.initial.family != "snapshot" && !(c.initial.mean > a && c.initial.mean < b))
        bad("initial.mean = " + std::to_string(c.initial.mean) +
            " must lie strictly inside the potential interval (" + std::to_string(a) + "," +
            std::to_string(b) + ")");
    if (c.initial.family == "expression") {
        if (c.initial.expression.empty())
            bad("initial.expression is required for the expression family");
        else {
            try {
                Expression::parse(c.initial.expression);
            } catch (const Error& e) {
                bad(std::string("initial.expression: ") + e.what());
            }
        }
    }
    if (c.initial.family == "snapshot" && c.initial.snapshot.empty())
        bad("initial.snapshot path is required for the snapshot family");
    if (c.initial.amplitude < 0.0) bad("initial.amplitude must be nonnegative");

    if (c.output.diagnostic_stride < 1) bad("output.diagnostic_stride must be >= 1");
    if (c.output.snapshot_stride < 0) bad("output.snapshot_stride must be >= 0");

    if (c.run.steps < 0 && c.run.t_final < 0.0) bad("run.t_final must be nonnegative");
    if (c.run.max_halvings < 0) bad("run.max_halvings must be nonnegative");

    if (c.op.refinement < 1) bad("operator.refinement must be >= 1");
    if (c.op.max_coupling_cells < 4) bad("operator.max_coupling_cells must be >= 4");
    return out;
}

ScenarioConfig load_config(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail_io("cannot read config file '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();

    std::vector<ConfigDiagnostic> diags;
    ScenarioConfig config = parse_config(ss.str(), diags);
    if (!diags.empty()) {
        std::string joined;
        for (const auto& d : diags) {
            if (!joined.empty()) joined += "\n";
            joined += path + (d.line > 0 ? ":" + std::to_string(d.line) : "") + ": " + d.message;
        }
        fail_invalid(joined);
    }
    return config;
}

void apply_override(ScenarioConfig& config, const std::string& dotted_key,
                    const std::string& value) {
    auto it = setters().find(dotted_key);
    if (it == setters().end()) fail_invalid("unknown config key '" + dotted_key + "'");
    std::string err = it->second.apply(config, value);
    if (!err.empty()) fail_invalid(dotted_key + ": " + err);
}

Grid make_grid(const ScenarioConfig& config) {
    return Grid(config.domain.dim, config.domain.extent, config.domain.cells,
                config.domain.max_cells);
}

Kernel make_kernel(const ScenarioConfig& config) {
    const auto& k = config.kernel;
    if (k.family == "homogeneous")
        return Kernel::homogeneous(config.domain.dim, k.alpha, k.amplitude);
    Expression g = Expression::parse(k.modulation);
    auto [lo, hi] = estimate_modulation_range(g, config.domain.dim, config.domain.extent);
    if (!(lo > 0.0))
        fail_invalid("kernel.modulation must be positive over the domain (sampled minimum " +
                     std::to_string(lo) + ")");
    return Kernel::modulated(config.domain.dim, k.alpha, k.amplitude, std::move(g),
                             k.amplitude * lo, k.amplitude * hi)
        .symmetrized();
}

Potential make_potential(const ScenarioConfig& config) {
    const auto& p = config.potential;
    if (p.family == "logarithmic")
        return Potential::logarithmic(p.T_abs, p.T_crit, p.d_override);
    return Potential::polynomial(p.coeffs, p.a, p.b, p.d_override);
}

SchemeConfig make_scheme(const ScenarioConfig& config) {
    SchemeConfig s;
    s.dt = config.scheme.dt;
    s.theta_reg = config.scheme.theta_reg;
    s.splitting = config.scheme.splitting == "fully_implicit" ? Splitting::fully_implicit
                                                              : Splitting::convex_split;
    s.newton.tol = config.scheme.newton_tol;
    s.newton.max_iter = config.scheme.newton_max_iter;
    s.newton.backtrack_factor = config.scheme.backtrack_factor;
    s.newton.feasibility_margin = config.scheme.feasibility_margin;
    return s;
}

State make_initial_state(const ScenarioConfig& config, const Grid& grid,
                         const Potential& potential,
                         std::optional<std::uint64_t> seed_override) {
    const auto& ic = config.initial;
    if (ic.family == "snapshot") {
        SnapshotData snap = read_snapshot(ic.snapshot);
        if (snap.dim != grid.dim() || snap.cells[0] != grid.cells(0) ||
            (grid.dim() == 2 && snap.cells[1] != grid.cells(1)))
            fail_invalid("initial.snapshot grid does not match the configured domain");
        return State::create(std::move(snap.payload), snap.time);
    }

    Vec raw(grid.size());
    if (ic.family == "expression") {
        Expression expr = Expression::parse(ic.expression);
        std::map<std::string, double> vars;
        for (int i = 0; i < grid.size(); ++i) {
            Point p = grid.center(i);
            vars = {{"x", p[0]}, {"y", p[1]}, {"x1", p[0]}, {"x2", p[1]}};
            raw[i] = expr.eval(vars);
        }
    } else {
        CounterRng rng{seed_override ? *seed_override : ic.seed};
        for (int i = 0; i < grid.size(); ++i) raw[i] = rng.sym(static_cast<std::uint64_t>(i));
    }

    Vec c = Vec::Constant(grid.size(), ic.mean) + ic.amplitude * project_mean_zero(raw);
    c.array() += ic.mean - c.mean(); // pin the mean exactly

    for (int i = 0; i < c.size(); ++i)
        if (!(c[i] > potential.a() && c[i] < potential.b()))
            fail_invalid("initial data leaves the potential interval (" +
                         std::to_string(potential.a()) + "," + std::to_string(potential.b()) +
                         "); reduce initial.amplitude");
    return State::create(std::move(c));
}

} // namespace nlch

#include "slpants/config.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

namespace slpants {

namespace {

// Minimal TOML-subset value: number, quoted string, or (nested) array, all on
// one line. That covers every RunConfig field while keeping files diffable.
struct Value {
    enum class Kind { Number, String, Array } kind = Kind::Number;
    double num = 0.0;
    std::string str;
    std::vector<Value> arr;
};

struct Cursor {
    const std::string& s;
    size_t pos = 0;
    const std::string& key;    // for error messages

    void skip_ws() {
        while (pos < s.size() && (s[pos] == ' ' || s[pos] == '\t')) ++pos;
    }
    [[noreturn]] void fail(const std::string& what) const {
        throw ConfigInvalid(key + ": " + what);
    }
};

Value parse_value(Cursor& c);

Value parse_array(Cursor& c) {
    Value v;
    v.kind = Value::Kind::Array;
    ++c.pos;    // consume '['
    c.skip_ws();
    if (c.pos < c.s.size() && c.s[c.pos] == ']') {
        ++c.pos;
        return v;
    }
    while (true) {
        v.arr.push_back(parse_value(c));
        c.skip_ws();
        if (c.pos >= c.s.size()) c.fail("unterminated array");
        if (c.s[c.pos] == ',') {
            ++c.pos;
            c.skip_ws();
            continue;
        }
        if (c.s[c.pos] == ']') {
            ++c.pos;
            return v;
        }
        c.fail("expected ',' or ']' in array");
    }
}

Value parse_value(Cursor& c) {
    c.skip_ws();
    if (c.pos >= c.s.size()) c.fail("missing value");
    const char ch = c.s[c.pos];
    if (ch == '[') return parse_array(c);
    if (ch == '"') {
        Value v;
        v.kind = Value::Kind::String;
        ++c.pos;
        while (c.pos < c.s.size() && c.s[c.pos] != '"') v.str += c.s[c.pos++];
        if (c.pos >= c.s.size()) c.fail("unterminated string");
        ++c.pos;
        return v;
    }
    const size_t start = c.pos;
    while (c.pos < c.s.size() && std::string_view("],# \t").find(c.s[c.pos]) == std::string_view::npos)
        ++c.pos;
    const std::string tok = c.s.substr(start, c.pos - start);
    Value v;
    v.kind = Value::Kind::Number;
    size_t used = 0;
    try {
        v.num = std::stod(tok, &used);
    } catch (const std::exception&) {
        c.fail("'" + tok + "' is not a number");
    }
    if (used != tok.size()) c.fail("'" + tok + "' is not a number");
    return v;
}

Value parse_single_value(const std::string& text, const std::string& key) {
    Cursor c{text, 0, key};
    Value v = parse_value(c);
    c.skip_ws();
    if (c.pos < c.s.size() && c.s[c.pos] != '#')
        c.fail("trailing characters after the value");
    return v;
}

double want_number(const Value& v, const std::string& key) {
    if (v.kind != Value::Kind::Number) throw ConfigInvalid(key + ": expected a number");
    return v.num;
}

int want_int(const Value& v, const std::string& key) {
    const double d = want_number(v, key);
    const int i = static_cast<int>(d);
    if (static_cast<double>(i) != d) throw ConfigInvalid(key + ": expected an integer");
    return i;
}

std::string want_string(const Value& v, const std::string& key) {
    if (v.kind != Value::Kind::String) throw ConfigInvalid(key + ": expected a quoted string");
    return v.str;
}

std::vector<double> want_number_array(const Value& v, const std::string& key) {
    if (v.kind != Value::Kind::Array) throw ConfigInvalid(key + ": expected an array");
    std::vector<double> out;
    for (const Value& e : v.arr) out.push_back(want_number(e, key));
    return out;
}

std::string trim(const std::string& s) {
    size_t a = s.find_first_not_of(" \t\r");
    size_t b = s.find_last_not_of(" \t\r");
    return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
}

// strips a trailing comment that is not inside a quoted string
std::string strip_comment(const std::string& line) {
    bool quoted = false;
    for (size_t i = 0; i < line.size(); ++i) {
        if (line[i] == '"') quoted = !quoted;
        if (line[i] == '#' && !quoted) return line.substr(0, i);
    }
    return line;
}

void apply_key(RunConfig& cfg, bool& h_seen, const std::string& section,
               const std::string& name, const Value& v) {
    const std::string key = section + "." + name;
    if (section == "polygon") {
        if (name == "points") {
            if (v.kind != Value::Kind::Array)
                throw ConfigInvalid(key + ": expected an array of [x, y] pairs");
            cfg.points.clear();
            for (const Value& p : v.arr) {
                if (p.kind != Value::Kind::Array || p.arr.size() != 2)
                    throw ConfigInvalid(key + ": each point must be an [x, y] pair");
                cfg.points.emplace_back(want_number(p.arr[0], key), want_number(p.arr[1], key));
            }
            return;
        }
        if (name == "A") {
            cfg.A = want_number(v, key);
            return;
        }
        if (name == "c") {
            cfg.c = want_number_array(v, key);
            return;
        }
    } else if (section == "grid") {
        if (name == "h") {
            cfg.h = want_number(v, key);
            h_seen = true;
            return;
        }
        if (name == "stencil_width") {
            cfg.stencil_width = want_int(v, key);
            return;
        }
    } else if (section == "solver") {
        if (name == "scheme") {
            const std::string s = want_string(v, key);
            if (s == "monotone")
                cfg.scheme = Scheme::MonotoneWideStencil;
            else if (s == "ninepoint")
                cfg.scheme = Scheme::NinePointNewton;
            else
                throw ConfigInvalid(key + ": expected \"monotone\" or \"ninepoint\", got \"" +
                                    s + "\"");
            return;
        }
        if (name == "tol") {
            cfg.tol = want_number(v, key);
            return;
        }
        if (name == "max_iter") {
            cfg.max_iter = want_int(v, key);
            return;
        }
        if (name == "damping") {
            cfg.damping = want_number(v, key);
            return;
        }
        if (name == "init") {
            const std::string s = want_string(v, key);
            if (s == "affine")
                cfg.init = SolveParams::Init::AffineFromTrace;
            else if (s == "coarse")
                cfg.init = SolveParams::Init::CoarseGrid;
            else
                throw ConfigInvalid(key + ": expected \"affine\" or \"coarse\", got \"" + s +
                                    "\"");
            return;
        }
    } else if (section == "asymptotics") {
        if (name == "mesh_m") {
            cfg.mesh_m = want_int(v, key);
            return;
        }
        if (name == "fit_window") {
            const auto w = want_number_array(v, key);
            if (w.size() != 2) throw ConfigInvalid(key + ": expected [u1_min, u1_max]");
            cfg.fit_window = std::make_pair(w[0], w[1]);
            return;
        }
        if (name == "threshold") {
            cfg.threshold = want_number(v, key);
            return;
        }
        if (name == "samples") {
            cfg.samples = want_int(v, key);
            return;
        }
    } else if (section == "family") {
        if (name == "members") {
            if (v.kind != Value::Kind::Array)
                throw ConfigInvalid(key + ": expected an array of c vectors");
            cfg.family_members.clear();
            for (const Value& m : v.arr) cfg.family_members.push_back(want_number_array(m, key));
            return;
        }
    } else if (section == "outputs") {
        if (name == "mesh_format") {
            cfg.mesh_format = parse_mesh_format(want_string(v, key));
            return;
        }
        if (name == "solution_csv") {
            cfg.solution_csv = want_string(v, key);
            return;
        }
        if (name == "mesh_path") {
            cfg.mesh_path = want_string(v, key);
            return;
        }
        if (name == "report") {
            cfg.report = want_string(v, key);
            return;
        }
    } else if (section == "hooks") {
        if (name == "constant_V") {
            cfg.constant_V = want_number(v, key);
            return;
        }
        if (name == "exact_boundary") {
            cfg.exact_boundary = want_string(v, key);
            return;
        }
    } else {
        throw ConfigInvalid("unknown section [" + section + "]");
    }
    throw ConfigInvalid("unknown key " + key);
}

void validate(RunConfig& cfg, bool h_seen) {
    if (cfg.points.size() < 3)
        throw ConfigInvalid("polygon.points: a convex polygon needs at least 3 vertices");
    try {
        const Polygon poly(cfg.points);   // convexity, orientation, duplicates
        (void)poly;
    } catch (const Error& e) {
        throw ConfigInvalid(std::string("polygon.points: ") + e.what());
    }
    if (!(cfg.A >= 0.0)) throw ConfigInvalid("polygon.A must be >= 0");

    if (cfg.c.empty()) cfg.c.assign(cfg.points.size(), 0.0);
    const auto check_c = [&](const std::vector<double>& c, const std::string& key) {
        if (c.size() != cfg.points.size())
            throw ConfigInvalid(key + " needs one offset per edge (" +
                                std::to_string(cfg.points.size()) + ")");
        double sum = 0.0, scale = 1.0;
        for (double x : c) {
            sum += x;
            scale = std::max(scale, std::abs(x));
        }
        if (std::abs(sum) > 1e-9 * scale)
            throw ConfigInvalid(key + " must sum to zero: the boundary trace only closes up "
                                      "when the edge offsets cancel");
    };
    check_c(cfg.c, "polygon.c");
    for (size_t k = 0; k < cfg.family_members.size(); ++k)
        check_c(cfg.family_members[k], "family.members[" + std::to_string(k) + "]");

    if (!h_seen) throw ConfigInvalid("grid.h is required");
    if (!(cfg.h > 0.0)) throw ConfigInvalid("grid.h must be positive");
    if (cfg.stencil_width < 1 || cfg.stencil_width > 8)
        throw ConfigInvalid("grid.stencil_width must lie in [1, 8]");

    if (!(cfg.tol > 0.0)) throw ConfigInvalid("solver.tol must be positive");
    if (cfg.max_iter < 1) throw ConfigInvalid("solver.max_iter must be >= 1");
    if (!(cfg.damping > 0.0) || cfg.damping > 1.0)
        throw ConfigInvalid("solver.damping must lie in (0, 1]");

    if (cfg.mesh_m < 16) throw ConfigInvalid("asymptotics.mesh_m must be >= 16");
    if (!(cfg.threshold > 0.0)) throw ConfigInvalid("asymptotics.threshold must be positive");
    if (cfg.samples < 4) throw ConfigInvalid("asymptotics.samples must be >= 4");
    if (cfg.fit_window) {
        const auto [lo, hi] = *cfg.fit_window;
        if (!(lo > 0.0) || !(hi > lo))
            throw ConfigInvalid("asymptotics.fit_window must satisfy 0 < u1_min < u1_max");
    }

    if (cfg.constant_V && !(*cfg.constant_V > 0.0))
        throw ConfigInvalid("hooks.constant_V must be positive");
    if (cfg.exact_boundary && *cfg.exact_boundary != "quadratic" &&
        *cfg.exact_boundary != "exp_r2")
        throw ConfigInvalid("hooks.exact_boundary: expected \"quadratic\" or \"exp_r2\", got \"" +
                            *cfg.exact_boundary + "\"");
    if (cfg.constant_V && cfg.exact_boundary && *cfg.exact_boundary == "exp_r2")
        throw ConfigInvalid("hooks.constant_V cannot combine with exact_boundary = \"exp_r2\": "
                            "that problem fixes its own coefficient");

    if (cfg.mesh_path.empty()) cfg.mesh_path = "mesh." + format_name(cfg.mesh_format);
}

} // namespace

RunConfig parse_config_text(const std::string& text) {
    RunConfig cfg;
    bool h_seen = false;
    std::string section;
    std::istringstream in(text);
    std::string raw;
    int lineno = 0;
    while (std::getline(in, raw)) {
        ++lineno;
        const std::string line = trim(strip_comment(raw));
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']')
                throw ConfigInvalid("line " + std::to_string(lineno) + ": malformed section header");
            section = trim(line.substr(1, line.size() - 2));
            static const char* known[] = {"polygon", "grid",    "solver", "asymptotics",
                                          "family",  "outputs", "hooks"};
            bool ok = false;
            for (const char* k : known) ok = ok || section == k;
            if (!ok) throw ConfigInvalid("unknown section [" + section + "]");
            continue;
        }
        const size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigInvalid("line " + std::to_string(lineno) + ": expected key = value");
        const std::string name = trim(line.substr(0, eq));
        if (name.empty())
            throw ConfigInvalid("line " + std::to_string(lineno) + ": empty key");
        if (section.empty())
            throw ConfigInvalid("key " + name + " appears before any [section]");
        const Value v = parse_single_value(trim(line.substr(eq + 1)), section + "." + name);
        apply_key(cfg, h_seen, section, name, v);
    }
    validate(cfg, h_seen);
    return cfg;
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoFailure("cannot read config file '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config_text(buf.str());
}

std::string scheme_name(Scheme scheme) {
    return scheme == Scheme::MonotoneWideStencil ? "monotone" : "ninepoint";
}

std::string init_name(SolveParams::Init init) {
    switch (init) {
        case SolveParams::Init::AffineFromTrace: return "affine";
        case SolveParams::Init::CoarseGrid: return "coarse";
        case SolveParams::Init::UserField: return "user";
    }
    return "affine";
}

std::string format_name(MeshFormat format) {
    switch (format) {
        case MeshFormat::Vtk: return "vtk";
        case MeshFormat::Obj: return "obj";
        case MeshFormat::Csv: return "csv";
    }
    return "vtk";
}

} // namespace slpants

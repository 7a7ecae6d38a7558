#include "tsdelay/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <utility>
#include <vector>

#include "tsdelay/expr.hpp"
#include "tsdelay/solver.hpp"

namespace tsdelay {

namespace {

[[noreturn]] void parse_fail(int line, const std::string& msg) {
    fail(ErrorCode::Parse, "line " + std::to_string(line) + ": " + msg);
}

std::string trim(const std::string& s) {
    std::size_t a = 0;
    std::size_t b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
    return s.substr(a, b - a);
}

struct RawValue {
    std::string text;
    int line = 0;
};

using Section = std::map<std::string, RawValue>;

struct RawConfig {
    std::map<std::string, Section> sections;
    std::map<std::string, int> section_lines;
};

const std::set<std::string>& known_sections() {
    static const std::set<std::string> s{"timescale", "problem",   "delays",  "linear",
                                         "nonlinear", "history",   "envelope", "solver"};
    return s;
}

RawConfig tokenize(const std::string& text) {
    RawConfig raw;
    std::istringstream in(text);
    std::string line;
    std::string current;
    int number = 0;
    while (std::getline(in, line)) {
        ++number;
        const std::size_t hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[' && line.back() == ']') {
            current = trim(line.substr(1, line.size() - 2));
            if (!known_sections().count(current))
                parse_fail(number, "unknown section [" + current + "]");
            if (raw.sections.count(current))
                parse_fail(number, "duplicate section [" + current + "]");
            raw.sections[current];
            raw.section_lines[current] = number;
            continue;
        }
        const std::size_t eq = line.find('=');
        if (eq == std::string::npos) parse_fail(number, "expected key = value");
        if (current.empty()) parse_fail(number, "key outside any section");
        const std::string key = trim(line.substr(0, eq));
        if (key.empty()) parse_fail(number, "empty key");
        Section& sec = raw.sections[current];
        if (sec.count(key))
            parse_fail(number, "duplicate key '" + key + "' in [" + current + "]");
        sec[key] = RawValue{trim(line.substr(eq + 1)), number};
    }
    return raw;
}

/// Splits on sep at parenthesis depth zero, so commas inside min(...)/max(...)
/// stay attached to their call.
std::vector<std::string> split_depth0(const std::string& s, char sep, int line) {
    std::vector<std::string> out;
    int depth = 0;
    std::size_t start = 0;
    for (std::size_t i = 0; i < s.size(); ++i) {
        const char c = s[i];
        if (c == '(') ++depth;
        if (c == ')') {
            --depth;
            if (depth < 0) parse_fail(line, "unbalanced ')'");
        }
        if (c == sep && depth == 0) {
            out.push_back(trim(s.substr(start, i - start)));
            start = i + 1;
        }
    }
    if (depth != 0) parse_fail(line, "unbalanced '('");
    out.push_back(trim(s.substr(start)));
    return out;
}

ExprPtr parse_checked(const std::string& text, int line, const std::set<std::string>& allowed,
                      const std::string& what) {
    if (text.empty()) parse_fail(line, what + ": empty expression");
    ExprPtr e;
    try {
        e = parse_expression(text);
    } catch (const TsError& err) {
        parse_fail(line, what + ": " + err.what());
    }
    std::set<std::string> vars;
    collect_variables(*e, vars);
    for (const std::string& v : vars)
        if (!allowed.count(v))
            parse_fail(line, what + ": unknown variable '" + v + "'");
    return e;
}

double const_value(const std::string& text, int line, const std::string& what) {
    const ExprPtr e = parse_checked(text, line, {}, what);
    try {
        return eval_expression(*e, {});
    } catch (const TsError& err) {
        parse_fail(line, what + ": " + err.what());
    }
}

int int_value(const std::string& text, int line, const std::string& what) {
    const double v = const_value(text, line, what);
    const double r = std::round(v);
    if (std::fabs(v - r) > 1e-9)
        parse_fail(line, what + ": expected an integer, got " + text);
    return static_cast<int>(r);
}

ScalarFn scalar_fn(const ExprPtr& e) {
    return [e](double t) { return eval_expression(*e, {{"t", t}}); };
}

std::vector<Component> parse_components(const std::string& text, int line) {
    std::vector<Component> comps;
    std::size_t i = 0;
    auto skip_ws = [&] {
        while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
    };
    skip_ws();
    while (i < text.size()) {
        if (text[i] == '[') {
            const std::size_t close = text.find(']', i);
            if (close == std::string::npos) parse_fail(line, "unterminated interval component");
            const auto parts = split_depth0(text.substr(i + 1, close - i - 1), ',', line);
            if (parts.size() != 2)
                parse_fail(line, "interval component needs exactly two bounds");
            const double a = const_value(parts[0], line, "interval bound");
            const double b = const_value(parts[1], line, "interval bound");
            comps.push_back(Component::interval(a, b));
            i = close + 1;
        } else if (text[i] == '{') {
            const std::size_t close = text.find('}', i);
            if (close == std::string::npos) parse_fail(line, "unterminated point component");
            comps.push_back(
                Component::point(const_value(text.substr(i + 1, close - i - 1), line, "point")));
            i = close + 1;
        } else if (text.compare(i, 8, "integers") == 0) {
            i += 8;
            skip_ws();
            if (i >= text.size() || text[i] != '(')
                parse_fail(line, "integers needs (lo, hi)");
            const std::size_t close = text.find(')', i);
            if (close == std::string::npos) parse_fail(line, "unterminated integers(...)");
            const auto parts = split_depth0(text.substr(i + 1, close - i - 1), ',', line);
            if (parts.size() != 2) parse_fail(line, "integers needs exactly two bounds");
            const int lo = int_value(parts[0], line, "integers bound");
            const int hi = int_value(parts[1], line, "integers bound");
            if (lo > hi) parse_fail(line, "integers(lo, hi) needs lo <= hi");
            for (int k = lo; k <= hi; ++k) comps.push_back(Component::point(k));
            i = close + 1;
        } else {
            parse_fail(line, std::string("unrecognized component starting at '") + text[i] + "'");
        }
        skip_ws();
    }
    if (comps.empty()) parse_fail(line, "components list is empty");
    return comps;
}

const RawValue& require_key(const Section& sec, const std::string& name, const std::string& where,
                            int section_line) {
    auto it = sec.find(name);
    if (it == sec.end())
        parse_fail(section_line, "missing key '" + name + "' in [" + where + "]");
    return it->second;
}

void reject_unknown_keys(const Section& sec, const std::string& where,
                         const std::function<bool(const std::string&)>& recognized) {
    for (const auto& [key, value] : sec)
        if (!recognized(key))
            parse_fail(value.line, "unknown key '" + key + "' in [" + where + "]");
}

/// Key names tau1..tauN must be present contiguously from 1; returns N.
int count_delays(const Section& delays, int section_line) {
    int n = 0;
    while (delays.count("tau" + std::to_string(n + 1))) ++n;
    if (n == 0) parse_fail(section_line, "need at least tau1 in [delays]");
    reject_unknown_keys(delays, "delays", [n](const std::string& key) {
        if (key.rfind("tau", 0) != 0) return false;
        for (int k = 1; k <= n; ++k)
            if (key == "tau" + std::to_string(k)) return true;
        return false;
    });
    return n;
}

MatrixFn matrix_fn(const std::string& text, int line, int d, const std::string& what) {
    const auto rows = split_depth0(text, ';', line);
    if (static_cast<int>(rows.size()) != d)
        parse_fail(line, what + ": expected " + std::to_string(d) + " row(s), got " +
                             std::to_string(rows.size()));
    std::vector<ExprPtr> entries;
    entries.reserve(static_cast<std::size_t>(d * d));
    for (const std::string& row : rows) {
        const auto cols = split_depth0(row, ',', line);
        if (static_cast<int>(cols.size()) != d)
            parse_fail(line, what + ": expected " + std::to_string(d) + " entr(ies) per row, got " +
                                 std::to_string(cols.size()));
        for (const std::string& cell : cols)
            entries.push_back(parse_checked(cell, line, {"t"}, what));
    }
    return [entries, d](double t) {
        Vec out(static_cast<std::size_t>(d * d));
        for (std::size_t k = 0; k < entries.size(); ++k)
            out[k] = eval_expression(*entries[k], {{"t", t}});
        return out;
    };
}

VectorFn vector_fn(const std::string& text, int line, int d, const std::string& what) {
    const auto rows = split_depth0(text, ';', line);
    if (static_cast<int>(rows.size()) != d)
        parse_fail(line, what + ": expected " + std::to_string(d) + " component(s), got " +
                             std::to_string(rows.size()));
    std::vector<ExprPtr> entries;
    entries.reserve(rows.size());
    for (const std::string& row : rows)
        entries.push_back(parse_checked(row, line, {"t"}, what));
    return [entries, d](double t) {
        Vec out(static_cast<std::size_t>(d));
        for (std::size_t k = 0; k < entries.size(); ++k)
            out[k] = eval_expression(*entries[k], {{"t", t}});
        return out;
    };
}

GridFunction parse_history(const Section& history, int section_line, const TimeScale& ts,
                           double alpha, double beta, int d) {
    reject_unknown_keys(history, "history", [](const std::string& key) {
        return key == "phi" || key == "phi_table";
    });
    const bool has_expr = history.count("phi") != 0;
    const bool has_table = history.count("phi_table") != 0;
    if (has_expr == has_table)
        parse_fail(section_line, "[history] needs exactly one of phi or phi_table");

    const ValueShape shape = d == 1 ? ValueShape::scalar() : ValueShape::vector(d);
    const std::vector<double> pts = ts.grid(alpha, beta);

    if (has_expr) {
        const RawValue& raw = history.at("phi");
        const auto rows = split_depth0(raw.text, ';', raw.line);
        if (static_cast<int>(rows.size()) != d)
            parse_fail(raw.line, "phi: expected " + std::to_string(d) + " component(s), got " +
                                     std::to_string(rows.size()));
        std::vector<ExprPtr> entries;
        for (const std::string& row : rows)
            entries.push_back(parse_checked(row, raw.line, {"t"}, "phi"));
        std::vector<Vec> values;
        values.reserve(pts.size());
        for (double t : pts) {
            Vec v(static_cast<std::size_t>(d));
            for (int r = 0; r < d; ++r)
                v[static_cast<std::size_t>(r)] =
                    eval_expression(*entries[static_cast<std::size_t>(r)], {{"t", t}});
            values.push_back(std::move(v));
        }
        return GridFunction(ts, alpha, beta, shape, std::move(values));
    }

    const RawValue& raw = history.at("phi_table");
    std::vector<Vec> values(pts.size());
    std::vector<bool> seen(pts.size(), false);
    for (const std::string& entry : split_depth0(raw.text, ';', raw.line)) {
        const std::size_t colon = entry.find(':');
        if (colon == std::string::npos)
            parse_fail(raw.line, "phi_table entry needs the form 'time: v1, v2, ...'");
        const double t = const_value(trim(entry.substr(0, colon)), raw.line, "phi_table time");
        auto it = std::lower_bound(pts.begin(), pts.end(), t - kLookupTol);
        if (it == pts.end() || std::fabs(*it - t) > kLookupTol)
            parse_fail(raw.line, "phi_table time " + trim(entry.substr(0, colon)) +
                                     " is not a grid point of [alpha, beta]");
        const std::size_t idx = static_cast<std::size_t>(it - pts.begin());
        if (seen[idx])
            parse_fail(raw.line, "phi_table lists " + trim(entry.substr(0, colon)) + " twice");
        const auto cells = split_depth0(entry.substr(colon + 1), ',', raw.line);
        if (static_cast<int>(cells.size()) != d)
            parse_fail(raw.line, "phi_table: expected " + std::to_string(d) +
                                     " value(s) per entry, got " + std::to_string(cells.size()));
        Vec v(static_cast<std::size_t>(d));
        for (int r = 0; r < d; ++r)
            v[static_cast<std::size_t>(r)] =
                const_value(cells[static_cast<std::size_t>(r)], raw.line, "phi_table value");
        values[idx] = std::move(v);
        seen[idx] = true;
    }
    for (std::size_t k = 0; k < pts.size(); ++k)
        if (!seen[k]) {
            std::ostringstream os;
            os.precision(17);
            os << pts[k];
            parse_fail(raw.line, "phi_table misses grid point " + os.str());
        }
    return GridFunction(ts, alpha, beta, shape, std::move(values));
}

} // namespace

ProblemSpec parse_config(const std::string& text) {
    RawConfig raw = tokenize(text);

    for (const char* name : {"timescale", "problem", "delays", "history"})
        if (!raw.sections.count(name))
            fail(ErrorCode::Parse, std::string("missing section [") + name + "]");

    const Section& ts_sec = raw.sections.at("timescale");
    const int ts_line = raw.section_lines.at("timescale");
    reject_unknown_keys(ts_sec, "timescale", [](const std::string& key) {
        return key == "components" || key == "dense_step";
    });
    const RawValue& comp_raw = require_key(ts_sec, "components", "timescale", ts_line);
    std::vector<Component> comps = parse_components(comp_raw.text, comp_raw.line);
    double dense_step = 1.0;
    if (auto it = ts_sec.find("dense_step"); it != ts_sec.end()) {
        dense_step = const_value(it->second.text, it->second.line, "dense_step");
        if (!(dense_step > 0.0)) parse_fail(it->second.line, "dense_step must be positive");
    } else {
        for (const Component& c : comps)
            if (!c.is_point())
                parse_fail(comp_raw.line,
                           "dense_step is required when components include an interval");
    }
    const TimeScale ts(std::move(comps), dense_step);

    const Section& prob = raw.sections.at("problem");
    const int prob_line = raw.section_lines.at("problem");
    reject_unknown_keys(prob, "problem", [](const std::string& key) {
        return key == "kind" || key == "dim" || key == "alpha" || key == "beta" || key == "gamma";
    });
    const RawValue& kind_raw = require_key(prob, "kind", "problem", prob_line);
    ProblemKind kind;
    if (kind_raw.text == "linear")
        kind = ProblemKind::Linear;
    else if (kind_raw.text == "nonlinear")
        kind = ProblemKind::Nonlinear;
    else
        parse_fail(kind_raw.line, "kind must be linear or nonlinear");
    const RawValue& dim_raw = require_key(prob, "dim", "problem", prob_line);
    const int dim = int_value(dim_raw.text, dim_raw.line, "dim");
    if (dim < 1) parse_fail(dim_raw.line, "dim must be at least 1");
    const RawValue& alpha_raw = require_key(prob, "alpha", "problem", prob_line);
    const double alpha = const_value(alpha_raw.text, alpha_raw.line, "alpha");
    const RawValue& beta_raw = require_key(prob, "beta", "problem", prob_line);
    const double beta = const_value(beta_raw.text, beta_raw.line, "beta");
    const RawValue& gamma_raw = require_key(prob, "gamma", "problem", prob_line);
    const double gamma = const_value(gamma_raw.text, gamma_raw.line, "gamma");

    const Section& delays_sec = raw.sections.at("delays");
    const int n = count_delays(delays_sec, raw.section_lines.at("delays"));
    std::vector<DelayFn> delays;
    delays.reserve(static_cast<std::size_t>(n));
    for (int i = 1; i <= n; ++i) {
        const RawValue& d = delays_sec.at("tau" + std::to_string(i));
        const ExprPtr e = parse_checked(d.text, d.line, {"t"}, "tau" + std::to_string(i));
        delays.push_back(scalar_fn(e));
    }

    ProblemSpec spec;
    spec.kind = kind;

    const Section* solver_sec = nullptr;
    if (raw.sections.count("solver")) {
        solver_sec = &raw.sections.at("solver");
        reject_unknown_keys(*solver_sec, "solver", [](const std::string& key) {
            return key == "tol" || key == "max_iter" || key == "epsilon" || key == "L" ||
                   key == "M" || key == "verify_tol";
        });
        if (auto it = solver_sec->find("tol"); it != solver_sec->end()) {
            spec.solver.tol = const_value(it->second.text, it->second.line, "tol");
            if (!(spec.solver.tol > 0.0)) parse_fail(it->second.line, "tol must be positive");
        }
        if (auto it = solver_sec->find("max_iter"); it != solver_sec->end()) {
            spec.solver.max_iter = int_value(it->second.text, it->second.line, "max_iter");
            if (spec.solver.max_iter < 1)
                parse_fail(it->second.line, "max_iter must be at least 1");
        }
        if (auto it = solver_sec->find("epsilon"); it != solver_sec->end()) {
            spec.solver.epsilon = const_value(it->second.text, it->second.line, "epsilon");
            if (!(spec.solver.epsilon > 0.0))
                parse_fail(it->second.line, "epsilon must be positive");
        }
        if (auto it = solver_sec->find("L"); it != solver_sec->end()) {
            spec.solver.lipschitz = const_value(it->second.text, it->second.line, "L");
            if (*spec.solver.lipschitz < 0.0)
                parse_fail(it->second.line, "L must be nonnegative");
        }
        if (auto it = solver_sec->find("M"); it != solver_sec->end()) {
            spec.solver.bound = const_value(it->second.text, it->second.line, "M");
            if (!(*spec.solver.bound > 0.0)) parse_fail(it->second.line, "M must be positive");
        }
        if (auto it = solver_sec->find("verify_tol"); it != solver_sec->end()) {
            spec.solver.verify_tol = const_value(it->second.text, it->second.line, "verify_tol");
            if (!(spec.solver.verify_tol > 0.0))
                parse_fail(it->second.line, "verify_tol must be positive");
        }
    }

    GridFunction history =
        parse_history(raw.sections.at("history"), raw.section_lines.at("history"), ts, alpha,
                      beta, dim);

    if (kind == ProblemKind::Linear) {
        if (raw.sections.count("nonlinear"))
            parse_fail(raw.section_lines.at("nonlinear"),
                       "[nonlinear] does not apply to a linear problem");
        if (raw.sections.count("envelope"))
            parse_fail(raw.section_lines.at("envelope"),
                       "[envelope] does not apply to a linear problem");
        if (!raw.sections.count("linear"))
            fail(ErrorCode::Parse, "missing section [linear]");
        const Section& lin = raw.sections.at("linear");
        const int lin_line = raw.section_lines.at("linear");
        reject_unknown_keys(lin, "linear", [n](const std::string& key) {
            if (key == "q") return true;
            for (int k = 1; k <= n; ++k)
                if (key == "p" + std::to_string(k)) return true;
            return false;
        });
        std::vector<MatrixFn> coeffs;
        coeffs.reserve(static_cast<std::size_t>(n));
        for (int i = 1; i <= n; ++i) {
            const RawValue& p = require_key(lin, "p" + std::to_string(i), "linear", lin_line);
            coeffs.push_back(matrix_fn(p.text, p.line, dim, "p" + std::to_string(i)));
        }
        VectorFn forcing;
        if (auto it = lin.find("q"); it != lin.end()) {
            forcing = vector_fn(it->second.text, it->second.line, dim, "q");
        } else {
            forcing = [dim](double) { return Vec(static_cast<std::size_t>(dim), 0.0); };
        }
        LinearDelaySystem sys{ts,     alpha,   beta,
                              gamma,  dim,     n,
                              std::move(coeffs), std::move(forcing),
                              std::move(delays), std::move(history)};
        validate(sys);
        spec.linear = std::move(sys);
        return spec;
    }

    if (raw.sections.count("linear"))
        parse_fail(raw.section_lines.at("linear"),
                   "[linear] does not apply to a nonlinear problem");
    if (!raw.sections.count("nonlinear")) fail(ErrorCode::Parse, "missing section [nonlinear]");
    if (dim != 1)
        parse_fail(dim_raw.line, "nonlinear problems support dim = 1 in config form");
    const Section& nl = raw.sections.at("nonlinear");
    const int nl_line = raw.section_lines.at("nonlinear");
    reject_unknown_keys(nl, "nonlinear", [](const std::string& key) { return key == "f"; });
    const RawValue& f_raw = require_key(nl, "f", "nonlinear", nl_line);
    std::set<std::string> allowed{"t"};
    std::vector<std::string> unames;
    for (int i = 1; i <= n; ++i) {
        unames.push_back("u" + std::to_string(i));
        allowed.insert(unames.back());
    }
    const ExprPtr f_expr = parse_checked(f_raw.text, f_raw.line, allowed, "f");
    RhsFn rhs = [f_expr, unames](double t, const std::vector<Vec>& args) {
        std::map<std::string, double> bindings{{"t", t}};
        for (std::size_t i = 0; i < unames.size(); ++i) bindings[unames[i]] = args[i][0];
        return Vec{eval_expression(*f_expr, bindings)};
    };

    DelayIVP ivp{ts,
                 alpha,
                 beta,
                 gamma,
                 dim,
                 n,
                 std::move(rhs),
                 std::move(delays),
                 std::move(history),
                 spec.solver.lipschitz,
                 spec.solver.bound,
                 spec.solver.epsilon};
    validate(ivp);
    spec.nonlinear = std::move(ivp);

    if (raw.sections.count("envelope")) {
        const Section& env = raw.sections.at("envelope");
        const int env_line = raw.section_lines.at("envelope");
        reject_unknown_keys(env, "envelope", [n](const std::string& key) {
            if (key == "q") return true;
            for (int k = 1; k <= n; ++k)
                if (key == "p" + std::to_string(k)) return true;
            return false;
        });
        GrowthEnvelope envelope;
        for (int i = 1; i <= n; ++i) {
            const RawValue& p = require_key(env, "p" + std::to_string(i), "envelope", env_line);
            envelope.p.push_back(scalar_fn(parse_checked(p.text, p.line, {"t"},
                                                         "envelope p" + std::to_string(i))));
        }
        const RawValue& q = require_key(env, "q", "envelope", env_line);
        envelope.q = scalar_fn(parse_checked(q.text, q.line, {"t"}, "envelope q"));
        spec.envelope = std::move(envelope);
    }
    return spec;
}

ProblemSpec load_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) fail(ErrorCode::Parse, "cannot read config file '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str());
}

} // namespace tsdelay

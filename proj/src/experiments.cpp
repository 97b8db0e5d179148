#include "caloric/experiments.hpp"

#include "caloric/bernstein.hpp"
#include "caloric/lp_norms.hpp"
#include "caloric/pde_solver.hpp"
#include "caloric/report.hpp"
#include "caloric/semigroup.hpp"
#include "caloric/smoothing_lab.hpp"
#include "caloric/spectral_grid.hpp"
#include "caloric/subordinator.hpp"

#include "json.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <numbers>
#include <set>
#include <sstream>

namespace caloric::experiments {

using nlohmann::json;

ConfigError::ConfigError(const std::string& what, std::string pointer, std::size_t line)
    : Error(what), pointer_(std::move(pointer)), line_(line) {}

bool ExperimentResult::passed() const noexcept {
    return error.empty() && std::all_of(gates.begin(), gates.end(), [](const Gate& g) { return g.passed; });
}

bool RunReport::passed() const noexcept {
    return std::all_of(results.begin(), results.end(), [](const auto& r) { return r.passed(); });
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot read " + path.string());
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

// ---------------------------------------------------------------------------------------------
// Line index

namespace {

std::string escape_token(const std::string& key) {
    std::string out;
    for (char c : key) {
        if (c == '~') {
            out += "~0";
        } else if (c == '/') {
            out += "~1";
        } else {
            out += c;
        }
    }
    return out;
}

struct Frame {
    bool array = false;
    std::size_t index = 0;
    std::string key;
    bool expecting_key = true;
};

}  // namespace

std::map<std::string, std::size_t> line_index(const std::string& text) {
    std::map<std::string, std::size_t> index;
    std::vector<Frame> stack;
    std::size_t line = 1;
    auto pointer = [&stack] {
        std::string out;
        for (const auto& f : stack) out += "/" + (f.array ? std::to_string(f.index) : escape_token(f.key));
        return out;
    };
    auto value_begins = [&] { index.emplace(pointer(), line); };
    std::size_t i = 0;
    while (i < text.size()) {
        const char c = text[i];
        if (c == '\n') {
            ++line;
            ++i;
        } else if (c == ' ' || c == '\t' || c == '\r' || c == ':') {
            ++i;
        } else if (c == '{' || c == '[') {
            value_begins();
            stack.push_back(Frame{c == '[', 0, {}, true});
            ++i;
        } else if (c == '}' || c == ']') {
            if (!stack.empty()) stack.pop_back();
            ++i;
        } else if (c == ',') {
            if (!stack.empty()) {
                if (stack.back().array) {
                    ++stack.back().index;
                } else {
                    stack.back().expecting_key = true;
                }
            }
            ++i;
        } else if (c == '"') {
            std::string s;
            ++i;
            while (i < text.size() && text[i] != '"') {
                if (text[i] == '\\' && i + 1 < text.size()) ++i;
                s += text[i++];
            }
            ++i;
            if (!stack.empty() && !stack.back().array && stack.back().expecting_key) {
                stack.back().key = s;
                stack.back().expecting_key = false;
            } else {
                value_begins();
            }
        } else {
            value_begins();
            while (i < text.size() && std::string_view(",}] \t\r\n").find(text[i]) == std::string_view::npos) ++i;
        }
    }
    return index;
}

// ---------------------------------------------------------------------------------------------
// Parameter access with located diagnostics

namespace {

using LineIndex = std::map<std::string, std::size_t>;

class Params {
  public:
    Params(const json& value, std::string pointer, const LineIndex& lines)
        : value_(&value), pointer_(std::move(pointer)), lines_(&lines) {
        if (!value.is_object()) fail_here("expected an object");
    }

    const std::string& pointer() const noexcept { return pointer_; }
    bool has(const std::string& key) const { return value_->contains(key); }
    bool has_object(const std::string& key) const { return has(key) && value_->at(key).is_object(); }
    void touch(const std::string& key) { used_.insert(key); }

    [[noreturn]] void fail(const std::string& key, const std::string& message) const {
        throw_at(pointer_ + "/" + escape_token(key), message);
    }
    [[noreturn]] void fail_here(const std::string& message) const { throw_at(pointer_, message); }

    double number(const std::string& key, std::optional<double> fallback = std::nullopt) {
        const json* v = lookup(key);
        if (!v) return require(key, fallback);
        return to_number(*v, key);
    }

    double positive(const std::string& key, std::optional<double> fallback = std::nullopt) {
        const double v = number(key, fallback);
        if (!(v > 0.0)) fail(key, "must be positive");
        return v;
    }

    int integer(const std::string& key, std::optional<int> fallback = std::nullopt) {
        const json* v = lookup(key);
        if (!v) return require(key, fallback);
        if (!v->is_number_integer()) fail(key, "expected an integer");
        return v->get<int>();
    }

    std::size_t count(const std::string& key, std::optional<std::size_t> fallback = std::nullopt) {
        const json* v = lookup(key);
        if (!v) return require(key, fallback);
        if (!v->is_number_integer() || v->get<long long>() < 0) fail(key, "expected a non-negative integer");
        return v->get<std::size_t>();
    }

    std::uint64_t seed(const std::string& key = "seed") {
        const json* v = lookup(key);
        if (!v) fail(key, "a seed is required because this experiment draws random numbers");
        if (!v->is_number_unsigned()) fail(key, "seed must be a non-negative integer");
        return v->get<std::uint64_t>();
    }

    bool flag(const std::string& key, bool fallback) {
        const json* v = lookup(key);
        if (!v) return fallback;
        if (!v->is_boolean()) fail(key, "expected true or false");
        return v->get<bool>();
    }

    std::string text(const std::string& key, std::optional<std::string> fallback = std::nullopt) {
        const json* v = lookup(key);
        if (!v) return require(key, fallback);
        if (!v->is_string()) fail(key, "expected a string");
        return v->get<std::string>();
    }

    std::vector<double> numbers(const std::string& key, std::optional<std::vector<double>> fallback = std::nullopt) {
        const json* v = lookup(key);
        if (!v) return require(key, fallback);
        if (!v->is_array() || v->empty()) fail(key, "expected a non-empty array of numbers");
        std::vector<double> out;
        for (std::size_t i = 0; i < v->size(); ++i) out.push_back(to_number((*v)[i], key + "/" + std::to_string(i)));
        return out;
    }

    /// Every entry in (lo, hi), open at both ends.
    std::vector<double> numbers_in(const std::string& key, double lo, double hi,
                                   std::optional<std::vector<double>> fallback = std::nullopt) {
        auto out = numbers(key, std::move(fallback));
        for (std::size_t i = 0; i < out.size(); ++i) {
            if (!(out[i] > lo && out[i] < hi)) {
                throw_at(pointer_ + "/" + escape_token(key) + "/" + std::to_string(i),
                         "must lie in (" + report::format_double(lo) + ", " + report::format_double(hi) + ")");
            }
        }
        return out;
    }

    Params child(const std::string& key) {
        const json* v = lookup(key);
        if (!v) fail(key, "missing required object");
        return Params(*v, pointer_ + "/" + escape_token(key), *lines_);
    }

    std::optional<Params> optional_child(const std::string& key) {
        if (!has(key)) return std::nullopt;
        return child(key);
    }

    std::vector<Params> children(const std::string& key) {
        const json* v = lookup(key);
        if (!v) fail(key, "missing required array");
        if (!v->is_array() || v->empty()) fail(key, "expected a non-empty array of objects");
        std::vector<Params> out;
        for (std::size_t i = 0; i < v->size(); ++i) {
            out.emplace_back((*v)[i], pointer_ + "/" + escape_token(key) + "/" + std::to_string(i), *lines_);
        }
        return out;
    }

    /// Numeric members other than `skip`, for Bernstein parameter maps.
    std::map<std::string, double, std::less<>> numeric_members(const std::set<std::string>& skip) {
        std::map<std::string, double, std::less<>> out;
        for (const auto& [key, v] : value_->items()) {
            if (skip.count(key)) continue;
            used_.insert(key);
            out[key] = to_number(v, key);
        }
        return out;
    }

    /// Rejects keys that no accessor asked for.
    void finish() const {
        for (const auto& [key, v] : value_->items()) {
            if (!used_.count(key)) fail(key, "unknown key '" + key + "'");
        }
    }

  private:
    const json* lookup(const std::string& key) {
        used_.insert(key);
        auto it = value_->find(key);
        return it == value_->end() ? nullptr : &*it;
    }

    template <typename T>
    T require(const std::string& key, const std::optional<T>& fallback) const {
        if (!fallback) fail(key, "missing required key '" + key + "'");
        return *fallback;
    }

    double to_number(const json& v, const std::string& key) const {
        if (v.is_number()) return v.get<double>();
        if (v.is_string()) {
            const auto s = v.get<std::string>();
            if (s == "inf" || s == "infinity") return infinity;
        }
        fail(key, "expected a number (or \"inf\")");
    }

    [[noreturn]] void throw_at(const std::string& pointer, const std::string& message) const {
        // The closest ancestor that has a recorded line locates missing keys.
        std::string probe = pointer;
        while (true) {
            auto it = lines_->find(probe);
            if (it != lines_->end()) throw ConfigError(pointer + ": " + message, pointer, it->second);
            if (probe.empty()) break;
            probe = probe.substr(0, probe.rfind('/'));
        }
        throw ConfigError(pointer + ": " + message, pointer, 0);
    }

    const json* value_;
    std::string pointer_;
    const LineIndex* lines_;
    std::set<std::string> used_;
};

// ---------------------------------------------------------------------------------------------
// Shared spec parsers

TorusGrid parse_grid(Params p) {
    const int dim = p.integer("dim", 1);
    const auto n = p.count("N", 4096);
    if (p.has("L") && p.has("L_over_pi")) p.fail("L", "give either L or L_over_pi, not both");
    const double half = p.has("L") ? p.positive("L") : std::numbers::pi * p.positive("L_over_pi", 64.0);
    p.finish();
    try {
        return TorusGrid(dim, n, half);
    } catch (const Error& e) {
        p.fail_here(e.what());
    }
}

TorusGrid grid_or_default(Params& p, const std::string& key = "grid") {
    if (auto g = p.optional_child(key)) return parse_grid(*g);
    return TorusGrid(1, 4096, 64.0 * std::numbers::pi);
}

BernsteinFunction parse_bernstein(Params p) {
    const auto family = p.text("family");
    const auto params = p.numeric_members({"family"});
    p.finish();
    try {
        return bernstein::from_spec(family, params);
    } catch (const Error& e) {
        p.fail_here(e.what());
    }
}

SemigroupFamily parse_semigroup(Params p) {
    const auto kind = p.text("kind");
    try {
        if (kind == "gauss_weierstrass") {
            p.finish();
            return SemigroupFamily::gauss_weierstrass();
        }
        if (kind == "subordinated") {
            auto f = parse_bernstein(p.child("f"));
            p.finish();
            return SemigroupFamily::subordinated(std::move(f));
        }
        if (kind == "generalized_power") {
            const double beta = p.positive("beta");
            p.finish();
            return SemigroupFamily::generalized_power(beta);
        }
    } catch (const ConfigError&) {
        throw;
    } catch (const Error& e) {
        p.fail_here(e.what());
    }
    p.fail("kind", "unknown semigroup kind '" + kind + "' (gauss_weierstrass, subordinated, generalized_power)");
}

NormSpec parse_norm(Params p) {
    NormSpec spec;
    const auto scale = p.text("scale");
    if (scale == "B") {
        spec.scale = Scale::besov;
    } else if (scale == "F") {
        spec.scale = Scale::triebel;
    } else {
        p.fail("scale", "scale must be \"B\" or \"F\"");
    }
    spec.s = p.number("s", 0.0);
    spec.p = p.number("p", 2.0);
    spec.q = p.number("q", 2.0);
    p.finish();
    try {
        spec.validate();
    } catch (const Error& e) {
        p.fail_here(e.what());
    }
    return spec;
}

/// {"type": gaussian | bump | noise | sine, ...} on the given grid.
std::function<TestField(const TorusGrid&)> parse_field(Params p) {
    const auto type = p.text("type");
    if (type == "gaussian") {
        const double w = p.positive("width", 1.0);
        p.finish();
        return [w](const TorusGrid& g) { return fields::gaussians(g, {w}).front(); };
    }
    if (type == "bump") {
        const double r = p.positive("radius", 8.0);
        p.finish();
        return [r](const TorusGrid& g) { return fields::compact_bump(g, r); };
    }
    if (type == "noise") {
        const auto seed = p.seed();
        const double band = p.positive("band", 14.0);
        const auto index = p.count("index", 0);
        p.finish();
        return [=](const TorusGrid& g) { return fields::band_limited_noise(g, index + 1, seed, band).back(); };
    }
    if (type == "sine") {
        const double amplitude = p.number("amplitude", 1.0);
        const double mode = p.number("mode", 1.0);
        p.finish();
        return [=](const TorusGrid& g) {
            std::ostringstream id;
            id << "sine_" << amplitude << "_" << mode;
            return TestField{id.str(), SpectralField::sample(g, [=](double x, double) {
                                 return amplitude * std::sin(mode * x);
                             })};
        };
    }
    p.fail("type", "unknown field type '" + type + "' (gaussian, bump, noise, sine)");
}

std::vector<double> parse_t_grid(Params& p, const std::string& key, std::vector<double> fallback) {
    if (!p.has(key)) return fallback;
    std::vector<double> ts;
    if (p.has_object(key)) {
        auto g = p.child(key);
        const double lo = g.positive("lo");
        const double hi = g.positive("hi");
        const int count = g.integer("count");
        g.finish();
        if (!(hi > lo) || count < 2) g.fail_here("need lo < hi and count >= 2");
        return bernstein::log_spaced(lo, hi, count);
    }
    return p.numbers(key);
}

std::string fmt(double v) { return report::format_double(v); }

// ---------------------------------------------------------------------------------------------
// Experiment context

struct Context {
    std::filesystem::path dir;
    ExperimentResult result;

    void gate(const std::string& name, bool passed, double value, double threshold, const std::string& detail = {}) {
        result.gates.push_back({name, passed, value, threshold, detail});
    }
    void emit(const std::string& file, const report::CsvTable& table) {
        table.write(dir / file);
        result.artifacts.push_back(file);
    }
    void emit_text(const std::string& file, const std::string& content) {
        report::write_text(dir / file, content);
        result.artifacts.push_back(file);
    }
};

using Runner = std::function<void(Context&)>;
using Parser = Runner (*)(Params&);

// ---------------------------------------------------------------------------------------------
// Kinds

Runner parse_moments(Params& p) {
    const auto alphas = p.numbers_in("alphas", 0.0, 1.0, std::vector{0.5});
    const auto rs = p.numbers_in("rs", 0.0, std::numeric_limits<double>::infinity(), std::vector{1.0});
    const auto ts = p.numbers_in("ts", 0.0, std::numeric_limits<double>::infinity(), std::vector{1.0});
    const double tol = p.positive("tolerance", 1e-8);
    return [=](Context& ctx) {
        report::CsvTable table({"alpha", "r", "t", "closed_form", "quadrature", "rel_error"});
        double worst = 0.0;
        for (double a : alphas) {
            for (double r : rs) {
                for (double t : ts) {
                    const double closed = subordinator::moment_closed_form(a, -r, t);
                    const double quad = subordinator::moment_quadrature(a, r, t);
                    const double err = std::abs(closed - quad) / std::abs(closed);
                    worst = std::max(worst, err);
                    table.add_row(a, r, t, closed, quad, err);
                }
            }
        }
        ctx.emit("moments.csv", table);
        ctx.gate("max_rel_error", worst <= tol, worst, tol);
    };
}

Runner parse_laplace(Params& p) {
    const auto alphas = p.numbers_in("alphas", 0.0, 1.0, std::vector{0.3, 0.5, 0.7});
    const auto lambdas = p.numbers_in("lambdas", 0.0, std::numeric_limits<double>::infinity(), std::vector{0.5, 1.0, 4.0});
    const double t = p.positive("t", 1.0);
    const auto draws = p.count("draws", 1000000);
    const auto seed = p.seed();
    const double sigmas = p.positive("sigmas", 3.0);
    if (draws < 2) p.fail("draws", "need at least two draws");
    return [=](Context& ctx) {
        report::CsvTable table({"alpha", "lambda", "t", "estimate", "standard_error", "exact", "z"});
        double worst = 0.0;
        for (double a : alphas) {
            const auto batch = subordinator::sample_stable(a, t, draws, seed);
            for (double lam : lambdas) {
                const auto est = subordinator::laplace_transform_estimate(batch.draws, lam);
                const double exact = std::exp(-t * std::pow(lam, a));
                const double z = (est.mean - exact) / est.standard_error;
                worst = std::max(worst, std::abs(z));
                table.add_row(a, lam, t, est.mean, est.standard_error, exact, z);
            }
        }
        ctx.emit("laplace.csv", table);
        ctx.gate("max_abs_z", worst <= sigmas, worst, sigmas);
    };
}

Runner parse_subordinate(Params& p) {
    const double alpha = p.number("alpha", 0.5);
    if (!(alpha > 0.0 && alpha < 1.0)) p.fail("alpha", "must lie in (0, 1)");
    const double t = p.positive("t", 1.0);
    const auto draws = p.count("draws", 100000);
    const auto seed = p.seed();
    const double sigmas = p.positive("sigmas", 3.0);
    const auto grid = grid_or_default(p);
    auto field = p.has("field") ? parse_field(p.child("field"))
                                : std::function<TestField(const TorusGrid&)>(
                                      [](const TorusGrid& g) { return fields::gaussians(g, {1.0}).front(); });
    return [=](Context& ctx) {
        const auto f = bernstein::stable(alpha);
        const auto u = field(grid).field;
        const auto mc = subordinator::mc_subordinate(f, t, u, draws, seed);
        const auto exact = apply(SemigroupSpec{SemigroupFamily::subordinated(f), t}, u);
        const double discrepancy = l2_norm((mc.field - exact).values()) * std::sqrt(grid.cell_volume());
        report::CsvTable table({"index", "x", "monte_carlo", "exact"});
        for (std::size_t i = 0; i < grid.size(); ++i) {
            table.add_row(i, grid.point(i)[0], mc.field[i].real(), exact[i].real());
        }
        ctx.emit("subordinate.csv", table);
        const double limit = sigmas * mc.l2_standard_error;
        std::ostringstream detail;
        detail << "standard error " << fmt(mc.l2_standard_error);
        ctx.gate("l2_discrepancy", discrepancy <= limit, discrepancy, limit, detail.str());
    };
}

/// Closed-form kernels on R^n for the reference comparison.
std::function<double(double, double)> reference_kernel(const std::string& name, int dim) {
    if (name == "poisson") {
        const double c = std::tgamma(0.5 * (dim + 1)) / std::pow(std::numbers::pi, 0.5 * (dim + 1));
        return [c, dim](double r, double t) { return c * t / std::pow(t * t + r * r, 0.5 * (dim + 1)); };
    }
    if (name == "gauss") {
        return [dim](double r, double t) {
            return std::pow(4.0 * std::numbers::pi * t, -0.5 * dim) * std::exp(-r * r / (4.0 * t));
        };
    }
    return {};
}

Runner parse_kernel(Params& p) {
    const auto family = parse_semigroup(p.child("semigroup"));
    const auto grid = grid_or_default(p);
    const auto ts = p.numbers("ts", std::vector{0.5, 1.0, 2.0});
    const auto reference = p.text("reference", "none");
    const double tol = p.positive("tolerance", 1e-6);
    const double window = p.positive("window", 0.5);
    const auto stride = std::max<std::size_t>(1, p.count("stride", 64));
    if (reference != "none" && reference != "poisson" && reference != "gauss") {
        p.fail("reference", "reference must be none, poisson or gauss");
    }
    return [=](Context& ctx) {
        const auto ref = reference_kernel(reference, grid.dim());
        report::CsvTable table({"t", "index", "x", "kernel", "reference"});
        double worst = 0.0;
        for (double t : ts) {
            const auto kernel = kernel_extract(SemigroupSpec{family, t}, grid);
            for (std::size_t i = 0; i < grid.size(); ++i) {
                const auto x = grid.point(i);
                const double r = std::hypot(x[0], x[1]);
                const bool inside = std::abs(x[0]) <= window * grid.half_length() &&
                                    std::abs(x[1]) <= window * grid.half_length();
                const double value = kernel[i].real();
                const double expected = ref ? ref(r, t) : std::nan("");
                if (ref && inside) worst = std::max(worst, std::abs(value - expected));
                if (inside && i % stride == 0) table.add_row(t, i, x[0], value, expected);
            }
        }
        ctx.emit("kernel.csv", table);
        if (ref) ctx.gate("max_abs_error", worst <= tol, worst, tol);
    };
}

Runner parse_positivity(Params& p) {
    const auto grid = grid_or_default(p);
    struct Case {
        SemigroupFamily family;
        std::vector<double> ts;
        bool expect_negative;
    };
    std::vector<Case> cases;
    for (auto c : p.children("cases")) {
        const auto family = parse_semigroup(c.child("semigroup"));
        const auto ts = c.numbers("ts", std::vector{1.0});
        const auto expect = c.text("expect", family.is_markovian() ? "nonnegative" : "negative");
        if (expect != "nonnegative" && expect != "negative") c.fail("expect", "expect must be nonnegative or negative");
        c.finish();
        cases.push_back({family, ts, expect == "negative"});
    }
    const double floor = p.number("nonnegative_floor", -1e-8);
    const double ceiling = p.number("negative_ceiling", -1e-4);
    return [=](Context& ctx) {
        report::CsvTable table({"semigroup", "t", "min_value", "negative_mass_fraction", "expectation", "holds"});
        for (const auto& c : cases) {
            for (double t : c.ts) {
                const auto probe = positivity_probe(SemigroupSpec{c.family, t}, grid);
                const bool holds = c.expect_negative ? probe.min_value < ceiling : probe.min_value >= floor;
                table.add_row(c.family.label(), t, probe.min_value, probe.negative_mass_fraction,
                              std::string(c.expect_negative ? "negative" : "nonnegative"), holds);
                std::ostringstream name;
                name << c.family.label() << "@t=" << t;
                ctx.gate(name.str(), holds, probe.min_value, c.expect_negative ? ceiling : floor,
                         c.expect_negative ? "min kernel value must fall below the threshold"
                                           : "min kernel value must stay above the threshold");
            }
        }
        ctx.emit("positivity.csv", table);
    };
}

Runner parse_norms(Params& p) {
    const auto grid = grid_or_default(p);
    std::vector<std::function<TestField(const TorusGrid&)>> makers;
    for (auto f : p.children("fields")) makers.push_back(parse_field(f));
    std::vector<NormSpec> specs;
    for (auto n : p.children("norms")) specs.push_back(parse_norm(n));
    const double tol = p.positive("identity_tolerance", 1e-10);
    return [=](Context& ctx) {
        const auto partition = build_partition(grid);
        report::CsvTable table({"field", "norm", "value"});
        bool finite = true;
        double worst_identity = 0.0;
        for (const auto& make : makers) {
            const auto field = make(grid);
            std::map<std::tuple<int, double, double, double>, double> values;
            for (const auto& spec : specs) {
                const double v = norm(field.field, partition, spec);
                finite = finite && std::isfinite(v) && v >= 0.0;
                values[{static_cast<int>(spec.scale), spec.s, spec.p, spec.q}] = v;
                table.add_row(field.id, spec.label(), v);
            }
            // F_{p,p} = B_{p,p}, and F_{inf,inf} = B_{inf,inf}.
            for (const auto& [key, v] : values) {
                const auto [scale, s, pp, q] = key;
                if (scale != static_cast<int>(Scale::triebel) || pp != q) continue;
                auto twin = values.find({static_cast<int>(Scale::besov), s, pp, q});
                if (twin == values.end()) continue;
                worst_identity = std::max(worst_identity, std::abs(v - twin->second) / std::max(1e-300, twin->second));
            }
        }
        ctx.emit("norms.csv", table);
        ctx.gate("finite_nonnegative", finite, finite ? 1.0 : 0.0, 1.0);
        ctx.gate("F_pp_equals_B_pp", worst_identity <= tol, worst_identity, tol);
    };
}

Runner parse_contraction(Params& p) {
    const auto grid = grid_or_default(p);
    std::vector<SemigroupFamily> families;
    for (auto s : p.children("semigroups")) families.push_back(parse_semigroup(s));
    const auto ts = p.numbers("ts", std::vector{0.05, 0.25, 1.0});
    const auto noise = p.count("noise_fields", 20);
    const auto seed = p.seed();
    const double tol = p.positive("tolerance", 1e-6);
    std::vector<NormSpec> suite;
    if (p.has("norms")) {
        for (auto n : p.children("norms")) suite.push_back(parse_norm(n));
    } else {
        suite = contraction_suite();
    }
    for (const auto& f : families) {
        if (!f.is_markovian()) p.fail("semigroups", "contraction applies to Bernstein-kind semigroups only");
    }
    return [=](Context& ctx) {
        const double band = 0.875 * std::ldexp(1.0, grid.k_max() - 1);
        const auto test_fields = fields::band_limited_noise(grid, noise, seed, band);
        report::CsvTable table({"semigroup", "norm", "max_ratio", "worst_field", "worst_t"});
        double worst = 0.0;
        std::string where;
        for (const auto& family : families) {
            for (const auto& spec : suite) {
                const auto rep = contraction_check(family, ts, spec, test_fields);
                table.add_row(family.label(), spec.label(), rep.max_ratio, rep.worst_field, rep.worst_t);
                if (rep.max_ratio > worst) {
                    worst = rep.max_ratio;
                    where = family.label() + " " + spec.label() + " " + rep.worst_field;
                }
            }
        }
        ctx.emit("contraction.csv", table);
        ctx.gate("max_ratio", worst <= 1.0 + tol, worst, 1.0 + tol, where);
    };
}

/// Homogeneity exponent a of the symbol exponent |xi|^{2a}, when there is one.
std::optional<double> power_exponent(const SemigroupFamily& family) {
    switch (family.kind) {
        case SemigroupKind::gauss_weierstrass:
            return 1.0;
        case SemigroupKind::generalized_power:
            return family.beta;
        case SemigroupKind::subordinated:
            if (family.f.family == BernsteinFamily::stable) return family.f.param("alpha");
            if (family.f.family == BernsteinFamily::drift) return 1.0;
            return std::nullopt;
    }
    return std::nullopt;
}

/// |xi| maximising |xi|^d exp(-t g(|xi|^2)), scanned on a log grid.
double peak_frequency(const SemigroupFamily& family, double d, double t) {
    double best_y = 1.0;
    double best = -infinity;
    for (int i = 0; i <= 2400; ++i) {
        const double y = std::exp(-10.0 + 0.025 * i);
        const double v = 0.5 * d * std::log(y) - t * family.exponent(y);
        if (v > best) {
            best = v;
            best_y = y;
        }
    }
    return std::sqrt(best_y);
}

Runner parse_smoothing(Params& p) {
    const auto family = parse_semigroup(p.child("semigroup"));
    const double d = p.number("d");
    if (!(d >= 0.0)) p.fail("d", "smoothness gain must be >= 0");
    const auto norm_in = p.has("norm") ? parse_norm(p.child("norm")) : NormSpec{Scale::besov, 0.0, 2.0, 1.0};
    const auto ts = parse_t_grid(p, "t_grid", bernstein::log_spaced(1e-3, 1.0, 24));
    const int per_octave = p.integer("probes_per_octave", 16);
    const bool standard = p.flag("standard_fields", true);
    const auto grid = grid_or_default(p);
    const auto noise = standard ? p.count("noise_fields", 4) : 0;
    const std::uint64_t seed = standard ? p.seed() : 0;
    const double window = p.positive("fit_window", 0.6);
    const double slope_tol = p.positive("slope_tolerance", 0.05);
    const double stability_limit = p.positive("stability_limit", 10.0);
    const bool gate_slope = p.flag("gate_slope", true);
    const bool gate_bounds = p.flag("gate_bounds", true);
    const auto exponent = power_exponent(family);
    std::optional<double> expected;
    if (p.has("expected_slope")) {
        expected = p.number("expected_slope");
    } else if (exponent) {
        expected = -d / (2.0 * *exponent);
    }
    if (per_octave < 1) p.fail("probes_per_octave", "must be >= 1");
    for (double t : ts) {
        if (!(t > 0.0 && t <= 1.0)) p.fail("t_grid", "smoothing estimates are stated for 0 < t <= 1");
    }
    return [=](Context& ctx) {
        SmoothingExperiment exp{family, norm_in, d, {}, ts};
        if (per_octave > 0) {
            const auto [t_lo, t_hi] = std::minmax_element(ts.begin(), ts.end());
            const double lo = std::max(0.5, peak_frequency(family, d, *t_hi) / 8.0);
            const double hi = std::max(2.0 * lo, 8.0 * peak_frequency(family, d, *t_lo));
            exp.test_fields = fields::mode_probes(lo, hi, per_octave);
        }
        if (standard) {
            auto extra = fields::standard_family(grid, noise, seed);
            std::move(extra.begin(), extra.end(), std::back_inserter(exp.test_fields));
        }
        const auto table = smoothing_ratio(exp);
        const auto fit = exponent_fit(table.t, table.max_ratio, window);

        std::optional<BoundProfile> power_bound;
        std::optional<BoundProfile> general_bound;
        std::string general_note;
        if (exponent) power_bound = constant_bound_check(*exponent, d, table.t, table.max_ratio);
        if (family.kind != SemigroupKind::generalized_power) {
            const auto f = family.kind == SemigroupKind::gauss_weierstrass ? bernstein::drift(1.0) : family.f;
            if (bernstein::satisfies_doubling(f)) {
                general_bound = general_f_smoothing_check(f, d, table.t, table.max_ratio);
            } else {
                general_note = f.name + " fails the doubling predicate; general-f bound not applicable";
            }
        }
        const BoundProfile* primary = power_bound ? &*power_bound : (general_bound ? &*general_bound : nullptr);

        report::CsvTable rows({"t", "field_id", "ratio", "bound", "margin"});
        for (const auto& row : table.rows) {
            const auto k = static_cast<std::size_t>(std::find(table.t.begin(), table.t.end(), row.t) - table.t.begin());
            const double bound = primary ? primary->bound[k] : std::nan("");
            rows.add_row(row.t, row.field_id, row.ratio, bound, bound - row.ratio);
        }
        ctx.emit("smoothing_ratios.csv", rows);

        report::CsvTable summary({"t", "max_ratio", "power_bound", "power_margin", "general_bound", "general_margin"});
        for (std::size_t k = 0; k < table.t.size(); ++k) {
            const double nan = std::nan("");
            summary.add_row(table.t[k], table.max_ratio[k], power_bound ? power_bound->bound[k] : nan,
                            power_bound ? power_bound->margin[k] : nan, general_bound ? general_bound->bound[k] : nan,
                            general_bound ? general_bound->margin[k] : nan);
        }
        ctx.emit("smoothing_max.csv", summary);

        std::vector<report::Series> series{{"max ratio R(t)", table.t, table.max_ratio}};
        if (primary) series.push_back({"calibrated bound", table.t, primary->bound});
        ctx.emit_text("smoothing.svg", report::loglog_svg(family.label() + ", d = " + fmt(d), "t", "R(t)", series));

        std::ostringstream fit_detail;
        fit_detail << "slope " << fmt(fit.slope) << ", r^2 " << fmt(fit.r_squared) << ", points " << fit.points
                   << (fit.degenerate ? ", degenerate" : "");
        if (gate_slope && expected) {
            const double err = *expected == 0.0 ? std::abs(fit.slope) : std::abs(fit.slope / *expected - 1.0);
            ctx.gate("slope", err <= slope_tol, fit.slope, *expected, fit_detail.str());
        } else {
            ctx.gate("slope_reported", true, fit.slope, expected.value_or(std::nan("")), fit_detail.str());
        }
        if (gate_bounds) {
            if (power_bound) {
                ctx.gate("gamma_ratio_margin", power_bound->margins_nonnegative(), power_bound->constant, 0.0,
                         "Gamma-ratio " + fmt(power_bound->gamma_ratio));
                ctx.gate("gamma_ratio_stability", power_bound->stable(stability_limit), power_bound->stability,
                         stability_limit);
            }
            if (general_bound) {
                ctx.gate("general_f_margin", general_bound->margins_nonnegative(), general_bound->constant, 0.0);
                ctx.gate("general_f_stability", general_bound->stable(stability_limit), general_bound->stability,
                         stability_limit);
            } else if (!general_note.empty()) {
                ctx.gate("general_f_skipped", true, 0.0, 0.0, general_note);
            }
        }
    };
}

Runner parse_sandwich(Params& p) {
    std::vector<BernsteinFunction> fs;
    for (auto f : p.children("functions")) fs.push_back(parse_bernstein(f));
    const auto rs = p.numbers("rs", std::vector{0.5, 1.0, 2.0});
    const auto ts = p.numbers("ts", std::vector{1e-3, 1e-2, 0.1, 0.5, 1.0});
    return [=](Context& ctx) {
        report::CsvTable table({"function", "r", "t", "lower", "estimate", "upper", "holds"});
        report::CsvTable constants({"function", "r", "doubling_constant", "upper_constant"});
        for (const auto& f : fs) {
            for (double r : rs) {
                std::ostringstream name;
                name << f.name << "@r=" << r;
                try {
                    const auto rep = subordinator::moment_sandwich_check(f, r, ts);
                    constants.add_row(f.name, r, rep.doubling_constant, rep.upper_constant);
                    for (const auto& rec : rep.records) {
                        table.add_row(f.name, r, rec.t, rec.lower, rec.estimate, rec.upper, rec.holds());
                    }
                    ctx.gate(name.str(), rep.holds(), rep.upper_constant, 0.0);
                } catch (const UnsupportedFunction& e) {
                    // No upper bound exists; record the lower bound and the moment itself for diagnosis.
                    for (double t : ts) {
                        double lower = infinity;
                        double estimate = infinity;
                        try {
                            lower = std::pow(bernstein::inverse(f, 1.0 / t, {1e-150, 1e150}), r) /
                                    (3.0 * std::tgamma(1.0 + r));
                        } catch (const BracketError&) {
                        }
                        try {
                            estimate = subordinator::negative_moment(f, r, t);
                        } catch (const QuadratureError&) {
                        }
                        table.add_row(f.name, r, t, lower, estimate, std::nan(""), false);
                    }
                    ctx.gate(name.str(), false, std::nan(""), 0.0, e.what());
                } catch (const Error& e) {
                    ctx.gate(name.str(), false, std::nan(""), 0.0, e.what());
                }
            }
        }
        ctx.emit("sandwich.csv", table);
        ctx.emit("sandwich_constants.csv", constants);
    };
}

Runner parse_pde(Params& p) {
    const auto betas = p.numbers("betas", std::vector{1.0});
    const auto grid = p.has("grid") ? parse_grid(p.child("grid")) : TorusGrid(1, 64, std::numbers::pi);
    auto field = p.has("u0") ? parse_field(p.child("u0"))
                             : std::function<TestField(const TorusGrid&)>([](const TorusGrid& g) {
                                   return TestField{"sine", SpectralField::sample(g, [](double x, double) {
                                                        return 0.01 * std::sin(x);
                                                    })};
                               });
    const double T = p.positive("T", 1.0);
    const int steps = p.integer("t_steps", 64);
    const bool experimental = p.flag("experimental", false);
    SolverOptions options;
    options.tol = p.positive("tolerance", 1e-12);
    options.max_iter = p.integer("max_iter", 60);
    const double residual_limit = p.positive("residual_tolerance", 1e-10);
    const double mean_limit = p.positive("mean_tolerance", 1e-12);
    const double factor_limit = p.positive("contraction_limit", 1.0);
    for (double b : betas) {
        if (b < 1.0 && !experimental) p.fail("betas", "beta < 1 needs \"experimental\": true");
    }
    if (steps < 1) p.fail("t_steps", "must be >= 1");
    return [=](Context& ctx) {
        const auto u0 = field(grid).field;
        for (double beta : betas) {
            const CauchyProblem problem{beta, u0, T, steps, experimental};
            const auto state = fixed_point_solve(problem, options);
            const double residual = residual_check(problem, state.iterate, options);
            const double drift = mean_drift(problem, state.iterate);
            const std::string tag = "beta" + fmt(beta);

            report::CsvTable history({"iter", "diff_norm", "residual"});
            for (std::size_t j = 0; j < state.diff_history.size(); ++j) {
                // The residual of iterate j is the next difference; the last one is computed directly.
                const double res = j + 1 < state.diff_history.size() ? state.diff_history[j + 1] : residual;
                history.add_row(j + 1, state.diff_history[j], res);
            }
            ctx.emit("pde_" + tag + "_history.csv", history);
            report::CsvTable path({"t", "index", "x", "u"});
            for (int k = 0; k <= steps; ++k) {
                const auto& slice = state.iterate[static_cast<std::size_t>(k)];
                for (std::size_t i = 0; i < grid.size(); ++i) {
                    path.add_row(problem.slice_time(k), i, grid.point(i)[0], slice[i].real());
                }
            }
            ctx.emit("pde_" + tag + "_path.csv", path);

            ctx.gate(tag + "_converged", state.converged, static_cast<double>(state.iterations),
                     static_cast<double>(options.max_iter), state.message);
            ctx.gate(tag + "_contraction_factor", state.contraction_factor() < factor_limit,
                     state.contraction_factor(), factor_limit);
            ctx.gate(tag + "_residual", residual <= residual_limit, residual, residual_limit);
            ctx.gate(tag + "_mean_drift", drift <= mean_limit, drift, mean_limit);
        }
    };
}

struct KindEntry {
    KindInfo info;
    Parser parse;
};

const std::vector<KindEntry>& registry() {
    static const std::vector<KindEntry> entries{
        {{"moments", "stable moment closed form vs quadrature over (alpha, r, t)"}, parse_moments},
        {{"laplace", "Monte Carlo Laplace transform of the stable subordinator"}, parse_laplace},
        {{"subordinate", "Monte Carlo subordinated field vs exact multiplier field"}, parse_subordinate},
        {{"kernel", "kernel extraction against a closed-form kernel"}, parse_kernel},
        {{"positivity", "minimum kernel value per semigroup"}, parse_positivity},
        {{"norms", "Besov and Triebel-Lizorkin norms of test fields"}, parse_norms},
        {{"contraction", "contraction ratios over the norm suite"}, parse_contraction},
        {{"smoothing", "smoothing ratios, exponent fit and bound profiles"}, parse_smoothing},
        {{"sandwich", "negative-moment sandwich bounds"}, parse_sandwich},
        {{"pde", "mild solution of the fractional Cauchy problem"}, parse_pde},
    };
    return entries;
}

struct Planned {
    std::string name;
    std::string kind;
    Runner runner;
};

struct Plan {
    std::string output_dir;
    std::vector<Planned> experiments;
};

Plan plan(const std::string& text) {
    json root;
    try {
        root = json::parse(text);
    } catch (const json::parse_error& e) {
        const auto upto = std::min<std::size_t>(e.byte, text.size());
        const auto line = 1 + static_cast<std::size_t>(std::count(text.begin(), text.begin() + upto, '\n'));
        throw ConfigError(std::string("invalid JSON: ") + e.what(), "", line);
    }
    const auto lines = line_index(text);
    Params top(root, "", lines);
    Plan out;
    out.output_dir = top.text("output_dir", "caloric_out");
    (void)top.text("$schema", "");
    std::set<std::string> names;
    if (top.has("experiments")) {
        const auto& list = root.at("experiments");
        if (!list.is_array()) top.fail("experiments", "expected an array");
        for (std::size_t i = 0; i < list.size(); ++i) {
            Params p(list[i], "/experiments/" + std::to_string(i), lines);
            const auto kind = p.text("kind");
            const auto name = p.text("name", kind + "_" + std::to_string(i));
            if (name.empty() || name.find_first_of("/\\") != std::string::npos || name == "." || name == "..") {
                p.fail("name", "name must be a plain directory name");
            }
            if (!names.insert(name).second) p.fail("name", "duplicate experiment name '" + name + "'");
            const auto it = std::find_if(registry().begin(), registry().end(),
                                         [&](const KindEntry& e) { return e.info.name == kind; });
            if (it == registry().end()) p.fail("kind", "unknown experiment kind '" + kind + "'");
            auto runner = it->parse(p);
            p.finish();
            out.experiments.push_back({name, kind, std::move(runner)});
        }
    }
    top.touch("experiments");
    top.finish();
    return out;
}

json gate_json(const Gate& g) {
    auto number = [](double v) { return std::isfinite(v) ? json(v) : json(report::format_double(v)); };
    return {{"name", g.name}, {"passed", g.passed}, {"value", number(g.value)}, {"threshold", number(g.threshold)},
            {"detail", g.detail}};
}

}  // namespace

const std::vector<KindInfo>& kinds() {
    static const std::vector<KindInfo> infos = [] {
        std::vector<KindInfo> out;
        for (const auto& e : registry()) out.push_back(e.info);
        return out;
    }();
    return infos;
}

void validate(const std::string& text) { (void)plan(text); }

RunReport run(const std::string& text, const RunOptions& options) {
    auto p = plan(text);
    RunReport rep;
    rep.output_dir = options.output_dir ? *options.output_dir : std::filesystem::path(p.output_dir);
    if (p.experiments.empty()) return rep;
    json summary = {{"experiments", json::array()}};
    for (auto& planned : p.experiments) {
        Context ctx{rep.output_dir / planned.name, {}};
        ctx.result.name = planned.name;
        ctx.result.kind = planned.kind;
        std::filesystem::create_directories(ctx.dir);
        try {
            planned.runner(ctx);
        } catch (const Error& e) {
            ctx.result.error = e.what();
        }
        if (ctx.result.gates.empty() && ctx.result.error.empty()) ctx.result.error = "experiment produced no gates";
        if (options.log) {
            *options.log << (ctx.result.passed() ? "PASS " : "FAIL ") << planned.kind << " " << planned.name;
            for (const auto& g : ctx.result.gates) {
                if (!g.passed) *options.log << "\n  failing gate " << g.name << ": value " << fmt(g.value)
                                            << " vs threshold " << fmt(g.threshold) << (g.detail.empty() ? "" : " (" + g.detail + ")");
            }
            if (!ctx.result.error.empty()) *options.log << "\n  error: " << ctx.result.error;
            *options.log << '\n';
        }
        json entry = {{"name", planned.name},
                      {"kind", planned.kind},
                      {"passed", ctx.result.passed()},
                      {"gates", json::array()},
                      {"artifacts", ctx.result.artifacts}};
        for (const auto& g : ctx.result.gates) entry["gates"].push_back(gate_json(g));
        if (!ctx.result.error.empty()) entry["error"] = ctx.result.error;
        summary["experiments"].push_back(entry);
        rep.results.push_back(std::move(ctx.result));
    }
    summary["passed"] = rep.passed();
    report::write_text(rep.output_dir / "summary.json", summary.dump(2) + "\n");
    return rep;
}

}  // namespace caloric::experiments

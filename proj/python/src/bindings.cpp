#include "caloric/bernstein.hpp"
#include "caloric/errors.hpp"
#include "caloric/experiments.hpp"
#include "caloric/lp_norms.hpp"
#include "caloric/pde_solver.hpp"
#include "caloric/semigroup.hpp"
#include "caloric/smoothing_lab.hpp"
#include "caloric/spectral_grid.hpp"
#include "caloric/subordinator.hpp"

#include <pybind11/complex.h>
#include <pybind11/functional.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <cmath>
#include <sstream>

namespace py = pybind11;
using namespace caloric;

namespace {

using RealArray = py::array_t<double, py::array::c_style | py::array::forcecast>;

std::vector<std::size_t> field_shape(const TorusGrid& grid) {
    if (grid.dim() == 1) return {grid.points_per_axis()};
    return {grid.points_per_axis(), grid.points_per_axis()};
}

SpectralField from_array(const TorusGrid& grid, const RealArray& values) {
    if (static_cast<std::size_t>(values.size()) != grid.size()) {
        throw DomainError("array has " + std::to_string(values.size()) + " samples, grid needs " +
                          std::to_string(grid.size()));
    }
    std::vector<Complex> data(grid.size());
    const double* src = values.data();
    for (std::size_t i = 0; i < data.size(); ++i) data[i] = src[i];
    return SpectralField(grid, Representation::physical, std::move(data));
}

RealArray to_array(const SpectralField& field) {
    const auto physical = to_physical(field);
    RealArray out(field_shape(physical.grid()));
    double* dst = out.mutable_data();
    for (std::size_t i = 0; i < physical.size(); ++i) dst[i] = physical[i].real();
    return out;
}

double parse_exponent(const py::object& value) {
    if (py::isinstance<py::str>(value)) {
        const auto text = value.cast<std::string>();
        if (text == "inf") return infinity;
        throw DomainError("exponent must be a number or \"inf\", got \"" + text + "\"");
    }
    return value.cast<double>();
}

NormSpec make_norm(const std::string& scale, double s, const py::object& p, const py::object& q) {
    NormSpec spec;
    if (scale == "B") {
        spec.scale = Scale::besov;
    } else if (scale == "F") {
        spec.scale = Scale::triebel;
    } else {
        throw DomainError("scale must be \"B\" or \"F\"");
    }
    spec.s = s;
    spec.p = parse_exponent(p);
    spec.q = parse_exponent(q);
    spec.validate();
    return spec;
}

py::dict gate_dict(const experiments::Gate& gate) {
    py::dict d;
    d["name"] = gate.name;
    d["passed"] = gate.passed;
    d["value"] = gate.value;
    d["threshold"] = gate.threshold;
    d["detail"] = gate.detail;
    return d;
}

}  // namespace

PYBIND11_MODULE(_caloric, m) {
    m.doc() = "Subordinated heat semigroups on the periodic box and their smoothing in Besov/Triebel scales.";

    auto base = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
    py::register_exception<QuadratureError>(m, "QuadratureError", base.ptr());
    py::register_exception<BracketError>(m, "BracketError", base.ptr());
    py::register_exception<DomainError>(m, "DomainError", PyExc_ValueError);
    py::register_exception<RepresentationError>(m, "RepresentationError", base.ptr());
    py::register_exception<ResolutionError>(m, "ResolutionError", base.ptr());
    py::register_exception<AliasingError>(m, "AliasingError", base.ptr());
    py::register_exception<UnsupportedFunction>(m, "UnsupportedFunction", base.ptr());
    py::register_exception<NonFiniteError>(m, "NonFiniteError", base.ptr());
    py::register_exception<experiments::ConfigError>(m, "ConfigError", PyExc_ValueError);

    py::class_<TorusGrid>(m, "TorusGrid")
        .def(py::init<int, std::size_t, double>(), py::arg("dim"), py::arg("N"), py::arg("L"))
        .def_property_readonly("dim", &TorusGrid::dim)
        .def_property_readonly("N", &TorusGrid::points_per_axis)
        .def_property_readonly("L", &TorusGrid::half_length)
        .def_property_readonly("spacing", &TorusGrid::spacing)
        .def_property_readonly("nyquist", &TorusGrid::nyquist)
        .def_property_readonly("k_max", &TorusGrid::k_max)
        .def("coordinates", [](const TorusGrid& g) {
            RealArray out(std::vector<std::size_t>{g.points_per_axis()});
            for (std::size_t i = 0; i < g.points_per_axis(); ++i) out.mutable_data()[i] = g.coordinate(i);
            return out;
        })
        .def("__repr__", [](const TorusGrid& g) {
            std::ostringstream s;
            s << "TorusGrid(dim=" << g.dim() << ", N=" << g.points_per_axis() << ", L=" << g.half_length() << ")";
            return s.str();
        });

    py::class_<BernsteinFunction>(m, "BernsteinFunction")
        .def_readonly("name", &BernsteinFunction::name)
        .def_readonly("is_bernstein", &BernsteinFunction::is_bernstein)
        .def("__call__", [](const BernsteinFunction& f, double lambda) { return bernstein::eval(f, lambda); })
        .def("inverse", [](const BernsteinFunction& f, double y) { return bernstein::inverse(f, y); })
        .def("levy_khintchine", [](const BernsteinFunction& f, double lambda) {
            return bernstein::levy_khintchine(f, lambda);
        })
        .def("satisfies_doubling", [](const BernsteinFunction& f) { return bernstein::satisfies_doubling(f); })
        .def("__repr__", [](const BernsteinFunction& f) { return "BernsteinFunction(" + f.name + ")"; });

    m.def("stable", &bernstein::stable, py::arg("alpha"));
    m.def("drift", &bernstein::drift, py::arg("b") = 1.0);
    m.def("relativistic", &bernstein::relativistic, py::arg("c") = 1.0, py::arg("alpha") = 0.5);
    m.def("log1p", &bernstein::log_one_plus);
    m.def("power", &bernstein::generalized_power, py::arg("beta"));

    py::class_<SemigroupFamily>(m, "SemigroupFamily")
        .def_static("gauss_weierstrass", &SemigroupFamily::gauss_weierstrass)
        .def_static("subordinated", &SemigroupFamily::subordinated, py::arg("f"))
        .def_static("generalized_power", &SemigroupFamily::generalized_power, py::arg("beta"))
        .def("exponent", &SemigroupFamily::exponent, py::arg("lam"))
        .def_property_readonly("is_markovian", &SemigroupFamily::is_markovian)
        .def_property_readonly("label", &SemigroupFamily::label)
        .def("__repr__", [](const SemigroupFamily& f) { return "SemigroupFamily(" + f.label() + ")"; });

    m.def(
        "apply",
        [](const SemigroupFamily& family, double t, const TorusGrid& grid, const RealArray& u) {
            return to_array(apply(SemigroupSpec{family, t}, from_array(grid, u)));
        },
        py::arg("family"), py::arg("t"), py::arg("grid"), py::arg("u"),
        "W_t u for real samples u on the grid.");
    m.def(
        "kernel",
        [](const SemigroupFamily& family, double t, const TorusGrid& grid) {
            return to_array(kernel_extract(SemigroupSpec{family, t}, grid));
        },
        py::arg("family"), py::arg("t"), py::arg("grid"));
    m.def(
        "positivity",
        [](const SemigroupFamily& family, double t, const TorusGrid& grid) {
            const auto r = positivity_probe(SemigroupSpec{family, t}, grid);
            return py::make_tuple(r.min_value, r.negative_mass_fraction);
        },
        py::arg("family"), py::arg("t"), py::arg("grid"), "(min kernel value, negative mass fraction)");

    m.def(
        "norm",
        [](const TorusGrid& grid, const RealArray& u, const std::string& scale, double s, const py::object& p,
           const py::object& q) {
            const auto partition = build_partition(grid);
            return norm(from_array(grid, u), partition, make_norm(scale, s, p, q));
        },
        py::arg("grid"), py::arg("u"), py::arg("scale"), py::arg("s"), py::arg("p"), py::arg("q"),
        "Quasi-norm of u in B^s_{p,q} (scale='B') or F^s_{p,q} (scale='F'); p, q may be 'inf'.");
    m.def(
        "lp_norm", [](const TorusGrid& grid, const RealArray& u, const py::object& p) {
            return lp_norm(from_array(grid, u), parse_exponent(p));
        },
        py::arg("grid"), py::arg("u"), py::arg("p"));

    m.def(
        "sample_stable",
        [](double alpha, double t, std::size_t count, std::uint64_t seed) {
            auto batch = subordinator::sample_stable(alpha, t, count, seed);
            RealArray out(std::vector<std::size_t>{batch.draws.size()});
            std::copy(batch.draws.begin(), batch.draws.end(), out.mutable_data());
            return out;
        },
        py::arg("alpha"), py::arg("t"), py::arg("count"), py::arg("seed"));
    m.def("stable_moment", &subordinator::moment_closed_form, py::arg("alpha"), py::arg("kappa"), py::arg("t"));
    m.def("stable_negative_moment_quadrature", &subordinator::moment_quadrature, py::arg("alpha"), py::arg("r"),
          py::arg("t"));
    m.def("negative_moment", &subordinator::negative_moment, py::arg("f"), py::arg("r"), py::arg("t"));
    m.def(
        "moment_sandwich",
        [](const BernsteinFunction& f, double r, const std::vector<double>& t) {
            const auto report = subordinator::moment_sandwich_check(f, r, t);
            py::list rows;
            for (const auto& rec : report.records) {
                py::dict d;
                d["t"] = rec.t;
                d["lower"] = rec.lower;
                d["estimate"] = rec.estimate;
                d["upper"] = rec.upper;
                d["holds"] = rec.holds();
                rows.append(d);
            }
            py::dict out;
            out["doubling_constant"] = report.doubling_constant;
            out["upper_constant"] = report.upper_constant;
            out["holds"] = report.holds();
            out["records"] = rows;
            return out;
        },
        py::arg("f"), py::arg("r"), py::arg("t"));

    m.def(
        "exponent_fit",
        [](const std::vector<double>& t, const std::vector<double>& ratios, double window) {
            const auto fit = exponent_fit(t, ratios, window);
            py::dict d;
            d["slope"] = fit.slope;
            d["intercept"] = fit.intercept;
            d["r_squared"] = fit.r_squared;
            d["degenerate"] = fit.degenerate;
            d["points"] = fit.points;
            return d;
        },
        py::arg("t"), py::arg("ratios"), py::arg("window") = 0.6);
    m.def("gamma_ratio", &gamma_ratio, py::arg("exponent"), py::arg("d"));

    m.def(
        "solve_mild",
        [](double beta, const TorusGrid& grid, const RealArray& u0, double T, int t_steps, double tol, int max_iter,
           bool experimental) {
            CauchyProblem problem{beta, from_array(grid, u0), T, t_steps, experimental};
            SolverOptions options;
            options.tol = tol;
            options.max_iter = max_iter;
            auto state = fixed_point_solve(problem, options);
            py::dict d;
            d["converged"] = state.converged;
            d["diverged"] = state.diverged;
            d["iterations"] = state.iterations;
            d["message"] = state.message;
            d["diff_history"] = state.diff_history;
            d["contraction_factor"] = state.contraction_factor();
            d["residual"] = state.converged ? residual_check(problem, state.iterate, options) : std::nan("");
            d["mean_drift"] = mean_drift(problem, state.iterate);
            d["final"] = to_array(state.iterate.back());
            return d;
        },
        py::arg("beta"), py::arg("grid"), py::arg("u0"), py::arg("T") = 1.0, py::arg("t_steps") = 64,
        py::arg("tol") = 1e-12, py::arg("max_iter") = 100, py::arg("experimental") = false,
        "Picard iteration of du/dt + (-Delta)^beta u = div[u^2].");

    m.def("validate_config", &experiments::validate, py::arg("text"));
    m.def(
        "run_config",
        [](const std::string& text, const std::string& output_dir) {
            experiments::RunOptions options;
            options.output_dir = output_dir;
            const auto report = [&] {
                py::gil_scoped_release release;
                return experiments::run(text, options);
            }();
            py::list results;
            for (const auto& r : report.results) {
                py::dict d;
                d["name"] = r.name;
                d["kind"] = r.kind;
                d["passed"] = r.passed();
                d["error"] = r.error;
                d["artifacts"] = r.artifacts;
                py::list gates;
                for (const auto& g : r.gates) gates.append(gate_dict(g));
                d["gates"] = gates;
                results.append(d);
            }
            return results;
        },
        py::arg("text"), py::arg("output_dir"), "Runs every experiment in a JSON config and returns the results.");
    m.def("experiment_kinds", [] {
        std::vector<std::pair<std::string, std::string>> out;
        for (const auto& k : experiments::kinds()) out.emplace_back(k.name, k.description);
        return out;
    });
}

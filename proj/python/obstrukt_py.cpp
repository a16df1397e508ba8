// Python bindings for the main obstrukt operations.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "obstrukt/cobord.hpp"
#include "obstrukt/error.hpp"
#include "obstrukt/linking.hpp"
#include "obstrukt/obstruction.hpp"
#include "obstrukt/pairmaps.hpp"
#include "obstrukt/run.hpp"

namespace py = pybind11;
using namespace obstrukt;

namespace {

AlphaVariant parse_variant(const std::string& name) {
    if (name == "sphere") return AlphaVariant::Sphere;
    if (name == "half") return AlphaVariant::Half;
    if (name == "neg_half") return AlphaVariant::NegHalf;
    throw InputError("unknown alpha variant '" + name + "' (expected sphere, half, neg_half)");
}

PolyCurve to_curve(const std::vector<std::vector<double>>& vertices) { return PolyCurve(vertices); }

py::dict zero_dict(const ZeroCertificate& z) {
    py::dict d;
    d["labels"] = std::vector<std::size_t>(z.location.labels.begin(), z.location.labels.end());
    d["s"] = z.location.s;
    d["a12"] = z.location.a12;
    d["a31"] = z.location.a31;
    d["residual"] = z.residual;
    d["rank"] = z.jacobian_rank;
    d["min_pivot"] = z.min_pivot;
    d["transversal"] = z.transversal;
    return d;
}

py::dict generator_obstruction(std::size_t n, unsigned threads, bool oriented) {
    TripleSearchOptions opt;
    opt.threads = threads;
    ObstructionReport rep;
    {
        py::gil_scoped_release release;
        rep = compute_obstruction(generator_family(n), opt,
                                  oriented ? OrientationConvention::JacobianDeterminant : OrientationConvention::None);
    }
    py::dict d;
    py::list zeros;
    for (const auto& z : rep.search.zeros) zeros.append(zero_dict(z));
    d["zeros"] = zeros;
    d["suspects"] = rep.search.suspects.size();
    d["boundary_hit"] = rep.search.boundary_hit;
    d["quotient_size"] = rep.orbits.quotient_size();
    d["swap_orbits"] = rep.orbits.sigma2_orbits.size();
    d["expected_dimension"] = rep.expected_dimension;
    if (rep.zero_dim_class) {
        d["count"] = rep.zero_dim_class->count;
        d["mod2"] = rep.zero_dim_class->mod2;
        d["signed_count"] = rep.zero_dim_class->signed_count;
    }
    return d;
}

py::list double_points(const std::string& chart, std::size_t target_dim) {
    const DoublePointResult r = double_point_zeros(named_chart(chart, target_dim));
    py::list out;
    for (const auto& p : r.points) {
        py::dict d;
        d["x"] = p.x;
        d["y"] = p.y;
        d["residual"] = p.residual;
        d["rank"] = p.jacobian_rank;
        d["transversal"] = p.transversal;
        out.append(d);
    }
    return out;
}

py::dict alpha_linking() {
    const AlphaLinkingResult r = alpha_preimage_linking();
    py::dict d;
    d["gauss"] = r.gauss.value;
    d["crossing"] = r.crossing.linking;
    d["pole"] = r.pole;
    d["upper_vertices"] = r.upper.size();
    d["lower_vertices"] = r.lower.size();
    return d;
}

py::list knotting(std::size_t kmax) {
    py::list out;
    for (const auto& row : knotting_table(kmax)) {
        py::dict d;
        d["k"] = row.k;
        d["w_plane"] = row.w_plane;
        d["w_tangent"] = row.w_tangent;
        d["group"] = to_string(row.group);
        out.append(d);
    }
    return out;
}

py::list pi0(const std::string& text) {
    std::istringstream in(text);
    const CobConfig c = read_cob_config(in);
    const auto comps = graph_components(c);
    const auto values = normalize_components(c);
    py::list out;
    for (std::size_t k = 0; k < comps.size(); ++k) {
        py::dict d;
        d["vertices"] = comps[k];
        d["group"] = to_string(values[k].tag());
        d["value"] = values[k].value;
        out.append(d);
    }
    return out;
}

py::tuple run_command(const std::string& command, const std::vector<std::string>& inputs, bool machine,
                      bool strict, unsigned threads, std::size_t n, std::size_t kmax) {
    RunSpec spec;
    spec.command = command;
    spec.inputs = inputs;
    spec.machine = machine;
    spec.strict = strict;
    spec.threads = threads;
    spec.n = n;
    spec.kmax = kmax;
    Report report;
    {
        py::gil_scoped_release release;
        report = run(spec);
    }
    return py::make_tuple(exit_code(report), render(report, machine));
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Isovariant pair maps, triple-point obstructions, linking numbers and twisted cobordism classes";

    py::register_exception<InputError>(m, "InputError", PyExc_ValueError);
    py::register_exception<NumericalError>(m, "NumericalError", PyExc_RuntimeError);

    m.def(
        "eval_alpha",
        [](const std::string& variant, const std::vector<double>& v, const std::vector<double>& w) {
            return eval_alpha(parse_variant(variant), v, w);
        },
        py::arg("variant"), py::arg("v"), py::arg("w"));
    m.def(
        "eval_generator",
        [](std::size_t n, const std::vector<double>& s, std::size_t i, std::size_t j) {
            return eval_generator(n, s, i, j);
        },
        py::arg("n"), py::arg("s"), py::arg("i"), py::arg("j"), "Generator family value on labels i, j in {0, 1, 2}.");
    m.def(
        "sample_min_distance",
        [](const std::string& variant, std::size_t n, const std::vector<double>& target, std::size_t samples) {
            return sample_min_distance(parse_variant(variant), n, target, samples);
        },
        py::arg("variant"), py::arg("n"), py::arg("target"), py::arg("samples") = 100000);
    m.def("generator_obstruction", &generator_obstruction, py::arg("n") = 3, py::arg("threads") = 1,
          py::arg("oriented") = false);
    m.def("double_points", &double_points, py::arg("chart"), py::arg("target_dim") = 2);
    m.def("alpha_linking", &alpha_linking);
    m.def(
        "gauss_linking",
        [](const std::vector<std::vector<double>>& a, const std::vector<std::vector<double>>& b) {
            return gauss_linking(to_curve(a), to_curve(b));
        },
        py::arg("a"), py::arg("b"));
    m.def(
        "crossing_linking",
        [](const std::vector<std::vector<double>>& a, const std::vector<std::vector<double>>& b,
           std::vector<double> direction) {
            if (direction.empty()) direction.assign(kDefaultProjectionDirection.begin(), kDefaultProjectionDirection.end());
            return crossing_linking(to_curve(a), to_curve(b), direction);
        },
        py::arg("a"), py::arg("b"), py::arg("direction") = std::vector<double>{});
    m.def("knotting_table", &knotting, py::arg("kmax") = 12);
    m.def("pi0", &pi0, py::arg("text"), "Classify every component of a configuration given as text.");
    m.def("run", &run_command, py::arg("command"), py::arg("inputs") = std::vector<std::string>{},
          py::arg("machine") = false, py::arg("strict") = false, py::arg("threads") = 1, py::arg("n") = 3,
          py::arg("kmax") = 12, "Run a subcommand; returns (exit code, report text).");
}

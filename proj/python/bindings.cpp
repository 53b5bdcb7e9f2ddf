#include "topo/dataio.hpp"
#include "topo/errors.hpp"
#include "topo/ot.hpp"
#include "topo/rlt.hpp"
#include "topo/scoring.hpp"
#include "topo/synth.hpp"

#include <json.hpp>
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

namespace py = pybind11;
using namespace topo;

namespace {

// A dataset crosses the boundary as {"provenance", "embedding_kind",
// "axes": [{"id", "name", "values": [array N x D, ...]}]}.
py::dict to_python(const ConditionedDataset& d) {
    py::list axes;
    for (const auto& a : d.axes) {
        py::list values;
        for (const auto& c : a.values) values.append(py::cast(c.points()));
        py::dict axis;
        axis["id"] = a.id;
        axis["name"] = a.name;
        axis["values"] = values;
        axes.append(axis);
    }
    py::dict out;
    out["provenance"] = d.provenance;
    out["embedding_kind"] = d.embedding_kind;
    out["axes"] = axes;
    return out;
}

ConditionedDataset from_python(const py::dict& obj) {
    ConditionedDataset d;
    if (obj.contains("provenance")) d.provenance = obj["provenance"].cast<std::string>();
    if (obj.contains("embedding_kind")) d.embedding_kind = obj["embedding_kind"].cast<std::string>();
    std::size_t next = 0;
    for (auto item : obj["axes"].cast<py::list>()) {
        auto a = item.cast<py::dict>();
        ConditionedAxis axis;
        axis.id = a.contains("id") ? a["id"].cast<std::size_t>() : next;
        axis.name = a.contains("name") ? a["name"].cast<std::string>() : "z" + std::to_string(axis.id);
        for (auto v : a["values"].cast<py::list>()) axis.values.emplace_back(v.cast<RowMatrix>());
        d.axes.push_back(std::move(axis));
        ++next;
    }
    d.validate();
    return d;
}

OtParams ot_params(double epsilon, double tau, std::size_t max_iter, double tol) {
    OtParams p;
    p.epsilon = epsilon;
    p.tau = tau;
    p.max_iter = max_iter;
    p.tol = tol;
    return p;
}

RltParams rlt_params(double gamma, std::size_t l0, std::size_t n, std::size_t i_max) {
    RltParams p;
    p.gamma = gamma;
    p.l0 = l0;
    p.n = n;
    p.i_max = i_max;
    return p;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Relative living times, Wasserstein signatures and disentanglement scores";

    auto base = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
    py::register_exception<FormatError>(m, "FormatError", base.ptr());
    py::register_exception<ConvergenceError>(m, "ConvergenceError", base.ptr());
    py::register_exception<ParameterError>(m, "ParameterError", PyExc_ValueError);
    py::register_exception<ShapeError>(m, "ShapeError", PyExc_ValueError);
    py::register_exception<DomainError>(m, "DomainError", PyExc_ValueError);

    m.def(
        "generate",
        [](const std::string& family, const std::string& entanglement, std::size_t n_samples,
           std::size_t n_values, double noise_sigma, std::uint64_t seed, const std::string& provenance) {
            SynthSpec s;
            s.family = parse_family(family);
            s.entanglement = parse_entanglement(entanglement);
            s.n_samples = n_samples;
            s.n_values = n_values;
            s.noise_sigma = noise_sigma;
            s.seed = seed;
            s.provenance = provenance;
            return to_python(generate(s));
        },
        py::arg("family") = "cylinder", py::arg("entanglement") = "none", py::arg("n_samples") = 512,
        py::arg("n_values") = 8, py::arg("noise_sigma") = 0.01, py::arg("seed") = 0,
        py::arg("provenance") = "generated", "Synthetic conditioned dataset with known topology.");

    m.def(
        "relative_living_times",
        [](const RowMatrix& points, double gamma, std::size_t l0, std::size_t i_max, std::uint64_t seed) {
            const auto r = relative_living_times(PointCloud(points), rlt_params(gamma, l0, 1, i_max), seed);
            return r.mass;
        },
        py::arg("points"), py::arg("gamma") = 1.0 / 128.0, py::arg("l0") = 64, py::arg("i_max") = 100,
        py::arg("seed") = 0, "RLT of one witness-complex run on an N x D cloud.");

    m.def(
        "rlt_ensemble",
        [](const RowMatrix& points, double gamma, std::size_t l0, std::size_t n, std::size_t i_max,
           std::uint64_t seed, std::size_t threads) {
            const auto runs = rlt_ensemble(PointCloud(points), rlt_params(gamma, l0, n, i_max), seed, threads);
            std::vector<Distribution> out;
            for (const auto& r : runs) out.push_back(r.mass);
            return out;
        },
        py::arg("points"), py::arg("gamma") = 1.0 / 128.0, py::arg("l0") = 64, py::arg("n") = 100,
        py::arg("i_max") = 100, py::arg("seed") = 0, py::arg("threads") = 1);

    m.def("w2_exact", &w2_exact_1d, py::arg("p"), py::arg("q"));

    m.def(
        "sinkhorn",
        [](const Distribution& p, const Distribution& q, double epsilon, double tau, std::size_t max_iter,
           double tol, bool debiased) {
            const auto g = GroundCost::squared_index(p.size());
            const auto prm = ot_params(epsilon, tau, max_iter, tol);
            const auto r = debiased ? sinkhorn_debiased(p, q, g, prm) : sinkhorn_unbalanced(p, q, g, prm);
            py::dict out;
            out["cost"] = r.cost;
            out["transport"] = r.transport;
            out["iterations"] = r.iterations;
            out["last_delta"] = r.last_delta;
            return out;
        },
        py::arg("p"), py::arg("q"), py::arg("epsilon") = 1e-5, py::arg("tau") = 1.0, py::arg("max_iter") = 2000,
        py::arg("tol") = 1e-9, py::arg("debiased") = false,
        "Entropic unbalanced transport under the (i - j)^2 bin cost.");

    m.def(
        "barycenter",
        [](const std::vector<Distribution>& ps, std::vector<double> weights, double epsilon, double tau,
           std::size_t max_iter) {
            if (ps.empty()) throw ParameterError("barycenter of an empty list");
            if (weights.empty()) weights.assign(ps.size(), 1.0 / static_cast<double>(ps.size()));
            const auto g = GroundCost::squared_index(ps.front().size());
            return wasserstein_barycenter(ps, weights, g, ot_params(epsilon, tau, max_iter, 1e-9)).mass;
        },
        py::arg("ps"), py::arg("weights") = std::vector<double>{}, py::arg("epsilon") = 1e-5,
        py::arg("tau") = 1.0, py::arg("max_iter") = 2000);

    m.def(
        "score",
        [](const py::dict& dataset, std::optional<py::dict> real, double gamma, std::size_t l0, std::size_t n,
           std::size_t i_max, std::size_t c_max, std::uint64_t seed, std::size_t threads) {
            ScoreConfig cfg;
            cfg.rlt = rlt_params(gamma, l0, n, i_max);
            cfg.c_max = c_max;
            cfg.seed = seed;
            cfg.threads = threads;
            const auto gen = from_python(dataset);
            const auto report =
                real ? score_dataset_supervised(gen, from_python(*real), cfg) : score_dataset(gen, cfg);
            // The report travels as its canonical JSON.
            auto json = py::module_::import("json");
            return json.attr("loads")(report_json(report, cfg));
        },
        py::arg("dataset"), py::arg("real") = py::none(), py::arg("gamma") = 1.0 / 128.0, py::arg("l0") = 64,
        py::arg("n") = 100, py::arg("i_max") = 100, py::arg("c_max") = 0, py::arg("seed") = 0,
        py::arg("threads") = 1, "Disentanglement report; pass `real` for the supervised score.");

    m.def(
        "read_cloud", [](const std::filesystem::path& path) { return RowMatrix(read_cloud(path).points()); },
        py::arg("path"));
    m.def(
        "write_cloud", [](const RowMatrix& points, const std::filesystem::path& path) {
            write_cloud(PointCloud(points), path);
        },
        py::arg("points"), py::arg("path"));
    m.def(
        "read_dataset", [](const std::filesystem::path& manifest) { return to_python(read_dataset(manifest)); },
        py::arg("manifest"));
    m.def(
        "write_dataset",
        [](const py::dict& dataset, const std::filesystem::path& manifest) {
            write_dataset(from_python(dataset), manifest);
        },
        py::arg("dataset"), py::arg("manifest"));
}

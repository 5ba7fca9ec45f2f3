#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "ghostproj/cutoff.hpp"
#include "ghostproj/experiment.hpp"
#include "ghostproj/nonneg.hpp"
#include "ghostproj/optimize.hpp"
#include "ghostproj/parallel.hpp"

namespace py = pybind11;
using namespace ghostproj;

namespace {

py::array_t<double> to_array(const Image& image)
{
    py::array_t<double> out({image.rows(), image.cols()});
    std::copy(image.values().begin(), image.values().end(), out.mutable_data());
    return out;
}

Image to_image(const py::array_t<double, py::array::c_style | py::array::forcecast>& a)
{
    if (a.ndim() != 2)
        throw std::invalid_argument("expected a 2-d array");
    const int rows = static_cast<int>(a.shape(0));
    const int cols = static_cast<int>(a.shape(1));
    std::vector<double> v(a.data(), a.data() + static_cast<std::size_t>(rows) * cols);
    return Image(rows, cols, std::move(v));
}

ExperimentConfig config_from_dict(const py::dict& d)
{
    KeyValues kv;
    for (auto item : d)
        kv.emplace_back(py::str(item.first).cast<std::string>(),
                        py::str(item.second).cast<std::string>());
    return ExperimentConfig::from_key_values(kv);
}

} // namespace

PYBIND11_MODULE(_core, m)
{
    m.doc() = "ghost-projection simulation and planning toolkit";
    m.attr("__version__") = kVersion;

    m.def("set_thread_count", &set_thread_count, py::arg("threads"));

    m.def(
        "phantom",
        [](int rows, int cols, const std::string& contrast) {
            return to_array(phantom(rows, cols, contrast));
        },
        py::arg("rows") = 40, py::arg("cols") = 40, py::arg("contrast") = "raw");

    py::class_<BasisSpec>(m, "BasisSpec")
        .def(py::init([](int rows, int cols, std::uint64_t count,
                         const std::string& distribution, double mu, double sigma,
                         std::uint64_t seed) {
                 BasisSpec s;
                 s.rows = rows;
                 s.cols = cols;
                 s.count = count;
                 s.distribution = distribution_from_string(distribution);
                 s.mu = mu;
                 s.sigma = sigma;
                 s.master_seed = seed;
                 return s;
             }),
             py::arg("rows"), py::arg("cols"), py::arg("count"),
             py::arg("distribution") = "uniform01", py::arg("mu") = 0.5,
             py::arg("sigma") = 0.1, py::arg("seed") = 0)
        .def_readwrite("rows", &BasisSpec::rows)
        .def_readwrite("cols", &BasisSpec::cols)
        .def_readwrite("count", &BasisSpec::count)
        .def_readwrite("master_seed", &BasisSpec::master_seed);

    py::class_<DistributionMoments>(m, "DistributionMoments")
        .def_readonly("mean", &DistributionMoments::mean)
        .def_readonly("variance", &DistributionMoments::variance)
        .def_readonly("second_moment", &DistributionMoments::second_moment);

    m.def("moments", [](const BasisSpec& spec) { return moments(spec); });

    py::class_<RandomBasis>(m, "RandomBasis")
        .def(py::init<BasisSpec, std::size_t>(), py::arg("spec"),
             py::arg("memory_cap_bytes") = RandomBasis::kDefaultMemoryCap)
        .def_property_readonly("spec", &RandomBasis::spec)
        .def_property_readonly("moments", &RandomBasis::moments)
        .def("mask",
             [](const RandomBasis& b, std::uint64_t k) {
                 return to_array(Image(b.spec().rows, b.spec().cols, b.mask(k)));
             },
             py::arg("k"))
        .def("pixel", &RandomBasis::pixel, py::arg("k"), py::arg("p"));

    m.def(
        "pseudo_correlation",
        [](const RandomBasis& basis, const py::array_t<double>& image) {
            return pseudo_correlation(basis, to_image(image));
        },
        py::arg("basis"), py::arg("image"));

    py::class_<CorrelationStats>(m, "CorrelationStats")
        .def_readonly("expected", &CorrelationStats::expected)
        .def_readonly("variance", &CorrelationStats::variance);

    m.def(
        "correlation_stats",
        [](const BasisSpec& spec, const py::array_t<double>& image) {
            return correlation_stats(moments(spec), to_image(image));
        },
        py::arg("spec"), py::arg("image"));

    py::class_<FilterSelection>(m, "FilterSelection")
        .def_readonly("cutoff", &FilterSelection::cutoff)
        .def_readonly("x", &FilterSelection::x)
        .def_readonly("kept_fraction", &FilterSelection::kept_fraction)
        .def_readonly("kept_indices", &FilterSelection::kept_indices)
        .def_readonly("n_kept", &FilterSelection::n_kept)
        .def_readonly("gamma", &FilterSelection::gamma)
        .def_readonly("xi", &FilterSelection::xi);

    m.def("filter_basis", &filter_basis, py::arg("correlations"), py::arg("stats"),
          py::arg("cutoff"));
    m.def("optimal_cutoff_x", &optimal_cutoff_x);
    m.def("solve_optimal_x", &solve_optimal_x, py::arg("a"));
    m.def("approx_optimal_x", &approx_optimal_x, py::arg("a"));
    m.def("cutoff_a", &cutoff_a, py::arg("n"), py::arg("lambda_"), py::arg("nm"),
          py::arg("mask_mean"), py::arg("mask_variance"), py::arg("image_second_moment"));

    py::class_<NonNegBasis>(m, "NonNegBasis")
        .def_static("construct", &construct, py::arg("dimension"))
        .def_readonly("dimension", &NonNegBasis::dimension)
        .def_property_readonly("vectors", [](const NonNegBasis& b) {
            py::array_t<double> out(
                {static_cast<py::ssize_t>(b.vectors.rows()),
                 static_cast<py::ssize_t>(b.vectors.cols())});
            Eigen::Map<Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic,
                                     Eigen::RowMajor>>(
                out.mutable_data(), b.vectors.rows(), b.vectors.cols()) = b.vectors;
            return out;
        });

    py::class_<RunResult>(m, "RunResult")
        .def_readonly("predicted_snr", &RunResult::predicted_snr)
        .def_readonly("simulated_snr", &RunResult::simulated_snr)
        .def_readonly("pedestal_predicted", &RunResult::pedestal_predicted)
        .def_readonly("pedestal_observed", &RunResult::pedestal_observed)
        .def_readonly("n_kept", &RunResult::n_kept)
        .def_readonly("report_path", &RunResult::report_path);

    m.def(
        "run_experiment",
        [](const py::dict& config) { return run_experiment(config_from_dict(config)); },
        py::arg("config"),
        "Run a scheme described by a flat dict of the config keys (all values "
        "stringifiable).");
}

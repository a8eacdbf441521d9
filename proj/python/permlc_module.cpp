#include <pybind11/complex.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <complex>
#include <cstdint>
#include <vector>

#include "permlc/density.hpp"
#include "permlc/errors.hpp"
#include "permlc/estimators.hpp"
#include "permlc/exact_permanent.hpp"
#include "permlc/hermitian_core.hpp"
#include "permlc/jacobi.hpp"
#include "permlc/matrix_io.hpp"

namespace py = pybind11;
using namespace permlc;

namespace {

ComplexMatrix matrix_from_array(const py::array_t<Complex, py::array::c_style | py::array::forcecast>& arr) {
    if (arr.ndim() != 2 || arr.shape(0) != arr.shape(1))
        throw BadInput("expected a square 2d array");
    const std::size_t n = static_cast<std::size_t>(arr.shape(0));
    ComplexMatrix m(n);
    const Complex* data = arr.data();
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) m(i, j) = data[i * n + j];
    return m;
}

py::array_t<Complex> matrix_to_array(const ComplexMatrix& m) {
    const std::size_t n = m.size();
    py::array_t<Complex> arr({n, n});
    Complex* data = arr.mutable_data();
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) data[i * n + j] = m(i, j);
    return arr;
}

PointC point_from_array(const py::array_t<Complex, py::array::c_style | py::array::forcecast>& arr) {
    if (arr.ndim() != 1) throw BadInput("expected a 1d complex array");
    PointC p = PointC::zero(static_cast<std::size_t>(arr.shape(0)));
    const Complex* data = arr.data();
    for (std::size_t k = 0; k < p.size(); ++k) p.z[k] = data[k];
    return p;
}

template <typename T>
py::array_t<T> vector_to_array(const std::vector<T>& v) {
    py::array_t<T> arr(static_cast<py::ssize_t>(v.size()));
    T* data = arr.mutable_data();
    for (std::size_t i = 0; i < v.size(); ++i) data[i] = v[i];
    return arr;
}

SamplerConfig config_from_kwargs(std::uint64_t seed, int chains, int steps_per_phase, int burn_in,
                                 const std::vector<double>& schedule, double step_size,
                                 const std::string& proposal, int threads) {
    SamplerConfig cfg;
    cfg.seed = seed;
    cfg.chains = chains;
    cfg.steps_per_phase = steps_per_phase;
    cfg.burn_in = burn_in;
    cfg.anneal_schedule = schedule;
    cfg.step_size = step_size;
    cfg.threads = threads;
    if (proposal == "langevin")
        cfg.proposal = Proposal::langevin;
    else if (proposal == "randomWalk")
        cfg.proposal = Proposal::randomWalk;
    else
        throw BadInput("proposal must be 'langevin' or 'randomWalk'");
    return cfg;
}

py::dict report_to_dict(const EstimateReport& r) {
    py::dict d;
    d["method"] = method_name(r.method);
    d["estimate"] = r.estimate;
    d["stdError"] = r.std_error;
    d["ess"] = r.effective_sample_size;
    d["acceptanceRates"] = r.acceptance_rates;
    d["samplesUsed"] = r.samples_used;
    d["seed"] = r.seed;
    d["wallClockSeconds"] = r.wall_clock_seconds;
    d["schedule"] = r.schedule;
    return d;
}

}  // namespace

PYBIND11_MODULE(_permlc, m) {
    m.doc() =
        "permanents of positive definite Hermitian matrices with spectrum in [1, 2]: "
        "exact oracles, the log-concave integrand, and Monte Carlo estimators";

    py::register_exception<SpectrumOutOfRange>(m, "SpectrumOutOfRange", PyExc_ValueError);
    py::register_exception<DimensionTooLarge>(m, "DimensionTooLarge", PyExc_ValueError);
    py::register_exception<DimensionMismatch>(m, "DimensionMismatch", PyExc_ValueError);
    py::register_exception<ChainDiverged>(m, "ChainDiverged", PyExc_RuntimeError);
    py::register_exception<NonFiniteWeight>(m, "NonFiniteWeight", PyExc_RuntimeError);
    py::register_exception<InsufficientSamples>(m, "InsufficientSamples", PyExc_ValueError);
    py::register_exception<BadInput>(m, "BadInput", PyExc_ValueError);

    py::class_<HermitianMatrix>(m, "HermitianMatrix")
        .def_static(
            "from_array",
            [](const py::array_t<Complex, py::array::c_style | py::array::forcecast>& arr,
               double tol) { return HermitianMatrix::from_matrix(matrix_from_array(arr), tol); },
            py::arg("array"), py::arg("tol") = 1e-12,
            "Build from a square complex array; rejects asymmetry beyond tol.")
        .def_static("identity", &HermitianMatrix::identity, py::arg("n"))
        .def_static("zero", &HermitianMatrix::zero, py::arg("n"))
        .def_property_readonly("n", &HermitianMatrix::size)
        .def("to_array", [](const HermitianMatrix& self) { return matrix_to_array(self.matrix()); })
        .def("to_json", &matrix_to_json)
        .def("__repr__", [](const HermitianMatrix& self) {
            return "<HermitianMatrix n=" + std::to_string(self.size()) + ">";
        });

    m.def("parse_matrix_json", &parse_matrix_json, py::arg("text"));
    m.def("read_matrix_file", &read_matrix_file, py::arg("path"));
    m.def("write_matrix_file", &write_matrix_file, py::arg("path"), py::arg("matrix"));

    m.def("random_instance", &random_instance, py::arg("n"), py::arg("spread"), py::arg("seed"),
          "Haar-conjugated random matrix with spectrum in [1, 1 + spread].");

    m.def(
        "spectrum",
        [](const HermitianMatrix& a) {
            const auto d = spectral_decompose(a);
            return vector_to_array(d.eigenvalues);
        },
        py::arg("matrix"), "Ascending eigenvalues via the cyclic Jacobi iteration.");

    m.def(
        "split_identity",
        [](const HermitianMatrix& a, double tol) { return split_identity(a, tol); },
        py::arg("matrix"), py::arg("tol") = kSpectrumTol);

    m.def(
        "factor_psd",
        [](const HermitianMatrix& b, double tol) { return factor_psd(b, tol).rows; },
        py::arg("matrix"), py::arg("tol") = kSpectrumTol,
        "Rows of L with B = L L*, via the spectral square root.");

    m.def(
        "permanent_definition",
        [](const py::array_t<Complex, py::array::c_style | py::array::forcecast>& arr) {
            return permanent_definition(matrix_from_array(arr)).value;
        },
        py::arg("matrix"), "Permutation-sum permanent, n <= 10.");
    m.def(
        "permanent_ryser",
        [](const py::array_t<Complex, py::array::c_style | py::array::forcecast>& arr) {
            return permanent_ryser(matrix_from_array(arr)).value;
        },
        py::arg("matrix"), "Gray-code Ryser permanent, n <= 28.");
    m.def(
        "subset_expansion",
        [](const HermitianMatrix& b) { return subset_expansion(b).value; },
        py::arg("matrix"), "Sum of permanents of all principal submatrices, n <= 12.");

    py::class_<DensityModel>(m, "DensityModel")
        .def_property_readonly("n", &DensityModel::size)
        .def_property_readonly("log_normalizer", &DensityModel::log_normalizer)
        .def("forms", [](const DensityModel& d) { return matrix_to_array(d.forms().rows); })
        .def("q_matrix",
             [](const DensityModel& d) { return matrix_to_array(d.q_matrix().matrix()); })
        .def(
            "log_density",
            [](const DensityModel& d,
               const py::array_t<Complex, py::array::c_style | py::array::forcecast>& z,
               double beta) { return log_density_scaled(d, point_from_array(z), beta); },
            py::arg("z"), py::arg("beta") = 1.0)
        .def(
            "grad_log_density",
            [](const DensityModel& d,
               const py::array_t<Complex, py::array::c_style | py::array::forcecast>& z,
               double beta) {
                return vector_to_array(grad_log_density_scaled(d, point_from_array(z), beta));
            },
            py::arg("z"), py::arg("beta") = 1.0,
            "Gradient over R^{2n}, layout (x_1..x_n, y_1..y_n).")
        .def(
            "linear_forms",
            [](const DensityModel& d,
               const py::array_t<Complex, py::array::c_style | py::array::forcecast>& z) {
                return vector_to_array(eval_linear_forms(d, point_from_array(z)));
            },
            py::arg("z"))
        .def("check_q_psd", [](const DensityModel& d) { return check_q_psd(d); })
        .def("to_json", &density_to_json,
             "Forms and q-matrix in the shared matrix JSON layout.")
        .def("__repr__", [](const DensityModel& d) {
            return "<DensityModel n=" + std::to_string(d.size()) + ">";
        });

    m.def("build_density", &build_density, py::arg("matrix"), py::arg("tol") = kSpectrumTol);

    m.def("check_logconcavity", &check_logconcavity, py::arg("density"), py::arg("trials"),
          py::arg("seed"), "Violation count over random segment triples; 0 when admissible.");

    m.def(
        "check_lemma_concavity",
        [](const py::array_t<double, py::array::c_style | py::array::forcecast>& coeffs,
           int trials, std::uint64_t seed) {
            if (coeffs.ndim() != 2 || coeffs.shape(0) != coeffs.shape(1))
                throw BadInput("expected a square 2d array");
            QuadraticForm q;
            q.dim = static_cast<std::size_t>(coeffs.shape(0));
            q.coeffs.assign(coeffs.data(), coeffs.data() + q.dim * q.dim);
            return check_lemma_concavity(q, trials, seed);
        },
        py::arg("coeffs"), py::arg("trials"), py::arg("seed"),
        "Midpoint-concavity violations of ln(1+q) - q for the PSD form q.");

    m.def(
        "sample_complex_gaussian",
        [](std::size_t n, std::int64_t count, std::uint64_t seed) {
            const auto draws = sample_complex_gaussian(n, count, seed);
            py::array_t<Complex> arr({static_cast<std::size_t>(count), n});
            Complex* data = arr.mutable_data();
            for (std::size_t i = 0; i < draws.size(); ++i)
                for (std::size_t k = 0; k < n; ++k) data[i * n + k] = draws[i].z[k];
            return arr;
        },
        py::arg("n"), py::arg("count"), py::arg("seed"));

    const auto estimator =
        [](const DensityModel& d, const std::string& method, std::uint64_t seed, int chains,
           int steps_per_phase, int burn_in, const std::vector<double>& schedule,
           double step_size, const std::string& proposal, int threads) {
            const SamplerConfig cfg = config_from_kwargs(seed, chains, steps_per_phase, burn_in,
                                                         schedule, step_size, proposal, threads);
            EstimateReport report;
            {
                py::gil_scoped_release nogil;
                report = method == "direct" ? estimate_direct(d, cfg) : estimate_anneal(d, cfg);
            }
            return report_to_dict(report);
        };

    m.def(
        "estimate_direct",
        [estimator](const DensityModel& d, std::uint64_t seed, int chains, int steps_per_phase,
                    int burn_in, const std::vector<double>& schedule, double step_size,
                    const std::string& proposal, int threads) {
            return estimator(d, "direct", seed, chains, steps_per_phase, burn_in, schedule,
                             step_size, proposal, threads);
        },
        py::arg("density"), py::arg("seed") = 0, py::arg("chains") = 4,
        py::arg("steps_per_phase") = 5000, py::arg("burn_in") = 1000,
        py::arg("schedule") = std::vector<double>{}, py::arg("step_size") = 0.0,
        py::arg("proposal") = "langevin", py::arg("threads") = 0,
        "per A as a Gaussian expectation; returns the report as a dict.");

    m.def(
        "estimate_anneal",
        [estimator](const DensityModel& d, std::uint64_t seed, int chains, int steps_per_phase,
                    int burn_in, const std::vector<double>& schedule, double step_size,
                    const std::string& proposal, int threads) {
            return estimator(d, "anneal", seed, chains, steps_per_phase, burn_in, schedule,
                             step_size, proposal, threads);
        },
        py::arg("density"), py::arg("seed") = 0, py::arg("chains") = 4,
        py::arg("steps_per_phase") = 5000, py::arg("burn_in") = 1000,
        py::arg("schedule") = std::vector<double>{}, py::arg("step_size") = 0.0,
        py::arg("proposal") = "langevin", py::arg("threads") = 0,
        "Annealed importance sampling estimate; returns the report as a dict.");

    m.def(
        "wick_check",
        [](const HermitianMatrix& b, std::uint64_t seed, int chains, int steps_per_phase) {
            SamplerConfig cfg;
            cfg.seed = seed;
            cfg.chains = chains;
            cfg.steps_per_phase = steps_per_phase;
            EstimateReport report;
            {
                py::gil_scoped_release nogil;
                report = wick_check(b, cfg);
            }
            return report_to_dict(report);
        },
        py::arg("matrix"), py::arg("seed") = 0, py::arg("chains") = 4,
        py::arg("steps_per_phase") = 5000,
        "Monte Carlo estimate of per B as a Gaussian moment, n <= 10.");

    m.def(
        "diagnostics",
        [](const std::vector<std::vector<double>>& traces) {
            const Diagnostics diag = diagnostics(traces);
            py::dict d;
            d["ess"] = diag.effective_sample_size;
            d["splitRhat"] = diag.split_rhat;
            d["degenerate"] = diag.degenerate;
            return d;
        },
        py::arg("chain_traces"), "ESS and split R-hat for per-chain scalar traces.");

    m.def("default_anneal_schedule", &default_anneal_schedule, py::arg("n"));
    m.def("default_step_size", &default_step_size, py::arg("n"));

    m.attr("__version__") = "0.1.0";
}

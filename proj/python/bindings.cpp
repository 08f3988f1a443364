#include "superx/commands.hpp"
#include "superx/config.hpp"
#include "superx/domain.hpp"
#include "superx/empirical.hpp"
#include "superx/errors.hpp"
#include "superx/fdd.hpp"
#include "superx/gauss.hpp"
#include "superx/ppp.hpp"
#include "superx/stattest.hpp"

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <sstream>

namespace py = pybind11;
using namespace superx;

namespace {

py::dict estimate_dict(const Estimate& e) {
  py::dict d;
  d["value"] = e.value;
  d["standard_error"] = e.standard_error;
  return d;
}

py::dict report_dict(const TestReport& r) {
  py::dict d;
  d["description"] = r.description;
  d["statistic"] = r.statistic;
  d["threshold"] = r.threshold;
  d["n_samples"] = r.n_samples;
  d["pass"] = r.pass;
  d["informational"] = r.informational;
  return d;
}

LimitSampling sampling(std::size_t samples, std::size_t truncation, double significance, std::uint64_t seed) {
  LimitSampling s;
  s.samples = samples;
  s.truncation = truncation;
  s.significance = significance;
  s.seed = seed;
  return s;
}

FddQuery make_query(std::vector<double> times, std::vector<std::size_t> sites, Eigen::MatrixXd thresholds) {
  FddQuery q{std::move(times), std::move(sites), std::move(thresholds)};
  q.validate();
  return q;
}

}  // namespace

PYBIND11_MODULE(_superx, m) {
  m.doc() = "Superextremal processes: simulation, exponent measures and property tests";

  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<NumericalError>(m, "NumericalError", PyExc_ArithmeticError);
  py::register_exception<IoError>(m, "IoError", PyExc_OSError);

  // domain
  py::class_<Grid>(m, "Grid")
      .def(py::init<Eigen::MatrixXd, std::size_t>(), py::arg("coordinates"), py::arg("origin_index") = 0)
      .def_property_readonly("size", &Grid::size)
      .def_property_readonly("dimension", &Grid::dimension)
      .def_property_readonly("origin_index", &Grid::origin_index)
      .def_property_readonly("coordinates", &Grid::coordinates)
      .def_property_readonly("distances", &Grid::distances)
      .def("restrict_to", &Grid::restrict_to, py::arg("sites"))
      .def("__len__", &Grid::size);

  m.def(
      "build_grid",
      [](int dimension, double extent, int resolution, std::size_t origin_index, std::size_t site_cap) {
        return build_grid({dimension, extent, resolution, origin_index, site_cap});
      },
      py::arg("dimension") = 1, py::arg("extent") = 1.0, py::arg("resolution") = 11,
      py::arg("origin_index") = 0, py::arg("site_cap") = 400);

  py::class_<Variogram>(m, "Variogram")
      .def(py::init<double, double>(), py::arg("scale") = 1.0, py::arg("exponent") = 1.0)
      .def_property_readonly("scale", &Variogram::scale)
      .def_property_readonly("exponent", &Variogram::exponent)
      .def("__call__", py::overload_cast<double>(&Variogram::operator(), py::const_), py::arg("distance"));

  m.def("variogram_matrix", &variogram_matrix, py::arg("grid"), py::arg("variogram"));
  m.def("increment_covariance", &increment_covariance, py::arg("grid"), py::arg("variogram"));

  // gauss
  py::class_<SampleSize>(m, "SampleSize")
      .def(py::init<std::int64_t>(), py::arg("n"))
      .def_static("from_log", &SampleSize::from_log, py::arg("log_n"))
      .def_property_readonly("log_n", &SampleSize::log_n)
      .def_property_readonly("value", &SampleSize::value);
  py::implicitly_convertible<py::int_, SampleSize>();

  m.def("scaling_bn", &scaling_bn, py::arg("n"));
  m.def("scaling_ratio", &scaling_ratio, py::arg("n"));
  m.def(
      "correlation_matrix",
      [](const Grid& g, const Variogram& v, SampleSize n) { return CovarianceFamily(v, n).matrix(g); },
      py::arg("grid"), py::arg("variogram"), py::arg("n"));
  m.def(
      "cholesky_psd",
      [](const Eigen::MatrixXd& a, double ridge) {
        const auto f = cholesky_psd(a, ridge);
        return py::make_tuple(f.lower, f.ridge);
      },
      py::arg("matrix"), py::arg("ridge") = 1e-10);
  m.def(
      "sample_gp",
      [](const Grid& g, const Eigen::MatrixXd& cov, std::size_t count, std::uint64_t seed, std::uint32_t channel) {
        const auto draws = sample_gp(g, cov, count, seed, channel);
        Eigen::MatrixXd out(static_cast<Eigen::Index>(count), static_cast<Eigen::Index>(g.size()));
        for (std::size_t i = 0; i < count; ++i) out.row(static_cast<Eigen::Index>(i)) = draws[i].transpose();
        return out;
      },
      py::arg("grid"), py::arg("covariance"), py::arg("count"), py::arg("seed"), py::arg("channel") = 0);
  m.def("sample_W", &sample_W, py::arg("grid"), py::arg("variogram"), py::arg("seed"), py::arg("index") = 0);
  m.def("lognormal_X", &lognormal_X, py::arg("z"), py::arg("n"));
  m.def("conditional_mean", &conditional_mean, py::arg("w"), py::arg("n"), py::arg("grid"), py::arg("variogram"));
  m.def("conditional_cov", &conditional_cov, py::arg("n"), py::arg("grid"), py::arg("variogram"));
  m.def(
      "exceedance_rate",
      [](const Grid& g, const Variogram& v, SampleSize n, std::vector<std::size_t> sites,
         std::vector<double> thresholds, std::size_t draws, std::uint64_t seed, const std::string& estimator) {
        if (estimator != "importance" && estimator != "crude")
          throw ArgumentError("estimator must be 'importance' or 'crude'");
        const auto kind = estimator == "crude" ? TailEstimator::crude : TailEstimator::importance;
        return estimate_dict(exceedance_rate(g, v, n, {std::move(sites), std::move(thresholds)}, draws, seed, kind));
      },
      py::arg("grid"), py::arg("variogram"), py::arg("n"), py::arg("sites"), py::arg("thresholds"),
      py::arg("draws"), py::arg("seed"), py::arg("estimator") = "importance");

  // empirical
  py::class_<CadlagMaxProcess>(m, "CadlagMaxProcess")
      .def_readonly("times", &CadlagMaxProcess::times)
      .def_readonly("values", &CadlagMaxProcess::values)
      .def("at", &CadlagMaxProcess::at, py::arg("u"), py::arg("site"));
  m.def(
      "partial_maxima",
      [](const Eigen::MatrixXd& batch, std::size_t n, std::vector<double> u_grid) {
        std::vector<SampleFunction> rows;
        for (Eigen::Index i = 0; i < batch.rows(); ++i) rows.emplace_back(batch.row(i).transpose());
        return partial_maxima(rows, n, u_grid);
      },
      py::arg("batch"), py::arg("n"), py::arg("u_grid"));

  // ppp
  py::class_<SpectralSampler>(m, "SpectralSampler")
      .def_property_readonly("alpha", &SpectralSampler::alpha)
      .def_property_readonly("size", &SpectralSampler::size)
      .def(
          "draw",
          [](const SpectralSampler& s, std::uint64_t seed, std::uint64_t stream) {
            Rng rng(seed, stream);
            return s.draw(rng);
          },
          py::arg("seed"), py::arg("stream") = 0);
  py::class_<DegenerateSpectral, SpectralSampler>(m, "DegenerateSpectral")
      .def(py::init<std::size_t, double>(), py::arg("sites"), py::arg("alpha") = 1.0);
  py::class_<BrownResnickSpectral, SpectralSampler>(m, "BrownResnickSpectral")
      .def(py::init<const Grid&, const Variogram&, double>(), py::arg("grid"), py::arg("variogram"),
           py::arg("alpha") = 1.0);

  py::class_<PointMeasure>(m, "PointMeasure")
      .def_readonly("horizon", &PointMeasure::horizon)
      .def_readonly("truncation_count", &PointMeasure::truncation_count)
      .def_property_readonly("magnitudes",
                             [](const PointMeasure& pm) {
                               Eigen::VectorXd r(static_cast<Eigen::Index>(pm.atoms.size()));
                               for (std::size_t k = 0; k < pm.atoms.size(); ++k)
                                 r(static_cast<Eigen::Index>(k)) = pm.atoms[k].magnitude;
                               return r;
                             })
      .def_property_readonly("times",
                             [](const PointMeasure& pm) {
                               Eigen::VectorXd u(static_cast<Eigen::Index>(pm.atoms.size()));
                               for (std::size_t k = 0; k < pm.atoms.size(); ++k)
                                 u(static_cast<Eigen::Index>(k)) = pm.atoms[k].time;
                               return u;
                             })
      .def_property_readonly("spectral",
                             [](const PointMeasure& pm) {
                               Eigen::MatrixXd s(static_cast<Eigen::Index>(pm.atoms.size()),
                                                 static_cast<Eigen::Index>(pm.sites()));
                               for (std::size_t k = 0; k < pm.atoms.size(); ++k)
                                 s.row(static_cast<Eigen::Index>(k)) = pm.atoms[k].spectral.transpose();
                               return s;
                             })
      .def("validate", &PointMeasure::validate)
      .def("__len__", [](const PointMeasure& pm) { return pm.atoms.size(); });

  m.def("sample_ppp",
        py::overload_cast<const SpectralSampler&, double, std::size_t, std::uint64_t, std::uint32_t, std::uint32_t>(
            &sample_ppp),
        py::arg("sampler"), py::arg("horizon"), py::arg("count"), py::arg("seed"), py::arg("channel") = 0,
        py::arg("index") = 0);
  m.def("truncation_bound", &truncation_bound, py::arg("pm"));
  m.def("theta_map", &theta_map, py::arg("pm"), py::arg("sites") = 0);
  m.def(
      "theta_tilde_map",
      [](const PointMeasure& pm, std::vector<double> time_grid, std::size_t sites) {
        return theta_tilde_map(pm, time_grid, sites);
      },
      py::arg("pm"), py::arg("time_grid"), py::arg("sites") = 0);
  m.def("order_stat_map", &order_stat_map, py::arg("pm"), py::arg("rank"), py::arg("u"), py::arg("site"));
  m.def(
      "point_measure_jsonl",
      [](const PointMeasure& pm) {
        std::ostringstream out;
        write_point_measure_jsonl(out, pm);
        return out.str();
      },
      py::arg("pm"));

  // fdd
  m.def(
      "exponent_nu",
      [](std::vector<std::size_t> sites, std::vector<double> z, const SpectralSampler& s, std::size_t draws,
         std::uint64_t seed) { return estimate_dict(exponent_nu(sites, z, s, draws, seed)); },
      py::arg("sites"), py::arg("thresholds"), py::arg("sampler"), py::arg("draws"), py::arg("seed"));
  m.def(
      "exponent_nu_radial",
      [](std::vector<std::size_t> sites, std::vector<double> z, const SpectralSampler& s, std::size_t strata,
         std::size_t per_stratum, std::uint64_t seed, double w_min, double w_max) {
        return estimate_dict(exponent_nu_radial(sites, z, s, strata, per_stratum, seed, w_min, w_max));
      },
      py::arg("sites"), py::arg("thresholds"), py::arg("sampler"), py::arg("strata"), py::arg("per_stratum"),
      py::arg("seed"), py::arg("w_min") = 1e-3, py::arg("w_max") = 1e3);
  m.def(
      "fdd_probability",
      [](std::vector<double> times, std::vector<std::size_t> sites, Eigen::MatrixXd thresholds,
         const SpectralSampler& s, std::size_t draws, std::uint64_t seed) {
        const FddResult r = fdd_probability(make_query(times, sites, thresholds), s, draws, seed);
        py::dict d;
        d["probability"] = r.probability;
        d["standard_error"] = r.standard_error;
        py::list factors;
        for (const auto& f : r.factors) factors.append(estimate_dict(f));
        d["factors"] = factors;
        d["levels"] = r.levels;
        return d;
      },
      py::arg("times"), py::arg("sites"), py::arg("thresholds"), py::arg("sampler"), py::arg("draws"),
      py::arg("seed"));
  m.def(
      "fdd_empirical",
      [](const std::vector<CadlagMaxProcess>& reals, std::vector<double> times, std::vector<std::size_t> sites,
         Eigen::MatrixXd thresholds) { return estimate_dict(fdd_empirical(reals, make_query(times, sites, thresholds))); },
      py::arg("realizations"), py::arg("times"), py::arg("sites"), py::arg("thresholds"));

  // stattest
  m.def("ks_critical_coefficient", &ks_critical_coefficient, py::arg("significance"));
  m.def(
      "ks_statistic",
      [](std::vector<double> a, std::vector<double> b) { return ks_statistic(a, b); }, py::arg("a"), py::arg("b"));
  m.def(
      "ks_two_sample",
      [](std::vector<double> a, std::vector<double> b, double significance) {
        return report_dict(ks_two_sample(a, b, significance));
      },
      py::arg("a"), py::arg("b"), py::arg("significance") = 0.01);
  m.def("poisson_order_stat_cdf", &poisson_order_stat_cdf, py::arg("y"), py::arg("u"), py::arg("rank"),
        py::arg("alpha") = 1.0);
  m.def("superextremal_draws", &superextremal_draws, py::arg("sampler"), py::arg("u"), py::arg("site"),
        py::arg("truncation"), py::arg("count"), py::arg("seed"), py::arg("channel") = 0);
  m.def(
      "test_max_stability",
      [](const SpectralSampler& s, std::size_t copies, double u, std::size_t site, std::size_t samples,
         std::size_t truncation, double significance, std::uint64_t seed) {
        return report_dict(test_max_stability(s, copies, u, site, sampling(samples, truncation, significance, seed)));
      },
      py::arg("sampler"), py::arg("copies"), py::arg("u"), py::arg("site"), py::arg("samples") = 10000,
      py::arg("truncation") = 1000, py::arg("significance") = 0.01, py::arg("seed") = 0);
  m.def(
      "test_self_similarity",
      [](const SpectralSampler& s, double scale, double u, std::size_t site, std::size_t samples,
         std::size_t truncation, double significance, std::uint64_t seed) {
        return report_dict(
            test_self_similarity(s, scale, u, site, sampling(samples, truncation, significance, seed)));
      },
      py::arg("sampler"), py::arg("scale"), py::arg("u"), py::arg("site"), py::arg("samples") = 10000,
      py::arg("truncation") = 1000, py::arg("significance") = 0.01, py::arg("seed") = 0);
  m.def(
      "test_markov",
      [](const SpectralSampler& s, double u, double h, std::size_t site, std::size_t samples, std::size_t truncation,
         double significance, std::uint64_t seed) {
        return report_dict(test_markov(s, u, h, site, sampling(samples, truncation, significance, seed)));
      },
      py::arg("sampler"), py::arg("u"), py::arg("h"), py::arg("site"), py::arg("samples") = 10000,
      py::arg("truncation") = 1000, py::arg("significance") = 0.01, py::arg("seed") = 0);
  m.def(
      "test_order_stat_law",
      [](const SpectralSampler& s, std::size_t rank, double u, std::size_t site, double max_distance,
         std::size_t samples, std::size_t truncation, std::uint64_t seed) {
        return report_dict(
            test_order_stat_law(s, rank, u, site, max_distance, sampling(samples, truncation, 0.01, seed)));
      },
      py::arg("sampler"), py::arg("rank"), py::arg("u"), py::arg("site"), py::arg("max_distance") = 0.03,
      py::arg("samples") = 10000, py::arg("truncation") = 1000, py::arg("seed") = 0);

  // harness commands; the config is a JSON or key = value string
  m.def(
      "resolve_config", [](const std::string& text) { return to_json(parse_config(text)).dump(); },
      py::arg("config"));
  m.def(
      "simulate", [](const std::string& text, const std::filesystem::path& out) {
        return cmd_simulate(parse_config(text), out);
      },
      py::arg("config"), py::arg("out"));
  m.def(
      "convergence", [](const std::string& text, const std::filesystem::path& out) {
        return cmd_convergence(parse_config(text), out);
      },
      py::arg("config"), py::arg("out"));
  m.def(
      "run_tests",
      [](const std::string& text, const std::filesystem::path& out) {
        std::ostringstream log;
        const int code = cmd_test(parse_config(text), out, log);
        return py::make_tuple(code, log.str());
      },
      py::arg("config"), py::arg("out"));
  m.def(
      "fdd",
      [](const std::string& text, std::vector<double> times, std::vector<std::size_t> sites,
         Eigen::MatrixXd thresholds, const std::filesystem::path& out) {
        return cmd_fdd(parse_config(text), make_query(times, sites, thresholds), out);
      },
      py::arg("config"), py::arg("times"), py::arg("sites"), py::arg("thresholds"), py::arg("out"));
}

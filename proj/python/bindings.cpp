#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <sstream>

#include "xrai/errors.hpp"
#include "xrai/eval/metrics.hpp"
#include "xrai/eval/verify.hpp"
#include "xrai/families/encoding.hpp"
#include "xrai/families/monomial.hpp"
#include "xrai/io/archive.hpp"
#include "xrai/io/cli.hpp"
#include "xrai/io/config_io.hpp"
#include "xrai/io/manifest.hpp"
#include "xrai/nn/loss.hpp"
#include "xrai/pipeline/inet.hpp"
#include "xrai/pipeline/lambda.hpp"

namespace py = pybind11;
using namespace xrai;

namespace {

using families::Exponents;
using nn::Matrix;
using pipeline::ExperimentConfig;

families::Polynomial make_polynomial(const std::vector<double>& coeffs, int n, int d) {
  return families::Polynomial(n, d, coeffs);
}

std::vector<int> encoding_of(const pipeline::LambdaRecord& r) {
  const auto* f = std::get_if<families::BooleanFunction>(&r.function);
  if (!f) return {};
  return {f->minterms().begin(), f->minterms().end()};
}

py::tuple loss_tuple(const nn::LossResult& r) { return py::make_tuple(r.value, r.grad); }

}  // namespace

PYBIND11_MODULE(_xrai, m) {
  m.doc() = "Lambda-net populations, interpretation networks and their oracles";
  m.attr("__version__") = io::kToolVersion;

  static py::exception<Error> base(m, "Error", PyExc_RuntimeError);
  py::register_exception<ConfigError>(m, "ConfigError", base.ptr());
  py::register_exception<EncodingError>(m, "EncodingError", base.ptr());
  py::register_exception<DimensionError>(m, "DimensionError", base.ptr());
  py::register_exception<FormatError>(m, "FormatError", base.ptr());
  py::register_exception<DigestMismatchError>(m, "DigestMismatchError", base.ptr());
  py::register_exception<DivergenceError>(m, "DivergenceError", base.ptr());

  // families
  m.def("enumerate_monomials", &families::enumerate_monomials, py::arg("n"), py::arg("d"),
        "Exponent tuples in canonical order (degree, max exponent, lexicographic; all descending).");
  m.def("monomial_count", &families::monomial_count, py::arg("n"), py::arg("d"));
  m.def(
      "encode_polynomial",
      [](const std::map<Exponents, double>& terms, int n, int d) {
        return families::encode_polynomial(terms, n, d).coeffs();
      },
      py::arg("terms"), py::arg("n"), py::arg("d"));
  m.def(
      "eval_polynomial",
      [](const std::vector<double>& coeffs, int n, int d, const std::vector<double>& x) {
        return families::eval_polynomial(make_polynomial(coeffs, n, d), x);
      },
      py::arg("coeffs"), py::arg("n"), py::arg("d"), py::arg("x"));
  m.def(
      "polynomial_to_string",
      [](const std::vector<double>& coeffs, int n, int d) {
        return families::to_string(make_polynomial(coeffs, n, d));
      },
      py::arg("coeffs"), py::arg("n"), py::arg("d"));
  m.def(
      "encode_boolean",
      [](const std::vector<std::uint8_t>& table) { return families::encode_boolean(table).minterms(); },
      py::arg("truth_table"));
  m.def(
      "decode_boolean",
      [](const std::vector<double>& raw) { return families::decode_boolean(raw).minterms(); },
      py::arg("raw"));
  m.def(
      "eval_boolean",
      [](const std::vector<std::uint8_t>& minterms, const std::vector<std::uint8_t>& assignment) {
        const int n = families::variables_for_length(minterms.size());
        return static_cast<int>(families::eval_boolean(families::BooleanFunction(n, minterms), assignment));
      },
      py::arg("minterms"), py::arg("assignment"));
  m.def(
      "boolean_to_string",
      [](const std::vector<std::uint8_t>& minterms) {
        const int n = families::variables_for_length(minterms.size());
        return families::to_string(families::BooleanFunction(n, minterms));
      },
      py::arg("minterms"));

  // losses
  m.def("loss_bce", [](const Matrix& p, const Matrix& t) { return loss_tuple(nn::loss_bce(p, t)); });
  m.def("loss_mae", [](const Matrix& p, const Matrix& t) { return loss_tuple(nn::loss_mae(p, t)); });
  m.def("loss_boolean", [](const Matrix& p, const Matrix& t) { return loss_tuple(nn::loss_boolean(p, t)); });
  m.def(
      "loss_polynomial",
      [](const Matrix& p, const Matrix& t, const Matrix& pts) { return loss_tuple(nn::loss_polynomial(p, t, pts)); },
      py::arg("pred_coeffs"), py::arg("target_coeffs"), py::arg("sample_points"));

  // networks
  py::class_<nn::Mlp>(m, "Mlp")
      .def_readonly("layer_dims", &nn::Mlp::layer_dims)
      .def_property_readonly("weights", [](const nn::Mlp& net) { return net.weights; })
      .def_property_readonly("biases", [](const nn::Mlp& net) { return net.biases; })
      .def_property_readonly("activations",
                             [](const nn::Mlp& net) {
                               std::vector<std::string> out;
                               for (auto a : net.activations) out.emplace_back(nn::to_string(a));
                               return out;
                             })
      .def("parameter_count", &nn::Mlp::parameter_count)
      .def("flatten", &nn::Mlp::flatten)
      .def("predict", [](const nn::Mlp& net, const Matrix& x) { return nn::predict(net, x); }, py::arg("inputs"));

  // configuration
  py::class_<ExperimentConfig>(m, "ExperimentConfig")
      .def_readwrite("lambda_train_size", &ExperimentConfig::lambda_train_size)
      .def_readwrite("loss_points", &ExperimentConfig::loss_points)
      .def_readwrite("eval_points", &ExperimentConfig::eval_points)
      .def_readwrite("inet_standardize", &ExperimentConfig::inet_standardize)
      .def_property_readonly("family", [](const ExperimentConfig& c) { return std::string(families::to_string(c.family)); })
      .def_readonly("n", &ExperimentConfig::n)
      .def_readonly("d", &ExperimentConfig::d)
      .def_readwrite("lambda_count", &ExperimentConfig::lambda_count)
      .def_readwrite("lambda_epochs", &ExperimentConfig::lambda_epochs)
      .def_readonly("lambda_hidden", &ExperimentConfig::lambda_hidden)
      .def_readwrite("inet_hidden", &ExperimentConfig::inet_hidden)
      .def_readwrite("inet_epochs", &ExperimentConfig::inet_epochs)
      .def_readwrite("checkpoint_epochs", &ExperimentConfig::checkpoint_epochs)
      .def_readwrite("master_seed", &ExperimentConfig::master_seed)
      .def("encoding_length", &ExperimentConfig::encoding_length)
      .def("validate", &ExperimentConfig::validate)
      .def("to_text", [](const ExperimentConfig& c) { return io::to_text(c); })
      .def("digest", [](const ExperimentConfig& c) { return io::config_digest(c); });
  m.def(
      "default_config",
      [](const std::string& family, int n, int d) {
        return ExperimentConfig::defaults(families::family_from_string(family), n, d);
      },
      py::arg("family"), py::arg("n"), py::arg("d") = 0);
  m.def("with_variables", &pipeline::with_variables, py::arg("config"), py::arg("n"));
  m.def("parse_config", &io::parse_config, py::arg("text"));
  m.def("load_config", &io::load_config, py::arg("path"));

  // pipeline
  py::class_<pipeline::LambdaRecord>(m, "LambdaRecord")
      .def_readonly("index", &pipeline::LambdaRecord::index)
      .def_readonly("mu", &pipeline::LambdaRecord::mu)
      .def_readonly("checkpoints", &pipeline::LambdaRecord::checkpoints)
      .def_readonly("final_loss", &pipeline::LambdaRecord::final_loss)
      .def_readonly("task_seed", &pipeline::LambdaRecord::task_seed)
      .def_readonly("diverged", &pipeline::LambdaRecord::diverged)
      .def_property_readonly("encoding", [](const pipeline::LambdaRecord& r) { return families::encode(r.function); })
      .def_property_readonly("minterms", &encoding_of)
      .def("describe", [](const pipeline::LambdaRecord& r) { return families::to_string(r.function); });

  py::class_<pipeline::InetDataset>(m, "InetDataset")
      .def_readonly("inputs", &pipeline::InetDataset::inputs)
      .def_readonly("targets", &pipeline::InetDataset::targets)
      .def_readonly("record_index", &pipeline::InetDataset::record_index)
      .def_property_readonly("split",
                             [](const pipeline::InetDataset& ds) {
                               std::vector<std::string> out;
                               for (auto s : ds.split) out.emplace_back(pipeline::to_string(s));
                               return out;
                             })
      .def("inputs_in", [](const pipeline::InetDataset& ds, const std::string& s) {
        return ds.inputs_in(pipeline::split_from_string(s));
      })
      .def("targets_in", [](const pipeline::InetDataset& ds, const std::string& s) {
        return ds.targets_in(pipeline::split_from_string(s));
      });

  m.def(
      "run_lambda_population",
      [](const ExperimentConfig& cfg, unsigned workers) {
        py::gil_scoped_release release;
        return pipeline::run_lambda_population(cfg, {workers, {}});
      },
      py::arg("config"), py::arg("workers") = 1);
  m.def(
      "lambda_net",
      [](const ExperimentConfig& cfg, const std::vector<double>& mu) { return pipeline::lambda_net_from_mu(cfg, mu); },
      py::arg("config"), py::arg("mu"));
  m.def(
      "build_inet_dataset",
      [](const std::vector<pipeline::LambdaRecord>& records, const ExperimentConfig& cfg, std::optional<int> epoch) {
        return pipeline::build_inet_dataset(records, cfg, epoch);
      },
      py::arg("records"), py::arg("config"), py::arg("epoch") = py::none());
  m.def(
      "train_inet",
      [](const pipeline::InetDataset& ds, const ExperimentConfig& cfg) {
        py::gil_scoped_release release;
        return pipeline::train_inet(ds, cfg).net;
      },
      py::arg("dataset"), py::arg("config"));
  m.def("evaluation_points", &pipeline::evaluation_points, py::arg("config"));

  // evaluation
  m.def(
      "eval_inet_boolean",
      [](const nn::Mlp& inet, const Matrix& x, const Matrix& y) {
        const auto s = eval::eval_inet_boolean(inet, x, y);
        return py::make_tuple(s.minterm_accuracy, s.exact_match_rate);
      },
      py::arg("inet"), py::arg("inputs"), py::arg("targets"));
  m.def("eval_inet_polynomial", &eval::eval_inet_polynomial, py::arg("inet"), py::arg("inputs"),
        py::arg("targets"), py::arg("eval_points"));
  m.def(
      "eval_lambda_boolean",
      [](const std::vector<pipeline::LambdaRecord>& records, const ExperimentConfig& cfg, std::optional<int> epoch) {
        return eval::eval_lambda_boolean(records, cfg, epoch);
      },
      py::arg("records"), py::arg("config"), py::arg("epoch") = py::none());
  m.def(
      "baseline_boolean",
      [](int n, std::size_t trials, std::uint64_t seed) {
        Rng rng(seed);
        const auto e = eval::baseline_boolean(n, trials, rng);
        return py::make_tuple(e.mean, e.std_error);
      },
      py::arg("n"), py::arg("trials"), py::arg("seed") = 0);
  m.def(
      "baseline_polynomial",
      [](int n, int d, std::pair<double, double> range, std::size_t samples, const Matrix& points,
         std::uint64_t seed) {
        Rng rng(seed);
        const auto e = eval::baseline_polynomial(n, d, {range.first, range.second}, samples, points, rng);
        return py::make_tuple(e.mean, e.std_error);
      },
      py::arg("n"), py::arg("d"), py::arg("coeff_range"), py::arg("samples"), py::arg("eval_points"),
      py::arg("seed") = 0);
  m.def(
      "oracle_distill_boolean",
      [](const nn::Mlp& net, int n) { return eval::oracle_distill_boolean(net, n).minterms(); },
      py::arg("lambda_net"), py::arg("n"));
  m.def(
      "oracle_lstsq_polynomial",
      [](const std::function<double(std::vector<double>)>& f, int n, int d, const Matrix& pts) {
        return eval::oracle_lstsq_polynomial(
                   [&](std::span<const double> x) { return f(std::vector<double>(x.begin(), x.end())); }, n, d, pts)
            .coeffs();
      },
      py::arg("function"), py::arg("n"), py::arg("d"), py::arg("fit_points"));

  // io
  m.def(
      "load_lambda_records",
      [](const std::filesystem::path& p, const std::string& digest, bool allow) {
        return io::load_lambda_records(p, {digest, allow});
      },
      py::arg("path"), py::arg("expected_digest") = "", py::arg("allow_digest_mismatch") = false);
  m.def(
      "load_mlp",
      [](const std::filesystem::path& p, const std::string& digest, bool allow) {
        return io::load_mlp(p, {digest, allow});
      },
      py::arg("path"), py::arg("expected_digest") = "", py::arg("allow_digest_mismatch") = false);
  m.def(
      "cli_main",
      [](const std::vector<std::string>& args) {
        std::ostringstream out, err;
        const int code = io::cli_main(args, out, err);
        return py::make_tuple(code, out.str(), err.str());
      },
      py::arg("args"), "Run the command-line tool in-process; returns (exit_code, stdout, stderr).");
  m.def("run_oracle_suite", [] {
    std::ostringstream out;
    const bool ok = eval::run_oracle_suite(out);
    return py::make_tuple(ok, out.str());
  });
}

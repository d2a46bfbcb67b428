#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "softsrocc/baselines.hpp"
#include "softsrocc/correlation.hpp"
#include "softsrocc/errors.hpp"
#include "softsrocc/memory_bank.hpp"
#include "softsrocc/soft_rank.hpp"
#include "softsrocc/train.hpp"

namespace py = pybind11;
using namespace softsrocc;

namespace {

GradTaggedScores tagged(std::vector<double> values, std::optional<std::vector<bool>> mask) {
  GradTaggedScores s = GradTaggedScores::all_live(std::move(values));
  if (mask) {
    if (mask->size() != s.values.size()) {
      throw Error(ErrorCode::LengthMismatch, "grad_mask length differs from values");
    }
    for (std::size_t i = 0; i < mask->size(); ++i) s.grad_mask[i] = (*mask)[i] ? 1 : 0;
  }
  return s;
}

std::vector<std::vector<double>> to_rows(const SquareMatrix& m) {
  std::vector<std::vector<double>> rows(m.n, std::vector<double>(m.n));
  for (std::size_t i = 0; i < m.n; ++i)
    for (std::size_t j = 0; j < m.n; ++j) rows[i][j] = m(i, j);
  return rows;
}

}  // namespace

PYBIND11_MODULE(softsrocc, m) {
  m.doc() = "Differentiable SROCC loss via tanh-smoothed ranks, with a memory bank";
  m.attr("__version__") = SOFTSROCC_VERSION;

  static py::exception<Error> error(m, "SoftSroccError", PyExc_ValueError);
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      py::set_error(error, (std::string(to_string(e.code())) + ": " + e.what()).c_str());
    }
  });

  m.def("plcc", [](std::vector<double> a, std::vector<double> b) { return plcc(a, b); });
  m.def("hard_rank", [](std::vector<double> x) { return hard_rank(x); });
  m.def("srocc", [](std::vector<double> q, std::vector<double> p) { return srocc(q, p); });
  m.def("srocc_closed_form",
        [](std::vector<double> q, std::vector<double> p) { return srocc_closed_form(q, p); });

  m.def("soft_rank",
        [](std::vector<double> x, double k) { return soft_rank(x, SoftRankConfig{k, 1e-12}); },
        py::arg("x"), py::arg("k") = 10.0);
  m.def("soft_rank_jacobian",
        [](std::vector<double> x, double k) {
          return to_rows(soft_rank_jacobian(x, SoftRankConfig{k, 1e-12}));
        },
        py::arg("x"), py::arg("k") = 10.0);
  m.def("mono_loss",
        [](std::vector<double> qhat, std::vector<double> q, double k,
           std::optional<std::vector<bool>> grad_mask) {
          const LossResult r = mono_loss(tagged(std::move(qhat), grad_mask), q, {k, 1e-12});
          return py::make_tuple(r.loss, r.grad, r.degenerate);
        },
        py::arg("qhat"), py::arg("q"), py::arg("k") = 10.0, py::arg("grad_mask") = py::none(),
        "Returns (loss, grad, degenerate).");
  m.def("margin_rank_loss",
        [](std::vector<double> qhat, std::vector<double> q, bool ground_truth_sign) {
          const LossResult r = margin_rank_loss(
              tagged(std::move(qhat), std::nullopt), q,
              ground_truth_sign ? MarginSign::GroundTruth : MarginSign::Predicted);
          return py::make_tuple(r.loss, r.grad);
        },
        py::arg("qhat"), py::arg("q"), py::arg("ground_truth_sign") = false);
  m.def("permutahedron_project",
        [](std::vector<double> x, double beta) {
          return permutahedron_project(x, ProjectionConfig{beta});
        },
        py::arg("x"), py::arg("beta") = 1.0);

  py::class_<MemoryBank>(m, "MemoryBank")
      .def(py::init<std::int64_t>(), py::arg("retention_epochs") = 1)
      .def("update",
           [](MemoryBank& b, std::vector<std::string> ids, std::vector<double> preds,
              std::vector<double> mos, std::int64_t epoch) { b.update(ids, preds, mos, epoch); })
      .def("assemble",
           [](const MemoryBank& b, std::vector<std::string> ids, std::vector<double> preds,
              std::vector<double> mos) {
             Assembly a = b.assemble(ids, preds, mos);
             std::vector<bool> mask(a.preds.grad_mask.begin(), a.preds.grad_mask.end());
             return py::make_tuple(a.ids, a.preds.values, mask, a.mos);
           },
           "Returns (ids, values, grad_mask, mos).")
      .def("evict", &MemoryBank::evict)
      .def("__len__", &MemoryBank::size)
      .def("__contains__", &MemoryBank::contains)
      .def("dumps", [](const MemoryBank& b) {
        std::ostringstream os;
        b.save(os);
        return os.str();
      })
      .def_static("loads", [](const std::string& text, std::int64_t retention) {
        std::istringstream is(text);
        return MemoryBank::load(is, retention);
      });

  m.def("train",
        [](std::string mode, std::uint64_t seed, std::size_t epochs, double lambda_mono,
           std::size_t n) {
          SyntheticSpec spec;
          spec.seed = seed;
          spec.n = n;
          TrainConfig cfg;
          cfg.mode = loss_mode_from_string(mode);
          cfg.seed = seed;
          cfg.epochs = epochs;
          cfg.lambda_mono = lambda_mono;
          const TrainResult r = train(gen_synthetic(spec), cfg);
          py::list history;
          for (const auto& e : r.history) {
            py::dict d;
            d["epoch"] = e.epoch;
            d["train_loss"] = e.train_loss;
            d["test_plcc"] = e.test_plcc;
            d["test_srocc"] = e.test_srocc;
            history.append(d);
          }
          return history;
        },
        py::arg("mode") = "mse_only", py::arg("seed") = 1, py::arg("epochs") = 30,
        py::arg("lambda_mono") = 1.0, py::arg("n") = 400,
        "Trains on the default synthetic task and returns per-epoch metrics.");
}

#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "a2er/adaptive.hpp"
#include "a2er/counter.hpp"
#include "a2er/experiment.hpp"
#include "a2er/fifo_buffer.hpp"
#include "a2er/heads.hpp"
#include "a2er/mlp.hpp"
#include "a2er/plural_stack.hpp"
#include "a2er/probe.hpp"
#include "a2er/reservoir_buffer.hpp"
#include "a2er/rng.hpp"
#include "a2er/snapshot.hpp"
#include "a2er/tasks.hpp"
#include "a2er/trainer.hpp"

namespace py = pybind11;
using namespace a2er;

namespace {

// Seeded engine handed around explicitly so Python-side runs stay reproducible.
struct Rng {
    std::mt19937_64 engine;
    explicit Rng(std::uint64_t seed) : engine(seed) {}
};

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Continual-learning replay engine: adaptive replay training and "
              "generalized reservoir buffers";

    py::class_<Rng>(m, "Rng").def(py::init<std::uint64_t>(), py::arg("seed"));

    // counters
    py::enum_<CounterKind>(m, "CounterKind")
        .value("QLog", CounterKind::QLog)
        .value("Linear", CounterKind::Linear)
        .value("Exp", CounterKind::Exp);
    py::class_<CounterDesign>(m, "CounterDesign")
        .def(py::init([](CounterKind kind, double q) {
                 CounterDesign d{kind, q};
                 validate(d);
                 return d;
             }),
             py::arg("kind"), py::arg("q"))
        .def_readonly("kind", &CounterDesign::kind)
        .def_readonly("q", &CounterDesign::q);
    m.def("counter_value", &counter_value, py::arg("design"), py::arg("n"), py::arg("capacity"));
    m.def("q_log", &q_log, py::arg("q"), py::arg("x"));

    // records and buffers
    py::class_<Record>(m, "Record")
        .def(py::init([](std::int64_t id, std::vector<double> x, std::vector<double> y,
                         std::vector<double> z, double gamma_bar) {
                 Record r;
                 r.id = id;
                 r.x = std::move(x);
                 r.y = std::move(y);
                 r.z = std::move(z);
                 r.gamma_bar = gamma_bar;
                 return r;
             }),
             py::arg("id"), py::arg("x"), py::arg("y"), py::arg("z") = std::vector<double>{},
             py::arg("gamma_bar") = 1.0)
        .def_readwrite("id", &Record::id)
        .def_readwrite("x", &Record::x)
        .def_readwrite("y", &Record::y)
        .def_readwrite("z", &Record::z)
        .def_readwrite("gamma_bar", &Record::gamma_bar);

    py::enum_<OfferOutcome>(m, "OfferOutcome")
        .value("AcceptedIntoFree", OfferOutcome::AcceptedIntoFree)
        .value("AcceptedReplacing", OfferOutcome::AcceptedReplacing)
        .value("Rejected", OfferOutcome::Rejected);
    py::class_<OfferResult>(m, "OfferResult")
        .def_readonly("outcome", &OfferResult::outcome)
        .def_readonly("record", &OfferResult::record);

    py::class_<FifoBuffer>(m, "FifoBuffer")
        .def(py::init<std::int64_t>(), py::arg("capacity"))
        .def("push", &FifoBuffer::push, py::arg("record"))
        .def("size", &FifoBuffer::size)
        .def("capacity", &FifoBuffer::capacity)
        .def("snapshot_json", [](const FifoBuffer& b) { return snapshot_json(b); });

    py::class_<ReservoirBuffer>(m, "ReservoirBuffer")
        .def(py::init<std::int64_t, CounterDesign>(), py::arg("capacity"), py::arg("design"))
        .def("offer", [](ReservoirBuffer& b, Record rec, Rng& rng) {
                 return b.offer(std::move(rec), rng.engine);
             },
             py::arg("record"), py::arg("rng"))
        .def("update_feature",
             [](ReservoirBuffer& b, std::int64_t id, const std::vector<double>& z, double gb) {
                 return b.update_feature(id, z, gb);
             },
             py::arg("id"), py::arg("z"), py::arg("gamma_bar"))
        .def("size", &ReservoirBuffer::size)
        .def("counter", &ReservoirBuffer::counter)
        .def("capacity", &ReservoirBuffer::capacity)
        .def("contains", [](const ReservoirBuffer& b, std::int64_t id) { return b.find(id) != nullptr; })
        .def("feature_miss_count", &ReservoirBuffer::feature_miss_count)
        .def("snapshot_json", [](const ReservoirBuffer& b) { return snapshot_json(b); });
    m.def("reservoir_from_json", &reservoir_from_json, py::arg("text"));

    m.def("nu_from_zeta", &nu_from_zeta, py::arg("zeta"));
    m.def("rejection_probability", &rejection_probability, py::arg("gamma_bar"),
          py::arg("gamma_max"), py::arg("gamma_min"), py::arg("nu"));

    py::class_<LayerConfig>(m, "LayerConfig")
        .def(py::init([](std::int64_t capacity, CounterDesign design) {
                 return LayerConfig{capacity, design};
             }),
             py::arg("capacity"), py::arg("design"));
    py::class_<StackConfig>(m, "StackConfig")
        .def(py::init([](std::vector<LayerConfig> layers, double zeta) {
                 return StackConfig{std::move(layers), zeta};
             }),
             py::arg("layers"), py::arg("zeta") = 0.0);
    py::class_<ReplayItem>(m, "ReplayItem")
        .def_readonly("layer", &ReplayItem::layer)
        .def_readonly("rec", &ReplayItem::rec);
    py::class_<ReplaySample>(m, "ReplaySample")
        .def_readonly("rehearsal", &ReplaySample::rehearsal)
        .def_readonly("regularization", &ReplaySample::regularization)
        .def_readonly("uniform_fallback", &ReplaySample::uniform_fallback);
    py::class_<PluralStack>(m, "PluralStack")
        .def(py::init<StackConfig>(), py::arg("config"))
        .def("offer", [](PluralStack& s, Record rec, Rng& rng) {
                 return s.offer(std::move(rec), rng.engine);
             },
             py::arg("record"), py::arg("rng"))
        .def("sample_replay", [](const PluralStack& s, int count, Rng& rng) {
                 return s.sample_replay(count, rng.engine);
             },
             py::arg("count"), py::arg("rng"))
        .def("update_feature",
             [](PluralStack& s, int layer, std::int64_t id, const std::vector<double>& z, double gb) {
                 return s.update_feature(layer, id, z, gb);
             },
             py::arg("layer"), py::arg("id"), py::arg("z"), py::arg("gamma_bar"))
        .def("num_layers", &PluralStack::num_layers)
        .def("total_size", &PluralStack::total_size)
        .def("zeta", &PluralStack::zeta)
        .def("nu", &PluralStack::nu)
        .def("layer_counter", [](const PluralStack& s, int l) { return s.layer(l).counter(); })
        .def("layer_size", [](const PluralStack& s, int l) { return s.layer(l).size(); })
        .def("snapshot_json", [](const PluralStack& s) { return snapshot_json(s); });
    m.def("stack_from_json", &stack_from_json, py::arg("text"));

    // adaptive machinery
    m.def("compute_eta", &compute_eta, py::arg("delta_tau"), py::arg("delta_q"), py::arg("rho"));
    m.def("compute_gamma", &compute_gamma, py::arg("delta_tau"), py::arg("eta"),
          py::arg("delta_q"));
    m.def("update_priority", &update_priority, py::arg("gamma_bar"), py::arg("gamma"),
          py::arg("lambda_"));
    m.def("interpolated_quantile", &interpolated_quantile, py::arg("values"), py::arg("rho"));
    m.def("correct_feature", [](std::vector<double> z, const std::vector<double>& h, double gamma) {
              correct_feature(z, h, gamma);
              return z;
          },
          py::arg("z"), py::arg("h"), py::arg("gamma"));

    // model
    py::enum_<HeadKind>(m, "HeadKind")
        .value("Gaussian", HeadKind::Gaussian)
        .value("Categorical", HeadKind::Categorical);
    py::class_<Mlp>(m, "Mlp")
        .def(py::init<std::vector<int>>(), py::arg("sizes"))
        .def_static("make_default", &Mlp::make_default, py::arg("input_dim"), py::arg("output_dim"))
        .def("init_xavier", [](Mlp& mlp, std::uint64_t seed) {
                 auto rng = make_rng(seed);
                 mlp.init_xavier(rng);
             },
             py::arg("seed"))
        .def("forward", [](const Mlp& mlp, const std::vector<double>& x) { return mlp.forward(x); },
             py::arg("x"))
        .def("param_count", &Mlp::param_count)
        .def("get_params", [](const Mlp& mlp) {
                 return std::vector<double>(mlp.params().begin(), mlp.params().end());
             })
        .def("set_params", [](Mlp& mlp, const std::vector<double>& p) {
                 if (p.size() != mlp.param_count()) throw std::invalid_argument("size mismatch");
                 std::copy(p.begin(), p.end(), mlp.params().begin());
             })
        .def("snapshot_json", [](const Mlp& mlp) { return snapshot_json(mlp); });
    m.def("nll", [](HeadKind head, const std::vector<double>& z, const std::vector<double>& y) {
              return nll(head, z, y);
          },
          py::arg("head"), py::arg("z"), py::arg("y"));
    m.def("softmax", [](const std::vector<double>& z) { return softmax(z); }, py::arg("z"));
    m.def("kld_gaussian", &kld_gaussian, py::arg("mu_true"), py::arg("sigma_true"),
          py::arg("mu_pred"), py::arg("sigma_pred"));

    // tasks
    py::class_<SineMixtureTask>(m, "SineMixtureTask")
        .def_static("generate", &SineMixtureTask::generate, py::arg("task_seed"))
        .def("mean_at", &SineMixtureTask::mean_at, py::arg("x"))
        .def("points_per_cycle", &SineMixtureTask::points_per_cycle)
        .def("snapshot_json", [](const SineMixtureTask& t) { return snapshot_json(t); });
    py::class_<GaussianGridTask>(m, "GaussianGridTask")
        .def_static("generate", &GaussianGridTask::generate, py::arg("task_seed"))
        .def_static("generate_with_count", &GaussianGridTask::generate_with_count,
                    py::arg("task_seed"), py::arg("count"))
        .def("true_label", &GaussianGridTask::true_label, py::arg("x0"), py::arg("x1"))
        .def("num_classes", &GaussianGridTask::num_classes)
        .def("points_per_cycle", &GaussianGridTask::points_per_cycle)
        .def("snapshot_json", [](const GaussianGridTask& t) { return snapshot_json(t); });
    py::class_<Sample>(m, "Sample")
        .def_readonly("x", &Sample::x)
        .def_readonly("y", &Sample::y);
    m.def("gen_regression_stream", &gen_regression_stream, py::arg("task"), py::arg("seed"),
          py::arg("cycles"));
    m.def("gen_classification_stream", &gen_classification_stream, py::arg("task"),
          py::arg("seed"), py::arg("cycles"));
    m.def("gen_switched_stream", &gen_switched_stream, py::arg("task_a"), py::arg("task_b"),
          py::arg("seed"), py::arg("cycles_each"));
    m.def("eval_kld", &eval_kld, py::arg("model"), py::arg("task"));
    m.def("eval_acc", &eval_acc, py::arg("model"), py::arg("task"));

    // probes
    py::class_<ProbeResult>(m, "ProbeResult")
        .def_readonly("empirical", &ProbeResult::empirical)
        .def_readonly("analytic", &ProbeResult::analytic)
        .def_readonly("trials", &ProbeResult::trials)
        .def_readonly("z_score", &ProbeResult::z_score);
    m.def("analytic_retention", &analytic_retention, py::arg("design"), py::arg("capacity"),
          py::arg("n"), py::arg("n_prime"));
    m.def("analytic_membership", &analytic_membership, py::arg("design"), py::arg("capacity"),
          py::arg("offers"), py::arg("mark"));
    m.def("empirical_membership", &empirical_membership, py::arg("design"), py::arg("capacity"),
          py::arg("offers"), py::arg("mark"), py::arg("trials"), py::arg("seed"),
          py::arg("threads") = 0, py::call_guard<py::gil_scoped_release>());
    m.def("acceptance_curve", &acceptance_curve, py::arg("design"), py::arg("capacity"),
          py::arg("max_offers"), py::arg("stride"));

    // experiments
    py::class_<ExperimentConfig>(m, "ExperimentConfig")
        .def(py::init<>())
        .def_readwrite("method", &ExperimentConfig::method)
        .def_readwrite("buffer", &ExperimentConfig::buffer)
        .def_readwrite("task", &ExperimentConfig::task)
        .def_readwrite("task_seed", &ExperimentConfig::task_seed)
        .def_readwrite("seeds", &ExperimentConfig::seeds)
        .def_readwrite("cycles", &ExperimentConfig::cycles)
        .def_readwrite("max_points", &ExperimentConfig::max_points)
        .def_readwrite("n_fifo", &ExperimentConfig::n_fifo)
        .def_readwrite("n_rs", &ExperimentConfig::n_rs)
        .def_readwrite("batch", &ExperimentConfig::batch)
        .def_readwrite("alpha_init", &ExperimentConfig::alpha_init)
        .def_readwrite("beta_init", &ExperimentConfig::beta_init)
        .def_readwrite("rho", &ExperimentConfig::rho)
        .def_readwrite("lambda_", &ExperimentConfig::lambda)
        .def_readwrite("q1", &ExperimentConfig::q1)
        .def_readwrite("q2", &ExperimentConfig::q2)
        .def_readwrite("zeta", &ExperimentConfig::zeta)
        .def_readwrite("design", &ExperimentConfig::design)
        .def_readwrite("design_q", &ExperimentConfig::design_q)
        .def_readwrite("lr", &ExperimentConfig::lr)
        .def_readwrite("lr_mult", &ExperimentConfig::lr_mult)
        .def_readwrite("train_every", &ExperimentConfig::train_every)
        .def_readwrite("updates_per_session", &ExperimentConfig::updates_per_session)
        .def_readwrite("root_seed", &ExperimentConfig::root_seed)
        .def_readwrite("threads", &ExperimentConfig::threads)
        .def_readwrite("out_dir", &ExperimentConfig::out_dir)
        .def_readwrite("keep_series", &ExperimentConfig::keep_series)
        .def("to_json", &ExperimentConfig::to_json);
    py::class_<RunResult>(m, "RunResult")
        .def_readonly("final_metric", &RunResult::final_metric)
        .def_readonly("second_metric", &RunResult::second_metric)
        .def_readonly("feature_miss", &RunResult::feature_miss)
        .def_readonly("omission_drops", &RunResult::omission_drops);
    py::class_<ExperimentSummary>(m, "ExperimentSummary")
        .def_readonly("per_seed", &ExperimentSummary::per_seed)
        .def_readonly("per_seed_second", &ExperimentSummary::per_seed_second)
        .def_readonly("rank_weighted", &ExperimentSummary::rank_weighted)
        .def_readonly("larger_is_better", &ExperimentSummary::larger_is_better);
    m.def("run_single", &run_single, py::arg("config"), py::arg("run_seed"),
          py::call_guard<py::gil_scoped_release>());
    m.def("run_experiment", &run_experiment, py::arg("config"),
          py::call_guard<py::gil_scoped_release>());
    m.def("rank_weighted_mean", &rank_weighted_mean, py::arg("values"),
          py::arg("larger_is_better"));
    m.def("task_seed_for_name", &task_seed_for_name, py::arg("name"));
}

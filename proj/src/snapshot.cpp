#include "a2er/snapshot.hpp"

#include <stdexcept>

#include <json.hpp>

namespace a2er {

using nlohmann::json;

namespace {

json record_to_obj(const Record& rec) {
    return json{{"id", rec.id}, {"x", rec.x}, {"y", rec.y}, {"z", rec.z},
                {"gamma_bar", rec.gamma_bar}};
}

Record record_from_obj(const json& j) {
    Record rec;
    rec.id = j.at("id").get<std::int64_t>();
    rec.x = j.at("x").get<std::vector<double>>();
    rec.y = j.at("y").get<std::vector<double>>();
    rec.z = j.at("z").get<std::vector<double>>();
    rec.gamma_bar = j.at("gamma_bar").get<double>();
    if (rec.gamma_bar < 0.0 || rec.gamma_bar > 1.0) {
        throw std::invalid_argument("gamma_bar outside [0, 1]");
    }
    return rec;
}

json design_to_obj(const CounterDesign& d) {
    return json{{"kind", counter_kind_name(d.kind)}, {"q", d.q}};
}

CounterDesign design_from_obj(const json& j) {
    CounterDesign d;
    d.kind = counter_kind_from_name(j.at("kind").get<std::string>());
    d.q = j.at("q").get<double>();
    validate(d);
    return d;
}

json reservoir_to_obj(const ReservoirBuffer& buf) {
    json slots = json::array();
    for (const Record& r : buf.slots()) slots.push_back(record_to_obj(r));
    return json{{"capacity", buf.capacity()},
                {"n", buf.counter()},
                {"design", design_to_obj(buf.design())},
                {"slots", std::move(slots)}};
}

ReservoirBuffer reservoir_from_obj(const json& j) {
    ReservoirBuffer buf(j.at("capacity").get<std::int64_t>(), design_from_obj(j.at("design")));
    std::vector<Record> slots;
    for (const auto& s : j.at("slots")) slots.push_back(record_from_obj(s));
    buf.restore(j.at("n").get<std::int64_t>(), std::move(slots));
    return buf;
}

}  // namespace

std::string snapshot_json(const Record& rec) { return record_to_obj(rec).dump(); }

Record record_from_json(const std::string& text) {
    return record_from_obj(json::parse(text));
}

std::string snapshot_json(const FifoBuffer& buf) {
    json slots = json::array();
    for (const Record& r : buf.slots()) slots.push_back(record_to_obj(r));
    return json{{"capacity", buf.capacity()}, {"slots", std::move(slots)}}.dump();
}

FifoBuffer fifo_from_json(const std::string& text) {
    const json j = json::parse(text);
    FifoBuffer buf(j.at("capacity").get<std::int64_t>());
    for (const auto& s : j.at("slots")) buf.push(record_from_obj(s));
    return buf;
}

std::string snapshot_json(const ReservoirBuffer& buf) { return reservoir_to_obj(buf).dump(); }

ReservoirBuffer reservoir_from_json(const std::string& text) {
    return reservoir_from_obj(json::parse(text));
}

std::string snapshot_json(const PluralStack& stack) {
    json layers = json::array();
    for (int l = 0; l < stack.num_layers(); ++l) {
        layers.push_back(reservoir_to_obj(stack.layer(l)));
    }
    return json{{"zeta", stack.zeta()}, {"layers", std::move(layers)}}.dump();
}

PluralStack stack_from_json(const std::string& text) {
    const json j = json::parse(text);
    StackConfig cfg;
    cfg.zeta = j.at("zeta").get<double>();
    for (const auto& lj : j.at("layers")) {
        cfg.layers.push_back({lj.at("capacity").get<std::int64_t>(),
                              design_from_obj(lj.at("design"))});
    }
    PluralStack stack(cfg);
    int l = 0;
    for (const auto& lj : j.at("layers")) {
        std::vector<Record> slots;
        for (const auto& s : lj.at("slots")) slots.push_back(record_from_obj(s));
        stack.mutable_layer(l).restore(lj.at("n").get<std::int64_t>(), std::move(slots));
        ++l;
    }
    return stack;
}

std::string snapshot_json(const Mlp& model) {
    return json{{"sizes", model.sizes()},
                {"params", std::vector<double>(model.params().begin(), model.params().end())}}
        .dump();
}

void load_params_json(Mlp& model, const std::string& text) {
    const json j = json::parse(text);
    if (j.at("sizes").get<std::vector<int>>() != model.sizes()) {
        throw std::invalid_argument("model shape mismatch");
    }
    const auto params = j.at("params").get<std::vector<double>>();
    if (params.size() != model.param_count()) {
        throw std::invalid_argument("parameter count mismatch");
    }
    std::copy(params.begin(), params.end(), model.params().begin());
}

std::string snapshot_json(const SineMixtureTask& task) {
    json comps = json::array();
    for (const auto& c : task.components) {
        comps.push_back({{"amplitude", c.amplitude}, {"frequency", c.frequency},
                         {"phase", c.phase}});
    }
    return json{{"components", std::move(comps)}, {"noise_sd", task.noise_sd},
                {"x_min", task.x_min}, {"x_max", task.x_max}, {"x_step", task.x_step}}
        .dump();
}

SineMixtureTask sine_task_from_json(const std::string& text) {
    const json j = json::parse(text);
    SineMixtureTask task;
    for (const auto& c : j.at("components")) {
        task.components.push_back({c.at("amplitude").get<double>(),
                                   c.at("frequency").get<double>(),
                                   c.at("phase").get<double>()});
    }
    task.noise_sd = j.at("noise_sd").get<double>();
    task.x_min = j.at("x_min").get<double>();
    task.x_max = j.at("x_max").get<double>();
    task.x_step = j.at("x_step").get<double>();
    return task;
}

std::string snapshot_json(const GaussianGridTask& task) {
    json means = json::array();
    for (const auto& m : task.means) means.push_back({m[0], m[1]});
    return json{{"means", std::move(means)},     {"threshold_sq", task.threshold_sq},
                {"grid_step", task.grid_step},   {"noise_sd", task.noise_sd},
                {"lo", task.lo},                 {"hi", task.hi}}
        .dump();
}

GaussianGridTask grid_task_from_json(const std::string& text) {
    const json j = json::parse(text);
    GaussianGridTask task;
    for (const auto& m : j.at("means")) {
        task.means.push_back({m.at(0).get<double>(), m.at(1).get<double>()});
    }
    task.threshold_sq = j.at("threshold_sq").get<double>();
    task.grid_step = j.at("grid_step").get<double>();
    task.noise_sd = j.at("noise_sd").get<double>();
    task.lo = j.at("lo").get<double>();
    task.hi = j.at("hi").get<double>();
    return task;
}

}  // namespace a2er

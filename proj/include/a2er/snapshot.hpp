#pragma once

#include <string>

#include "a2er/fifo_buffer.hpp"
#include "a2er/mlp.hpp"
#include "a2er/plural_stack.hpp"
#include "a2er/reservoir_buffer.hpp"
#include "a2er/tasks.hpp"

namespace a2er {

// JSON snapshots for checkpoint/restore and golden tests. Snapshots capture
// records, counters, and design parameters; RNG and statistics counters stay
// with the caller.
std::string snapshot_json(const Record& rec);
std::string snapshot_json(const FifoBuffer& buf);
std::string snapshot_json(const ReservoirBuffer& buf);
std::string snapshot_json(const PluralStack& stack);
std::string snapshot_json(const Mlp& model);
std::string snapshot_json(const SineMixtureTask& task);
std::string snapshot_json(const GaussianGridTask& task);

Record record_from_json(const std::string& text);
FifoBuffer fifo_from_json(const std::string& text);
ReservoirBuffer reservoir_from_json(const std::string& text);
PluralStack stack_from_json(const std::string& text);
void load_params_json(Mlp& model, const std::string& text);
SineMixtureTask sine_task_from_json(const std::string& text);
GaussianGridTask grid_task_from_json(const std::string& text);

}  // namespace a2er

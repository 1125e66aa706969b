#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "gridminer/errors.hpp"
#include "gridminer/mining.hpp"
#include "gridminer/query.hpp"
#include "gridminer/simkernel.hpp"
#include "gridminer/sprint.hpp"
#include "gridminer/topology.hpp"

namespace gridminer {

/// What one sub-task sends back. Synthetic load tasks carry nothing.
using PartialPayload =
    std::variant<std::monostate, mining::SupportTable, query::SubQueryResult, mining::SplitStatistics>;

struct PartialResult {
    std::uint64_t task_id = 0;
    std::uint64_t job_id = 0;
    PartialPayload payload;
};

/// The parts of a round do not cover its tasks exactly once.
class CoverageError : public Error {
public:
    using Error::Error;
};

/// Folds one round's partial results: support counts are summed, match lists
/// are unioned with one entry per record id (the smallest value wins when
/// two sources disagree) and sorted, split statistics are summed. The result
/// does not depend on the order of `parts`. Throws CoverageError unless the
/// task ids of `parts` are exactly `expected_tasks`, and std::invalid_argument
/// on mixed payload kinds.
PartialPayload aggregate(std::span<const PartialResult> parts, std::span<const std::uint64_t> expected_tasks);

/// A job's final answer.
using FinalPayload = std::variant<std::monostate, std::vector<mining::Pattern>, query::SubQueryResult, mining::Tree>;

struct FinalResult {
    std::uint64_t job_id = 0;
    FinalPayload payload;
    SimTime produced_at = 0;
};

enum class DeliveryMode { multicast, sequential };

std::string_view to_string(DeliveryMode mode);

struct Delivery {
    ClientId client = 0;
    SimTime time = 0;

    friend bool operator==(const Delivery&, const Delivery&) = default;
};

/// Multicast sends to every client at once (client c receives at
/// at + latency_c). The sequential baseline sends one after another in list
/// order, so client i receives at at + latency_0 + ... + latency_i.
/// Throws std::invalid_argument for an empty client list.
std::vector<Delivery> multicast(std::span<const ClientSpec> clients, SimTime at,
                                DeliveryMode mode = DeliveryMode::multicast);

/// Time the last client has the result.
SimTime completion_time(std::span<const Delivery> deliveries);

}  // namespace gridminer

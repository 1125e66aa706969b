#include "gridminer/aggregator.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <stdexcept>
#include <tuple>

namespace gridminer {

namespace {

void check_coverage(std::span<const PartialResult> parts, std::span<const std::uint64_t> expected_tasks) {
    std::multiset<std::uint64_t> got;
    for (const auto& p : parts) got.insert(p.task_id);
    std::set<std::uint64_t> want(expected_tasks.begin(), expected_tasks.end());

    std::string problems;
    for (auto id : want)
        if (got.count(id) == 0) problems += " missing task " + std::to_string(id) + ";";
    for (auto id : std::set<std::uint64_t>(got.begin(), got.end())) {
        if (want.count(id) == 0) problems += " unexpected task " + std::to_string(id) + ";";
        if (got.count(id) > 1) problems += " duplicate task " + std::to_string(id) + ";";
    }
    if (!problems.empty()) throw CoverageError("incomplete result coverage:" + problems);
}

}  // namespace

PartialPayload aggregate(std::span<const PartialResult> parts, std::span<const std::uint64_t> expected_tasks) {
    check_coverage(parts, expected_tasks);
    if (parts.empty()) return std::monostate{};

    std::size_t kind = parts.front().payload.index();
    for (const auto& p : parts)
        if (p.payload.index() != kind) throw std::invalid_argument("partial results of mixed kinds");

    // Fold in task-id order; every fold below is commutative anyway.
    std::vector<const PartialResult*> ordered;
    for (const auto& p : parts) ordered.push_back(&p);
    std::sort(ordered.begin(), ordered.end(), [](auto* a, auto* b) { return a->task_id < b->task_id; });

    return std::visit(
        [&](const auto& first) -> PartialPayload {
            using T = std::decay_t<decltype(first)>;
            if constexpr (std::is_same_v<T, std::monostate>) {
                return std::monostate{};
            } else if constexpr (std::is_same_v<T, query::SubQueryResult>) {
                query::SubQueryResult merged;
                for (const auto* p : ordered) {
                    const auto& r = std::get<T>(p->payload);
                    merged.matches.insert(merged.matches.end(), r.matches.begin(), r.matches.end());
                    merged.skipped += r.skipped;
                }
                std::sort(merged.matches.begin(), merged.matches.end(), [](const auto& a, const auto& b) {
                    return std::tie(a.record_id, a.value) < std::tie(b.record_id, b.value);
                });
                merged.matches.erase(std::unique(merged.matches.begin(), merged.matches.end(),
                                                 [](const auto& a, const auto& b) { return a.record_id == b.record_id; }),
                                     merged.matches.end());
                return merged;
            } else {
                T merged;
                for (const auto* p : ordered) merged.merge(std::get<T>(p->payload));
                return merged;
            }
        },
        parts.front().payload);
}

std::string_view to_string(DeliveryMode mode) {
    return mode == DeliveryMode::multicast ? "multicast" : "sequential";
}

std::vector<Delivery> multicast(std::span<const ClientSpec> clients, SimTime at, DeliveryMode mode) {
    if (clients.empty()) throw std::invalid_argument("multicast needs at least one client");
    std::vector<Delivery> out;
    out.reserve(clients.size());
    SimTime clock = at;
    for (const auto& c : clients) {
        if (mode == DeliveryMode::multicast) {
            out.push_back({c.id, at + c.latency});
        } else {
            clock += c.latency;
            out.push_back({c.id, clock});
        }
    }
    return out;
}

SimTime completion_time(std::span<const Delivery> deliveries) {
    SimTime t = 0;
    for (const auto& d : deliveries) t = std::max(t, d.time);
    return t;
}

}  // namespace gridminer

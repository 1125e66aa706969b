#pragma once

#include <cstdint>
#include <memory>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "gridminer/aggregator.hpp"
#include "gridminer/rational.hpp"
#include "gridminer/scheduler.hpp"
#include "gridminer/simkernel.hpp"
#include "gridminer/topology.hpp"
#include "gridminer/workload.hpp"

namespace gridminer {

struct SimulationOptions {
    std::uint64_t seed = 0;
    Rational trust_threshold = kDefaultTrustThreshold;
    /// (gridlet id, 1-based ordinal of the tasks assigned to that gridlet)
    std::set<std::pair<GridletId, std::uint64_t>> failures;
    DeliveryMode delivery = DeliveryMode::multicast;
    /// Threads for per-partition task payloads; never changes any output.
    unsigned workers = 1;
    bool trace = false;
};

/// Parses `--fail` values of the form "<gridlet_id>:<task_ordinal>".
std::pair<GridletId, std::uint64_t> parse_failure(std::string_view text);

/// Drives a workload end to end: submission, resource selection, gridlet
/// execution, round aggregation and delivery, all in virtual time.
class Simulation {
public:
    /// Throws ValidationError when the workload names unknown clients or the
    /// failure list names unknown gridlets.
    Simulation(Grid grid, Workload workload, SimulationOptions options);
    ~Simulation();
    Simulation(const Simulation&) = delete;
    Simulation& operator=(const Simulation&) = delete;

    /// Runs to completion (once) and returns the report. Keys are sorted and
    /// nothing depends on wall-clock time or the worker count.
    nlohmann::json run();

    const std::vector<std::string>& trace() const;
    /// Final results of delivered jobs, indexed by job id (monostate for
    /// failed jobs).
    const std::vector<FinalResult>& results() const;

    /// Records every dispatch decision; set before run().
    void set_decision_log(std::vector<DispatchDecision>* log);

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

/// Pretty-printed (2-space indent) report text with a trailing newline.
std::string render_report(const nlohmann::json& report);

nlohmann::json patterns_to_json(std::span<const mining::Pattern> patterns);

}  // namespace gridminer

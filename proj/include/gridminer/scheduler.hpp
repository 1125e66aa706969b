#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "gridminer/rational.hpp"
#include "gridminer/topology.hpp"

namespace gridminer {

/// Beta reputation: value = (s + 1) / (s + f + 2). Only the two counters are
/// stored; the value is always derived from them.
class TrustScore {
public:
    TrustScore() = default;
    TrustScore(std::uint64_t successes, std::uint64_t failures) : s_(successes), f_(failures) {}

    std::uint64_t successes() const { return s_; }
    std::uint64_t failures() const { return f_; }
    Rational value() const;
    bool meets(const Rational& threshold) const { return value() >= threshold; }

    void record_success() { ++s_; }
    void record_failure() { ++f_; }

    friend bool operator==(const TrustScore&, const TrustScore&) = default;

private:
    std::uint64_t s_ = 0;
    std::uint64_t f_ = 0;
};

/// Default eligibility threshold for trust.value().
inline const Rational kDefaultTrustThreshold{1, 4};

struct GridletStatus {
    GridletId gridlet_id = 0;
    std::uint64_t busy_ticks = 0;  // projected: executed plus assigned-but-unfinished work
    std::uint64_t queue_len = 0;
    TrustScore trust;
};

/// The trust-eligible gridlet with the least busy_ticks; ties go to the
/// shorter queue, then the smaller id. nullopt means "no resource".
std::optional<GridletId> select_gridlet(std::span<const GridletStatus> statuses, const Rational& trust_threshold);

/// ceil(cost / cpu_rate); cost and cpu_rate are both >= 1.
std::uint64_t task_duration(std::uint64_t cost, std::uint64_t cpu_rate);

enum class JobKind { mine, classify, path_query, synthetic };
enum class JobState { submitted, running, aggregating, delivered, failed };

std::string_view to_string(JobKind kind);
std::string_view to_string(JobState state);

struct TaskDescriptor {
    std::uint64_t task_id = 0;
    std::uint64_t job_id = 0;
    PartitionId partition_id = 0;
    std::uint64_t cost = 1;
    std::optional<GridletId> assigned_gridlet;
};

struct JobDescriptor {
    std::uint64_t job_id = 0;
    ClientId client_id = 0;
    JobKind kind = JobKind::synthetic;
    JobState state = JobState::submitted;
    std::vector<TaskDescriptor> sub_tasks;  // the current round

    /// Moves along submitted -> running -> aggregating -> delivered, or to
    /// failed from any live state. Anything else throws std::logic_error.
    void advance(JobState next);
};

/// Snapshot taken at each assignment when decision logging is on.
struct DispatchDecision {
    std::uint64_t task_id = 0;
    GridletId chosen = 0;
    std::vector<GridletStatus> candidates;
};

enum class TaskOutcome { success, failure };

struct Completion {
    std::uint64_t job_id = 0;
    GridletId gridlet = 0;
    std::uint64_t remaining = 0;  // tasks of the job still outstanding
};

/// Resource selection and monitoring. Tracks per-gridlet executed ticks,
/// projected ticks, queue length and trust, plus the owner of every
/// in-flight task.
class Scheduler {
public:
    Scheduler(std::span<const GridletSpec> gridlets, Rational trust_threshold = kDefaultTrustThreshold);

    /// Assigns tasks in order, each through select_gridlet over the projected
    /// statuses, charging task_duration to the chosen gridlet before the next
    /// pick. All-or-nothing: returns false and changes nothing if any task
    /// finds no eligible gridlet.
    bool assign(std::span<TaskDescriptor> tasks);

    /// Books a finished task: executed ticks, queue, trust. Throws
    /// std::out_of_range for an unknown or already-completed task id.
    Completion on_task_complete(std::uint64_t task_id, TaskOutcome outcome);

    std::vector<GridletStatus> statuses() const;
    const Rational& trust_threshold() const { return threshold_; }

    struct GridletRecord {
        GridletSpec spec;
        std::uint64_t busy_ticks = 0;       // executed
        std::uint64_t projected_ticks = 0;  // executed + outstanding
        std::uint64_t queue_len = 0;
        std::uint64_t tasks_assigned = 0;
        TrustScore trust;
    };
    const std::vector<GridletRecord>& gridlets() const { return gridlets_; }
    const GridletRecord& gridlet(GridletId id) const;

    void set_decision_log(std::vector<DispatchDecision>* log) { log_ = log; }

private:
    struct InFlight {
        std::uint64_t job_id;
        std::size_t gridlet_index;
        std::uint64_t duration;
    };

    std::size_t index_of(GridletId id) const;

    std::vector<GridletRecord> gridlets_;
    Rational threshold_;
    std::map<std::uint64_t, InFlight> in_flight_;
    std::map<std::uint64_t, std::uint64_t> outstanding_;  // job -> tasks in flight
    std::vector<DispatchDecision>* log_ = nullptr;
};

}  // namespace gridminer

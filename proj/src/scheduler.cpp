#include "gridminer/scheduler.hpp"

#include <stdexcept>
#include <string>
#include <tuple>

namespace gridminer {

Rational TrustScore::value() const {
    return Rational(static_cast<std::int64_t>(s_ + 1), static_cast<std::int64_t>(s_ + f_ + 2));
}

std::optional<GridletId> select_gridlet(std::span<const GridletStatus> statuses, const Rational& trust_threshold) {
    const GridletStatus* best = nullptr;
    for (const auto& st : statuses) {
        if (!st.trust.meets(trust_threshold)) continue;
        if (!best || std::tie(st.busy_ticks, st.queue_len, st.gridlet_id) <
                         std::tie(best->busy_ticks, best->queue_len, best->gridlet_id))
            best = &st;
    }
    if (!best) return std::nullopt;
    return best->gridlet_id;
}

std::uint64_t task_duration(std::uint64_t cost, std::uint64_t cpu_rate) {
    return (cost + cpu_rate - 1) / cpu_rate;
}

std::string_view to_string(JobKind kind) {
    switch (kind) {
        case JobKind::mine: return "mine";
        case JobKind::classify: return "classify";
        case JobKind::path_query: return "path_query";
        case JobKind::synthetic: return "synthetic";
    }
    return "unknown";
}

std::string_view to_string(JobState state) {
    switch (state) {
        case JobState::submitted: return "submitted";
        case JobState::running: return "running";
        case JobState::aggregating: return "aggregating";
        case JobState::delivered: return "delivered";
        case JobState::failed: return "failed";
    }
    return "unknown";
}

void JobDescriptor::advance(JobState next) {
    bool ok = false;
    switch (state) {
        case JobState::submitted: ok = next == JobState::running || next == JobState::failed; break;
        case JobState::running: ok = next == JobState::aggregating || next == JobState::failed; break;
        case JobState::aggregating: ok = next == JobState::delivered || next == JobState::failed; break;
        case JobState::delivered:
        case JobState::failed: ok = false; break;
    }
    if (!ok)
        throw std::logic_error("job " + std::to_string(job_id) + ": illegal transition " +
                               std::string(to_string(state)) + " -> " + std::string(to_string(next)));
    state = next;
}

Scheduler::Scheduler(std::span<const GridletSpec> gridlets, Rational trust_threshold) : threshold_(trust_threshold) {
    for (const auto& spec : gridlets) {
        GridletRecord record;
        record.spec = spec;
        gridlets_.push_back(record);
    }
}

std::size_t Scheduler::index_of(GridletId id) const {
    for (std::size_t i = 0; i < gridlets_.size(); ++i)
        if (gridlets_[i].spec.id == id) return i;
    throw std::out_of_range("unknown gridlet " + std::to_string(id));
}

const Scheduler::GridletRecord& Scheduler::gridlet(GridletId id) const { return gridlets_[index_of(id)]; }

std::vector<GridletStatus> Scheduler::statuses() const {
    std::vector<GridletStatus> out;
    out.reserve(gridlets_.size());
    for (const auto& g : gridlets_) out.push_back({g.spec.id, g.projected_ticks, g.queue_len, g.trust});
    return out;
}

bool Scheduler::assign(std::span<TaskDescriptor> tasks) {
    auto working = statuses();
    std::vector<std::size_t> picks;
    std::vector<DispatchDecision> decisions;
    picks.reserve(tasks.size());

    for (const auto& task : tasks) {
        auto chosen = select_gridlet(working, threshold_);
        if (!chosen) return false;
        std::size_t idx = index_of(*chosen);
        if (log_) decisions.push_back({task.task_id, *chosen, working});
        working[idx].busy_ticks += task_duration(task.cost, gridlets_[idx].spec.cpu_rate);
        working[idx].queue_len += 1;
        picks.push_back(idx);
    }

    for (std::size_t i = 0; i < tasks.size(); ++i) {
        auto& g = gridlets_[picks[i]];
        auto duration = task_duration(tasks[i].cost, g.spec.cpu_rate);
        g.projected_ticks += duration;
        g.queue_len += 1;
        g.tasks_assigned += 1;
        tasks[i].assigned_gridlet = g.spec.id;
        if (!in_flight_.emplace(tasks[i].task_id, InFlight{tasks[i].job_id, picks[i], duration}).second)
            throw std::logic_error("task " + std::to_string(tasks[i].task_id) + " assigned twice");
        ++outstanding_[tasks[i].job_id];
    }
    if (log_) log_->insert(log_->end(), decisions.begin(), decisions.end());
    return true;
}

Completion Scheduler::on_task_complete(std::uint64_t task_id, TaskOutcome outcome) {
    auto it = in_flight_.find(task_id);
    if (it == in_flight_.end()) throw std::out_of_range("unknown task id " + std::to_string(task_id));
    InFlight task = it->second;
    in_flight_.erase(it);

    auto& g = gridlets_[task.gridlet_index];
    g.busy_ticks += task.duration;
    g.queue_len -= 1;
    if (outcome == TaskOutcome::success)
        g.trust.record_success();
    else
        g.trust.record_failure();

    auto& left = outstanding_[task.job_id];
    --left;
    Completion done{task.job_id, g.spec.id, left};
    if (left == 0) outstanding_.erase(task.job_id);
    return done;
}

}  // namespace gridminer

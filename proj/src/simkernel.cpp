#include "gridminer/simkernel.hpp"

#include <limits>
#include <stdexcept>

namespace gridminer {

std::string_view to_string(EventKind kind) {
    switch (kind) {
        case EventKind::job_submit: return "job_submit";
        case EventKind::task_start: return "task_start";
        case EventKind::task_finish: return "task_finish";
        case EventKind::task_complete: return "task_complete";
        case EventKind::aggregate: return "aggregate";
        case EventKind::deliver: return "deliver";
    }
    return "unknown";
}

std::string format_trace_line(const Event& event) {
    std::string line = "tick=" + std::to_string(event.time) + " seq=" + std::to_string(event.seq) + " target=";
    if (event.target.role == EntityRef::Role::scheduler)
        line += "scheduler";
    else
        line += std::to_string(event.target.id);
    line += " kind=";
    line += to_string(event.kind);
    return line;
}

std::uint64_t Kernel::schedule(Event event) {
    if (event.time < now_)
        throw std::logic_error("event scheduled in the past: t=" + std::to_string(event.time) +
                               " < now=" + std::to_string(now_));
    event.seq = next_seq_++;
    queue_.push(event);
    return event.seq;
}

SimTime Kernel::run_until(SimTime horizon, const Handler& handler) {
    if (running_) throw std::logic_error("Kernel::run_until re-entered from a handler");
    running_ = true;
    struct Reset {
        bool& flag;
        ~Reset() { flag = false; }
    } reset{running_};

    while (!queue_.empty() && queue_.top().time <= horizon) {
        Event event = queue_.top();
        queue_.pop();
        now_ = event.time;
        ++dispatched_;
        if (trace_) trace_->push_back(format_trace_line(event));
        handler(event);
    }
    return now_;
}

SimTime Kernel::run(const Handler& handler) {
    return run_until(std::numeric_limits<SimTime>::max(), handler);
}

}  // namespace gridminer

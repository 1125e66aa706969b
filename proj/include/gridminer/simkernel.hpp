#pragma once

#include <cstdint>
#include <functional>
#include <queue>
#include <string>
#include <string_view>
#include <vector>

namespace gridminer {

/// Virtual time in integer ticks. Starts at 0, never decreases.
using SimTime = std::uint64_t;

/// Addressee of an event. Clients and gridlets share one numeric id space
/// (ids are disjoint); the scheduler is a singleton.
struct EntityRef {
    enum class Role : std::uint8_t { scheduler, gridlet, client };

    Role role = Role::scheduler;
    std::uint64_t id = 0;

    static EntityRef scheduler() { return {Role::scheduler, 0}; }
    static EntityRef gridlet(std::uint64_t id) { return {Role::gridlet, id}; }
    static EntityRef client(std::uint64_t id) { return {Role::client, id}; }

    friend bool operator==(const EntityRef&, const EntityRef&) = default;
};

enum class EventKind : std::uint8_t {
    job_submit,     // request reaches the scheduler
    task_start,     // sub-task arrives at its gridlet
    task_finish,    // gridlet finished executing a sub-task
    task_complete,  // partial result reaches the scheduler
    aggregate,      // all sub-tasks of a round are in
    deliver,        // final result reaches a client
};

std::string_view to_string(EventKind kind);

struct Event {
    SimTime time = 0;
    std::uint64_t seq = 0;
    EntityRef target;
    EventKind kind = EventKind::job_submit;
    std::uint64_t job_id = 0;
    std::uint64_t task_id = 0;
};

/// `tick=<t> seq=<n> target=<id> kind=<k>`
std::string format_trace_line(const Event& event);

/// Single-threaded discrete-event engine. Events pop in (time, seq) order,
/// where seq is the global issue order, so equal-time events run FIFO.
class Kernel {
public:
    using Handler = std::function<void(const Event&)>;

    /// Queues `event` (its seq field is overwritten) and returns the
    /// assigned seq. Throws std::logic_error if event.time < now().
    std::uint64_t schedule(Event event);

    std::uint64_t schedule(SimTime time, EntityRef target, EventKind kind, std::uint64_t job_id = 0,
                           std::uint64_t task_id = 0) {
        return schedule(Event{time, 0, target, kind, job_id, task_id});
    }

    /// Dispatches every queued event with time <= horizon, including events
    /// that handlers schedule along the way. Returns the final clock.
    SimTime run_until(SimTime horizon, const Handler& handler);

    /// Runs until the queue is empty.
    SimTime run(const Handler& handler);

    SimTime now() const { return now_; }
    std::size_t pending() const { return queue_.size(); }
    std::uint64_t dispatched() const { return dispatched_; }

    /// When set, one trace line per dispatched event is appended.
    void set_trace(std::vector<std::string>* sink) { trace_ = sink; }

private:
    struct Later {
        bool operator()(const Event& a, const Event& b) const {
            return a.time != b.time ? a.time > b.time : a.seq > b.seq;
        }
    };

    std::priority_queue<Event, std::vector<Event>, Later> queue_;
    SimTime now_ = 0;
    std::uint64_t next_seq_ = 0;
    std::uint64_t dispatched_ = 0;
    bool running_ = false;
    std::vector<std::string>* trace_ = nullptr;
};

}  // namespace gridminer

#include "gridminer/simulation.hpp"

#include <algorithm>
#include <charconv>
#include <deque>
#include <map>

#include "gridminer/errors.hpp"
#include "parallel.hpp"

namespace gridminer {

using nlohmann::json;

std::pair<GridletId, std::uint64_t> parse_failure(std::string_view text) {
    auto colon = text.find(':');
    GridletId gridlet = 0;
    std::uint64_t ordinal = 0;
    bool ok = colon != std::string_view::npos;
    if (ok) {
        auto a = text.substr(0, colon), b = text.substr(colon + 1);
        auto r1 = std::from_chars(a.data(), a.data() + a.size(), gridlet);
        auto r2 = std::from_chars(b.data(), b.data() + b.size(), ordinal);
        ok = !a.empty() && !b.empty() && r1.ec == std::errc{} && r1.ptr == a.data() + a.size() &&
             r2.ec == std::errc{} && r2.ptr == b.data() + b.size() && ordinal >= 1;
    }
    if (!ok) throw ParseError("--fail", "expected <gridlet_id>:<task_ordinal> with ordinal >= 1, got '" +
                                            std::string(text) + "'");
    return {gridlet, ordinal};
}

json patterns_to_json(std::span<const mining::Pattern> patterns) {
    json out = json::array();
    for (const auto& p : patterns) {
        json entry{{"items", p.items}, {"support", p.support.str()}};
        if (p.epsilon) entry["epsilon"] = *p.epsilon;
        out.push_back(std::move(entry));
    }
    return out;
}

std::string render_report(const json& report) { return report.dump(2) + "\n"; }

namespace {

json scalar_json(const std::optional<Scalar>& value) {
    if (!value) return nullptr;
    return std::visit([](const auto& v) { return json(v); }, *value);
}

struct RoundTask {
    PartitionId partition = 0;
    std::uint64_t cost = 1;
    PartialPayload payload;
    std::optional<std::string> error;
};

template <class Fn>
std::vector<RoundTask> run_tasks(std::size_t n, unsigned workers, Fn fn) {
    return detail::parallel_map(n, workers, [&](std::size_t i) {
        try {
            return fn(i);
        } catch (const TaskError& e) {
            RoundTask t;
            t.error = e.what();
            return t;
        }
    });
}

class JobDriver {
public:
    virtual ~JobDriver() = default;
    /// Tasks of the next round with their payloads already computed.
    virtual std::vector<RoundTask> next_round(unsigned workers) = 0;
    virtual void absorb(const PartialPayload& merged) = 0;
    virtual bool finished() const = 0;
    virtual FinalPayload result() const = 0;
    virtual json result_json() const = 0;
};

class MineDriver final : public JobDriver {
public:
    MineDriver(const MineJob& job, const Grid& grid, std::uint64_t seed) : count_cost_(grid.costs.count) {
        auto parts = partition_dataset(job.records, job.partitions, job.policy);
        assign_hosts(parts, grid);
        std::uint64_t n = 0;
        if (job.sampling) {
            parts = mining::sample_partitions(parts, job.sampling->sample_rate, seed);
            for (const auto& p : parts) n += p.records.size();
            if (n == 0) throw ValidationError("sample size is 0 on every partition");
            miner_.emplace(mining::LevelwiseMiner::estimated(job.minsup, mining::hoeffding_epsilon(n, job.sampling->delta)));
        } else {
            for (const auto& p : parts) n += p.records.size();
            if (n == 0) throw ValidationError("no sequences to mine");
            miner_.emplace(mining::LevelwiseMiner::exact(job.minsup));
        }
        partitions_ = std::move(parts);
    }

    std::vector<RoundTask> next_round(unsigned workers) override {
        return run_tasks(partitions_.size(), workers, [&](std::size_t i) {
            const auto& part = partitions_[i];
            return RoundTask{part.id, miner_->cost(part, count_cost_), miner_->count(part), std::nullopt};
        });
    }
    void absorb(const PartialPayload& merged) override {
        const auto* table = std::get_if<mining::SupportTable>(&merged);
        miner_->advance(table ? *table : mining::SupportTable{});
    }
    bool finished() const override { return miner_->done(); }
    FinalPayload result() const override { return miner_->patterns(); }
    json result_json() const override {
        auto patterns = miner_->patterns();
        return json{{"patterns", patterns_to_json(patterns)}};
    }

private:
    std::uint64_t count_cost_;
    std::vector<DataPartition> partitions_;
    std::optional<mining::LevelwiseMiner> miner_;
};

class ClassifyDriver final : public JobDriver {
public:
    ClassifyDriver(const ClassifyJob& job, const Grid& grid)
        : split_cost_(grid.costs.split),
          builder_(make_partitions(job, grid), job.data.schema, job.params) {}

    std::vector<RoundTask> next_round(unsigned workers) override {
        return run_tasks(builder_.partition_count(), workers, [&](std::size_t i) {
            return RoundTask{builder_.partition(i).id, builder_.cost(i, split_cost_), builder_.statistics(i), std::nullopt};
        });
    }
    void absorb(const PartialPayload& merged) override {
        const auto* stats = std::get_if<mining::SplitStatistics>(&merged);
        builder_.advance(stats ? *stats : mining::SplitStatistics{});
    }
    bool finished() const override { return builder_.done(); }
    FinalPayload result() const override { return builder_.tree(); }
    json result_json() const override {
        const auto& tree = builder_.tree();
        return json{{"tree", tree.render(builder_.schema())}, {"nodes", tree.nodes.size()}, {"depth", tree.depth()}};
    }

private:
    static std::vector<DataPartition> make_partitions(const ClassifyJob& job, const Grid& grid) {
        auto parts = partition_dataset(job.data.records, job.partitions, job.policy);
        assign_hosts(parts, grid);
        return parts;
    }

    std::uint64_t split_cost_;
    mining::TreeBuilder builder_;
};

class PathQueryDriver final : public JobDriver {
public:
    PathQueryDriver(const PathQueryJob& job, const Grid& grid) {
        for (const auto& src : job.sources) {
            auto parts = partition_dataset(src.records, src.partitions, src.policy, src.schema_id);
            for (auto& p : parts) {
                p.id = partitions_.size();
                partitions_.push_back(std::move(p));
            }
        }
        assign_hosts(partitions_, grid);
        plan_ = query::plan(job.query, job.mappings, partitions_, grid.costs.scan, job.options);
    }

    std::vector<RoundTask> next_round(unsigned workers) override {
        return run_tasks(plan_.sub_queries.size(), workers, [&](std::size_t i) {
            const auto& sq = plan_.sub_queries[i];
            return RoundTask{sq.partition_id, sq.cost, query::eval_subquery(sq.query, partitions_[sq.partition_id]),
                             std::nullopt};
        });
    }
    void absorb(const PartialPayload& merged) override {
        if (const auto* r = std::get_if<query::SubQueryResult>(&merged)) result_ = *r;
        done_ = true;
    }
    bool finished() const override { return done_; }
    FinalPayload result() const override { return result_; }
    json result_json() const override {
        json matches = json::array();
        for (const auto& m : result_.matches) matches.push_back({{"record_id", m.record_id}, {"value", scalar_json(m.value)}});
        json reformulations = json::array();
        for (const auto& r : plan_.reformulations)
            reformulations.push_back({{"schema", r.schema_id}, {"query", query::format_query(r)}});
        return json{{"matches", matches},
                    {"skipped", result_.skipped},
                    {"reformulations", reformulations},
                    {"sub_queries", plan_.sub_queries.size()}};
    }

private:
    std::vector<DataPartition> partitions_;
    query::ExecutionPlan plan_;
    query::SubQueryResult result_;
    bool done_ = false;
};

class SyntheticDriver final : public JobDriver {
public:
    explicit SyntheticDriver(const SyntheticJob& job) : job_(job) {}

    std::vector<RoundTask> next_round(unsigned) override {
        std::vector<RoundTask> tasks(job_.tasks);
        for (std::size_t i = 0; i < tasks.size(); ++i) {
            tasks[i].partition = i;
            tasks[i].cost = job_.cost;
        }
        return tasks;
    }
    void absorb(const PartialPayload&) override { done_ = true; }
    bool finished() const override { return done_; }
    FinalPayload result() const override { return std::monostate{}; }
    json result_json() const override { return json::object(); }

private:
    SyntheticJob job_;
    bool done_ = false;
};

}  // namespace

struct Simulation::Impl {
    struct JobRun {
        JobDescriptor desc;
        const JobSpec* spec = nullptr;
        std::unique_ptr<JobDriver> driver;
        std::vector<PartialResult> parts;
        std::vector<std::uint64_t> round_tasks;
        std::size_t rounds = 0;
        std::uint64_t tasks_total = 0;
        std::optional<SimTime> finished_at;
        std::size_t pending_deliveries = 0;
        std::string error;
    };

    struct TaskRun {
        std::uint64_t job_id = 0;
        GridletId gridlet = 0;
        std::uint64_t duration = 0;
        PartialPayload payload;
        bool fails = false;
    };

    struct GridletRun {
        bool busy = false;
        std::deque<std::uint64_t> queue;
        std::uint64_t assigned = 0;
    };

    Grid grid;
    Workload workload;
    SimulationOptions options;
    Kernel kernel;
    Scheduler scheduler;
    std::vector<JobRun> jobs;
    std::map<std::uint64_t, TaskRun> tasks;
    std::map<GridletId, GridletRun> gridlet_runs;
    std::vector<std::string> trace;
    std::vector<FinalResult> results;
    std::uint64_t next_task_id = 0;
    bool ran = false;

    Impl(Grid g, Workload w, SimulationOptions o)
        : grid(std::move(g)), workload(std::move(w)), options(std::move(o)), scheduler(grid.gridlets, options.trust_threshold) {
        for (std::size_t i = 0; i < workload.jobs.size(); ++i) {
            auto& spec = workload.jobs[i];
            if (spec.recipients.empty()) spec.recipients = {spec.client};
            std::string where = "workload: jobs[" + std::to_string(i) + "]";
            if (!grid.find_client(spec.client))
                throw ValidationError(where + ".client: unknown client " + std::to_string(spec.client));
            for (auto r : spec.recipients)
                if (!grid.find_client(r)) throw ValidationError(where + ".recipients: unknown client " + std::to_string(r));
        }
        for (const auto& [gridlet, ordinal] : options.failures)
            if (!grid.find_gridlet(gridlet))
                throw ValidationError("--fail: unknown gridlet " + std::to_string(gridlet));
        for (const auto& g : grid.gridlets) gridlet_runs[g.id];
        if (options.trace) kernel.set_trace(&trace);
    }

    void fail(JobRun& job, std::string why) {
        if (job.desc.state == JobState::failed || job.desc.state == JobState::delivered) return;
        job.desc.advance(JobState::failed);
        job.error = std::move(why);
        job.finished_at = kernel.now();
        job.parts.clear();
    }

    void on_submit(JobRun& job) {
        const JobSpec& spec = *job.spec;
        try {
            std::visit(
                [&](const auto& work) {
                    using T = std::decay_t<decltype(work)>;
                    if constexpr (std::is_same_v<T, MineJob>) {
                        job.driver = std::make_unique<MineDriver>(work, grid, options.seed);
                    } else if constexpr (std::is_same_v<T, ClassifyJob>) {
                        job.driver = std::make_unique<ClassifyDriver>(work, grid);
                    } else if constexpr (std::is_same_v<T, PathQueryJob>) {
                        job.driver = std::make_unique<PathQueryDriver>(work, grid);
                    } else {
                        job.driver = std::make_unique<SyntheticDriver>(work);
                    }
                },
                spec.work);
        } catch (const Error& e) {
            fail(job, e.what());
            return;
        }
        job.desc.advance(JobState::running);
        progress(job);
    }

    void progress(JobRun& job) {
        if (job.driver->finished()) {
            finalize(job);
            return;
        }
        auto round = job.driver->next_round(options.workers);
        ++job.rounds;
        job.parts.clear();
        job.round_tasks.clear();
        if (round.empty()) {
            kernel.schedule(kernel.now(), EntityRef::scheduler(), EventKind::aggregate, job.desc.job_id);
            return;
        }

        job.desc.sub_tasks.clear();
        for (const auto& t : round)
            job.desc.sub_tasks.push_back(TaskDescriptor{next_task_id++, job.desc.job_id, t.partition, t.cost, std::nullopt});
        if (!scheduler.assign(job.desc.sub_tasks)) {
            fail(job, "no resource: no trust-eligible gridlet");
            return;
        }

        for (std::size_t i = 0; i < round.size(); ++i) {
            const auto& desc = job.desc.sub_tasks[i];
            GridletId g = *desc.assigned_gridlet;
            const auto& spec = *grid.find_gridlet(g);
            auto ordinal = ++gridlet_runs[g].assigned;
            TaskRun run;
            run.job_id = job.desc.job_id;
            run.gridlet = g;
            run.duration = task_duration(desc.cost, spec.cpu_rate);
            run.payload = std::move(round[i].payload);
            run.fails = round[i].error.has_value() || options.failures.count({g, ordinal}) > 0;
            tasks.emplace(desc.task_id, std::move(run));
            job.round_tasks.push_back(desc.task_id);
            ++job.tasks_total;
            kernel.schedule(kernel.now() + spec.latency, EntityRef::gridlet(g), EventKind::task_start, job.desc.job_id,
                            desc.task_id);
        }
    }

    void begin_execution(GridletId g, std::uint64_t task_id) {
        gridlet_runs[g].busy = true;
        const auto& run = tasks.at(task_id);
        kernel.schedule(kernel.now() + run.duration, EntityRef::gridlet(g), EventKind::task_finish, run.job_id, task_id);
    }

    void on_task_start(const Event& ev) {
        auto& gr = gridlet_runs[ev.target.id];
        if (gr.busy)
            gr.queue.push_back(ev.task_id);
        else
            begin_execution(ev.target.id, ev.task_id);
    }

    void on_task_finish(const Event& ev) {
        GridletId g = ev.target.id;
        auto& gr = gridlet_runs[g];
        gr.busy = false;
        kernel.schedule(kernel.now() + grid.find_gridlet(g)->latency, EntityRef::scheduler(), EventKind::task_complete,
                        ev.job_id, ev.task_id);
        if (!gr.queue.empty()) {
            auto next = gr.queue.front();
            gr.queue.pop_front();
            begin_execution(g, next);
        }
    }

    void on_task_complete(const Event& ev) {
        auto node = tasks.extract(ev.task_id);
        if (node.empty()) throw std::logic_error("completion for unknown task " + std::to_string(ev.task_id));
        TaskRun run = std::move(node.mapped());
        auto done = scheduler.on_task_complete(ev.task_id, run.fails ? TaskOutcome::failure : TaskOutcome::success);

        auto& job = jobs.at(done.job_id);
        if (job.desc.state != JobState::running) return;
        if (run.fails) {
            fail(job, "task " + std::to_string(ev.task_id) + " failed on gridlet " + std::to_string(run.gridlet));
            return;
        }
        job.parts.push_back(PartialResult{ev.task_id, job.desc.job_id, std::move(run.payload)});
        if (done.remaining == 0)
            kernel.schedule(kernel.now(), EntityRef::scheduler(), EventKind::aggregate, job.desc.job_id);
    }

    void on_aggregate(const Event& ev) {
        auto& job = jobs.at(ev.job_id);
        if (job.desc.state != JobState::running) return;
        try {
            auto merged = aggregate(job.parts, job.round_tasks);
            job.driver->absorb(merged);
        } catch (const CoverageError& e) {
            fail(job, e.what());
            return;
        }
        progress(job);
    }

    void finalize(JobRun& job) {
        job.desc.advance(JobState::aggregating);
        results[job.desc.job_id] = FinalResult{job.desc.job_id, job.driver->result(), kernel.now()};

        std::vector<ClientSpec> recipients;
        for (auto id : job.spec->recipients) recipients.push_back(*grid.find_client(id));
        auto deliveries = multicast(recipients, kernel.now(), options.delivery);
        job.pending_deliveries = deliveries.size();
        for (const auto& d : deliveries)
            kernel.schedule(d.time, EntityRef::client(d.client), EventKind::deliver, job.desc.job_id);
    }

    void on_deliver(const Event& ev) {
        auto& job = jobs.at(ev.job_id);
        if (--job.pending_deliveries == 0) {
            job.desc.advance(JobState::delivered);
            job.finished_at = kernel.now();
        }
    }

    void handle(const Event& ev) {
        switch (ev.kind) {
            case EventKind::job_submit: on_submit(jobs.at(ev.job_id)); break;
            case EventKind::task_start: on_task_start(ev); break;
            case EventKind::task_finish: on_task_finish(ev); break;
            case EventKind::task_complete: on_task_complete(ev); break;
            case EventKind::aggregate: on_aggregate(ev); break;
            case EventKind::deliver: on_deliver(ev); break;
        }
    }

    json run() {
        if (ran) throw std::logic_error("Simulation::run called twice");
        ran = true;
        results.assign(workload.jobs.size(), FinalResult{});
        for (std::size_t i = 0; i < workload.jobs.size(); ++i) {
            const auto& spec = workload.jobs[i];
            JobRun job;
            job.desc.job_id = i;
            job.desc.client_id = spec.client;
            job.desc.kind = std::visit(
                [](const auto& w) {
                    using T = std::decay_t<decltype(w)>;
                    if constexpr (std::is_same_v<T, MineJob>) return JobKind::mine;
                    else if constexpr (std::is_same_v<T, ClassifyJob>) return JobKind::classify;
                    else if constexpr (std::is_same_v<T, PathQueryJob>) return JobKind::path_query;
                    else return JobKind::synthetic;
                },
                spec.work);
            job.spec = &spec;
            results[i].job_id = i;
            jobs.push_back(std::move(job));
        }
        for (std::size_t i = 0; i < workload.jobs.size(); ++i) {
            const auto& spec = workload.jobs[i];
            kernel.schedule(spec.submit + grid.find_client(spec.client)->latency, EntityRef::scheduler(),
                            EventKind::job_submit, i);
        }
        kernel.run([this](const Event& ev) { handle(ev); });
        return report();
    }

    json report() const {
        json config{{"gridlets", json::array()}, {"clients", json::array()},
                    {"costs", {{"count", grid.costs.count}, {"scan", grid.costs.scan}, {"split", grid.costs.split}}}};
        for (const auto& g : grid.gridlets)
            config["gridlets"].push_back({{"id", g.id}, {"cpu_rate", g.cpu_rate}, {"latency", g.latency}});
        for (const auto& c : grid.clients) config["clients"].push_back({{"id", c.id}, {"latency", c.latency}});

        json gridlets = json::array();
        for (const auto& g : scheduler.gridlets())
            gridlets.push_back({{"id", g.spec.id},
                                {"busy_ticks", g.busy_ticks},
                                {"tasks", g.tasks_assigned},
                                {"trust", {{"s", g.trust.successes()}, {"f", g.trust.failures()}}}});

        json job_list = json::array();
        std::optional<SimTime> first, last;
        for (const auto& job : jobs) {
            SimTime submitted = job.spec->submit;
            bool delivered = job.desc.state == JobState::delivered;
            json entry{{"job_id", job.desc.job_id},
                       {"kind", to_string(job.desc.kind)},
                       {"client", job.desc.client_id},
                       {"recipients", job.spec->recipients},
                       {"submitted", submitted},
                       {"delivered", delivered ? json(*job.finished_at) : json(nullptr)},
                       {"makespan", delivered ? json(*job.finished_at - submitted) : json(nullptr)},
                       {"mode", to_string(options.delivery)},
                       {"state", to_string(job.desc.state)},
                       {"error", job.error.empty() ? json(nullptr) : json(job.error)},
                       {"rounds", job.rounds},
                       {"tasks", job.tasks_total},
                       {"result", delivered ? job.driver->result_json() : json(nullptr)}};
            job_list.push_back(std::move(entry));
            first = first ? std::min(*first, submitted) : submitted;
            if (job.finished_at) last = last ? std::max(*last, *job.finished_at) : *job.finished_at;
        }

        return json{{"config", config},
                    {"delivery_mode", to_string(options.delivery)},
                    {"events", kernel.dispatched()},
                    {"gridlets", gridlets},
                    {"jobs", job_list},
                    {"makespan", first && last ? *last - *first : 0},
                    {"seed", options.seed},
                    {"trust_threshold", options.trust_threshold.str()}};
    }
};

Simulation::Simulation(Grid grid, Workload workload, SimulationOptions options)
    : impl_(std::make_unique<Impl>(std::move(grid), std::move(workload), std::move(options))) {}

Simulation::~Simulation() = default;

json Simulation::run() { return impl_->run(); }

const std::vector<std::string>& Simulation::trace() const { return impl_->trace; }

const std::vector<FinalResult>& Simulation::results() const { return impl_->results; }

void Simulation::set_decision_log(std::vector<DispatchDecision>* log) { impl_->scheduler.set_decision_log(log); }

}  // namespace gridminer

#include <doctest.h>

#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "gridminer/scheduler.hpp"
#include "gridminer/simulation.hpp"

using namespace gridminer;

namespace {

std::vector<GridletStatus> statuses(std::vector<std::uint64_t> busy) {
    std::vector<GridletStatus> out;
    for (std::size_t i = 0; i < busy.size(); ++i) out.push_back({i, busy[i], 0, {}});
    return out;
}

std::vector<GridletSpec> identical(std::size_t n) {
    std::vector<GridletSpec> out;
    for (std::size_t i = 0; i < n; ++i) out.push_back({i, 1, 0});
    return out;
}

std::vector<TaskDescriptor> tasks(std::size_t n, std::uint64_t cost, std::uint64_t first_id = 0) {
    std::vector<TaskDescriptor> out;
    for (std::size_t i = 0; i < n; ++i) out.push_back({first_id + i, 0, 0, cost, std::nullopt});
    return out;
}

}  // namespace

TEST_CASE("select_gridlet picks the least busy") {
    CHECK(select_gridlet(statuses({5, 3, 7}), kDefaultTrustThreshold) == 1u);
}

TEST_CASE("select_gridlet tie breaks on queue length then id") {
    auto st = statuses({4, 4});
    st[0].queue_len = 2;
    st[1].queue_len = 1;
    CHECK(select_gridlet(st, kDefaultTrustThreshold) == 1u);
    st[0].queue_len = 1;
    CHECK(select_gridlet(st, kDefaultTrustThreshold) == 0u);
}

TEST_CASE("select_gridlet filters on trust before load") {
    auto st = statuses({10, 0});
    st[0].trust = TrustScore(8, 0);  // 0.9
    st[1].trust = TrustScore(0, 8);  // 0.1
    CHECK(select_gridlet(st, kDefaultTrustThreshold) == 0u);
    st[0].trust = TrustScore(0, 8);
    CHECK_FALSE(select_gridlet(st, kDefaultTrustThreshold).has_value());
    CHECK_FALSE(select_gridlet({}, kDefaultTrustThreshold).has_value());
}

TEST_CASE("trust formula") {
    TrustScore t;
    CHECK(t.value() == Rational(1, 2));
    t.record_success();
    CHECK(t.value() == Rational(2, 3));
    TrustScore u;
    u.record_failure();
    CHECK(u.value() == Rational(1, 3));
    // exactly at the threshold counts as eligible: (0+1)/(0+2+2) = 1/4
    CHECK(TrustScore(0, 2).meets(Rational(1, 4)));
    CHECK_FALSE(TrustScore(0, 3).meets(Rational(1, 4)));
}

TEST_CASE("property: trust stays in (0,1) and equals the formula") {
    std::mt19937_64 rng(3);
    TrustScore t;
    std::uint64_t s = 0, f = 0;
    for (int i = 0; i < 2000; ++i) {
        if (rng() % 3) {
            t.record_success();
            ++s;
        } else {
            t.record_failure();
            ++f;
        }
        auto v = t.value();
        CHECK(v > Rational(0));
        CHECK(v < Rational(1));
        CHECK(v == Rational(static_cast<std::int64_t>(s + 1), static_cast<std::int64_t>(s + f + 2)));
    }
}

TEST_CASE("task_duration rounds up") {
    CHECK(task_duration(8, 4) == 2);
    CHECK(task_duration(9, 4) == 3);
    CHECK(task_duration(1, 100) == 1);
}

TEST_CASE("four equal tasks on two idle gridlets alternate") {
    auto specs = identical(2);
    Scheduler sched(specs);
    auto ts = tasks(4, 3);
    REQUIRE(sched.assign(ts));
    CHECK(*ts[0].assigned_gridlet == 0);
    CHECK(*ts[1].assigned_gridlet == 1);
    CHECK(*ts[2].assigned_gridlet == 0);
    CHECK(*ts[3].assigned_gridlet == 1);
    CHECK(sched.gridlet(0).tasks_assigned == 2);
    CHECK(sched.gridlet(1).projected_ticks == 6);
}

TEST_CASE("one task one gridlet") {
    auto specs = identical(1);
    Scheduler sched(specs);
    auto ts = tasks(1, 1);
    REQUIRE(sched.assign(ts));
    CHECK(*ts[0].assigned_gridlet == 0);
}

TEST_CASE("assignment is all or nothing") {
    auto specs = identical(2);
    Scheduler sched(specs, Rational(3, 4));  // fresh trust 1/2 is below
    auto ts = tasks(3, 1);
    CHECK_FALSE(sched.assign(ts));
    for (const auto& g : sched.gridlets()) {
        CHECK(g.projected_ticks == 0);
        CHECK(g.queue_len == 0);
    }
    for (const auto& t : ts) CHECK_FALSE(t.assigned_gridlet.has_value());
}

TEST_CASE("on_task_complete books work and trust") {
    auto specs = identical(2);
    Scheduler sched(specs);
    auto ts = tasks(2, 5);
    for (auto& t : ts) t.job_id = 9;
    REQUIRE(sched.assign(ts));
    auto c1 = sched.on_task_complete(0, TaskOutcome::success);
    CHECK(c1.job_id == 9);
    CHECK(c1.remaining == 1);
    CHECK(sched.gridlet(0).busy_ticks == 5);
    CHECK(sched.gridlet(0).trust.value() == Rational(2, 3));
    auto c2 = sched.on_task_complete(1, TaskOutcome::failure);
    CHECK(c2.remaining == 0);
    CHECK(sched.gridlet(1).trust.value() == Rational(1, 3));
    CHECK_THROWS_AS(sched.on_task_complete(1, TaskOutcome::success), std::out_of_range);
    CHECK_THROWS_AS(sched.on_task_complete(77, TaskOutcome::success), std::out_of_range);
}

TEST_CASE("job state machine") {
    JobDescriptor job;
    CHECK_THROWS_AS(job.advance(JobState::aggregating), std::logic_error);
    job.advance(JobState::running);
    CHECK_THROWS_AS(job.advance(JobState::submitted), std::logic_error);
    job.advance(JobState::aggregating);
    job.advance(JobState::delivered);
    CHECK_THROWS_AS(job.advance(JobState::failed), std::logic_error);

    JobDescriptor other;
    other.advance(JobState::failed);
    CHECK_THROWS_AS(other.advance(JobState::running), std::logic_error);
}

TEST_CASE("untrusted grid fails the job without task events") {
    Grid grid;
    grid.gridlets = identical(2);
    grid.clients = {{10, 0}};
    Workload w;
    w.jobs.push_back({0, 10, {}, SyntheticJob{3, 1}});
    SimulationOptions opt;
    opt.trust_threshold = Rational(9, 10);
    opt.trace = true;
    Simulation sim(grid, w, opt);
    auto report = sim.run();
    CHECK(report["jobs"][0]["state"] == "failed");
    CHECK(report["jobs"][0]["error"].get<std::string>().rfind("no resource", 0) == 0);
    for (const auto& line : sim.trace()) CHECK(line.find("task_") == std::string::npos);
}

TEST_CASE("aggregation fires at the last completion") {
    // durations 5, 7, 9 on three gridlets
    Grid grid;
    grid.gridlets = {{1, 63, 0}, {2, 45, 0}, {3, 35, 0}};
    grid.clients = {{10, 0}};
    Workload w;
    w.jobs.push_back({0, 10, {}, SyntheticJob{3, 315}});
    SimulationOptions opt;
    opt.trace = true;
    Simulation sim(grid, w, opt);
    sim.run();
    std::vector<std::string> completes, aggregates;
    for (const auto& line : sim.trace()) {
        if (line.find("kind=task_complete") != std::string::npos) completes.push_back(line.substr(0, line.find(' ')));
        if (line.find("kind=aggregate") != std::string::npos) aggregates.push_back(line.substr(0, line.find(' ')));
    }
    CHECK(completes == std::vector<std::string>{"tick=5", "tick=7", "tick=9"});
    CHECK(aggregates == std::vector<std::string>{"tick=9"});
}

TEST_CASE("a grid without gridlets fails dispatch with no resource") {
    Grid grid;
    grid.clients = {{10, 2}};
    Workload w;
    w.jobs.push_back({0, 10, {}, SyntheticJob{1, 1}});
    Simulation sim(grid, w, {});
    auto report = sim.run();
    CHECK(report["jobs"][0]["state"] == "failed");
    CHECK(report["jobs"][0]["error"].get<std::string>().rfind("no resource", 0) == 0);
    CHECK(report["makespan"] == 2);
}

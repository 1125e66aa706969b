#include <doctest.h>

#include <random>
#include <stdexcept>
#include <tuple>
#include <vector>

#include "gridminer/simkernel.hpp"

using namespace gridminer;

namespace {

std::vector<Event> drain(Kernel& k, SimTime horizon) {
    std::vector<Event> seen;
    k.run_until(horizon, [&](const Event& e) { seen.push_back(e); });
    return seen;
}

}  // namespace

TEST_CASE("event at now dispatches before now+1") {
    Kernel k;
    k.schedule(1, EntityRef::gridlet(1), EventKind::task_finish);
    k.schedule(0, EntityRef::gridlet(2), EventKind::task_start);
    auto seen = drain(k, 10);
    REQUIRE(seen.size() == 2);
    CHECK(seen[0].time == 0);
    CHECK(seen[1].time == 1);
}

TEST_CASE("same-time events run in issue order") {
    Kernel k;
    auto a = k.schedule(4, EntityRef::gridlet(1), EventKind::task_start, 0, 1);
    auto b = k.schedule(4, EntityRef::gridlet(1), EventKind::task_start, 0, 2);
    CHECK(a < b);
    auto seen = drain(k, 4);
    REQUIRE(seen.size() == 2);
    CHECK(seen[0].task_id == 1);
    CHECK(seen[1].task_id == 2);
}

TEST_CASE("scheduling in the past is rejected") {
    Kernel k;
    k.schedule(5, EntityRef::scheduler(), EventKind::aggregate);
    drain(k, 5);
    CHECK(k.now() == 5);
    CHECK_THROWS_AS(k.schedule(4, EntityRef::scheduler(), EventKind::aggregate), std::logic_error);
    CHECK_NOTHROW(k.schedule(5, EntityRef::scheduler(), EventKind::aggregate));
}

TEST_CASE("run_until on an empty queue leaves the clock alone") {
    Kernel k;
    CHECK(k.now() == 0);
    CHECK(k.run_until(100, [](const Event&) {}) == 0);
    CHECK(k.now() == 0);
}

TEST_CASE("horizon is inclusive") {
    Kernel k;
    for (SimTime t : {3, 5, 9}) k.schedule(t, EntityRef::scheduler(), EventKind::aggregate);
    auto seen = drain(k, 5);
    CHECK(seen.size() == 2);
    CHECK(k.now() == 5);
    CHECK(k.pending() == 1);
    drain(k, 100);
    CHECK(k.now() == 9);
}

TEST_CASE("now after dispatching t=7") {
    Kernel k;
    k.schedule(7, EntityRef::client(3), EventKind::deliver);
    drain(k, 50);
    CHECK(k.now() == 7);
}

TEST_CASE("re-entering run_until throws") {
    Kernel k;
    k.schedule(1, EntityRef::scheduler(), EventKind::aggregate);
    CHECK_THROWS_AS(k.run_until(10, [&](const Event&) { k.run_until(10, [](const Event&) {}); }), std::logic_error);
}

TEST_CASE("trace line format") {
    Event e{12, 3, EntityRef::gridlet(4), EventKind::task_finish, 1, 2};
    CHECK(format_trace_line(e) == "tick=12 seq=3 target=4 kind=task_finish");
    e.target = EntityRef::scheduler();
    e.kind = EventKind::aggregate;
    CHECK(format_trace_line(e) == "tick=12 seq=3 target=scheduler kind=aggregate");
}

namespace {

// Random cascade: each handled event spawns 0..2 follow-ups at now + [0, 5].
std::vector<std::string> random_cascade(std::uint64_t seed, std::vector<Event>* order, std::uint64_t* scheduled_le,
                                        SimTime horizon) {
    Kernel k;
    std::vector<std::string> trace;
    k.set_trace(&trace);
    std::mt19937_64 rng(seed);
    std::uint64_t count = 0;
    auto sched = [&](SimTime t) {
        if (t <= horizon) ++count;
        k.schedule(t, EntityRef::gridlet(rng() % 4), static_cast<EventKind>(rng() % 6));
    };
    for (int i = 0; i < 20; ++i) sched(rng() % 10);
    SimTime last_now = 0;
    k.run_until(horizon, [&](const Event& e) {
        CHECK(k.now() >= last_now);
        last_now = k.now();
        order->push_back(e);
        if (order->size() < 400)
            for (std::uint64_t j = rng() % 3; j > 0; --j) sched(k.now() + rng() % 6);
    });
    *scheduled_le = count;
    return trace;
}

}  // namespace

TEST_CASE("property: total order, monotone clock, no event loss, replay") {
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
        std::vector<Event> order;
        std::uint64_t scheduled = 0;
        auto trace = random_cascade(seed, &order, &scheduled, 40);
        CHECK(order.size() == scheduled);
        for (std::size_t i = 1; i < order.size(); ++i)
            CHECK(std::tie(order[i - 1].time, order[i - 1].seq) < std::tie(order[i].time, order[i].seq));

        std::vector<Event> again;
        std::uint64_t scheduled2 = 0;
        CHECK(random_cascade(seed, &again, &scheduled2, 40) == trace);
    }
}

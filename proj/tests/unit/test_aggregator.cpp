#include <doctest.h>

#include <algorithm>
#include <numeric>
#include <random>
#include <stdexcept>

#include "gridminer/aggregator.hpp"

using namespace gridminer;
using mining::SupportTable;
using query::Match;
using query::SubQueryResult;

namespace {

PartialResult counts(std::uint64_t task, std::uint64_t c, std::uint64_t total) {
    SupportTable t;
    t.counts[{7}] = c;
    t.total = total;
    return {task, 0, t};
}

PartialResult matches(std::uint64_t task, std::vector<RecordId> ids) {
    SubQueryResult r;
    for (auto id : ids) r.matches.push_back({id, Scalar(static_cast<double>(id))});
    return {task, 0, r};
}

std::vector<std::uint64_t> ids_of(const std::vector<PartialResult>& parts) {
    std::vector<std::uint64_t> out;
    for (const auto& p : parts) out.push_back(p.task_id);
    return out;
}

}  // namespace

TEST_CASE("support counts add up") {
    std::vector<PartialResult> parts{counts(0, 1, 2), counts(1, 2, 3)};
    auto merged = std::get<SupportTable>(aggregate(parts, ids_of(parts)));
    CHECK(merged.counts.at({7}) == 3);
    CHECK(merged.total == 5);
}

TEST_CASE("match lists are deduplicated and sorted") {
    std::vector<PartialResult> parts{matches(0, {2, 1}), matches(1, {1, 3})};
    auto merged = std::get<SubQueryResult>(aggregate(parts, ids_of(parts)));
    std::vector<RecordId> ids;
    for (const auto& m : merged.matches) ids.push_back(m.record_id);
    CHECK(ids == std::vector<RecordId>{1, 2, 3});
}

TEST_CASE("conflicting values for one record keep the smallest") {
    SubQueryResult a, b;
    a.matches.push_back({4, Scalar(std::string("z"))});
    b.matches.push_back({4, Scalar(2.0)});
    std::vector<PartialResult> parts{{0, 0, a}, {1, 0, b}};
    auto merged = std::get<SubQueryResult>(aggregate(parts, ids_of(parts)));
    REQUIRE(merged.matches.size() == 1);
    CHECK(std::get<double>(*merged.matches[0].value) == 2.0);
}

TEST_CASE("coverage must be exact") {
    std::vector<PartialResult> parts{counts(0, 1, 1), counts(1, 1, 1)};
    std::vector<std::uint64_t> three{0, 1, 2}, one{0};
    CHECK_THROWS_AS(aggregate(parts, three), CoverageError);
    CHECK_THROWS_AS(aggregate(parts, one), CoverageError);
    std::vector<PartialResult> dup{counts(0, 1, 1), counts(0, 1, 1)};
    std::vector<std::uint64_t> both{0};
    CHECK_THROWS_AS(aggregate(dup, both), CoverageError);

    std::vector<PartialResult> mixed{counts(0, 1, 1), matches(1, {1})};
    CHECK_THROWS_AS(aggregate(mixed, ids_of(mixed)), std::invalid_argument);
}

TEST_CASE("property: aggregate ignores order and grouping") {
    std::mt19937_64 rng(13);
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<PartialResult> tables, lists;
        std::size_t n = 1 + rng() % 8;
        for (std::uint64_t t = 0; t < n; ++t) {
            SupportTable st;
            for (int k = 0; k < 5; ++k) st.counts[{static_cast<Item>(rng() % 4)}] += rng() % 5;
            st.total = 10;
            tables.push_back({t, 0, st});
            std::vector<RecordId> ids(rng() % 6);
            for (auto& id : ids) id = rng() % 12;
            lists.push_back(matches(t, ids));
        }
        auto base_t = std::get<SupportTable>(aggregate(tables, ids_of(tables)));
        auto base_l = std::get<SubQueryResult>(aggregate(lists, ids_of(lists)));

        std::shuffle(tables.begin(), tables.end(), rng);
        std::shuffle(lists.begin(), lists.end(), rng);
        CHECK(std::get<SupportTable>(aggregate(tables, ids_of(tables))) == base_t);
        CHECK(std::get<SubQueryResult>(aggregate(lists, ids_of(lists))).matches == base_l.matches);

        // grouping: fold a prefix first, then merge the rest
        std::size_t cut = rng() % (n + 1);
        std::vector<PartialResult> head(tables.begin(), tables.begin() + static_cast<std::ptrdiff_t>(cut));
        std::vector<PartialResult> tail(tables.begin() + static_cast<std::ptrdiff_t>(cut), tables.end());
        SupportTable grouped;
        if (!head.empty()) grouped.merge(std::get<SupportTable>(aggregate(head, ids_of(head))));
        if (!tail.empty()) grouped.merge(std::get<SupportTable>(aggregate(tail, ids_of(tail))));
        CHECK(grouped == base_t);
    }
}

TEST_CASE("multicast versus sequential delivery") {
    std::vector<ClientSpec> three{{1, 1}, {2, 2}, {3, 2}};
    auto m = multicast(three, 10);
    auto s = multicast(three, 10, DeliveryMode::sequential);
    CHECK(completion_time(m) == 12);
    CHECK(completion_time(s) == 15);

    std::vector<ClientSpec> one{{1, 4}};
    CHECK(multicast(one, 0) == multicast(one, 0, DeliveryMode::sequential));

    for (std::size_t k = 1; k <= 8; ++k) {
        std::vector<ClientSpec> same(k, ClientSpec{0, 3});
        CHECK(completion_time(multicast(same, 5)) == 8);
    }
    CHECK_THROWS_AS(multicast({}, 0), std::invalid_argument);
}

TEST_CASE("property: multicast is max, sequential is sum") {
    std::mt19937_64 rng(1);
    for (int trial = 0; trial < 200; ++trial) {
        std::vector<ClientSpec> cs(1 + rng() % 16);
        for (std::size_t i = 0; i < cs.size(); ++i) cs[i] = {i, rng() % 10};
        SimTime at = rng() % 100;
        std::uint64_t mx = 0, sum = 0;
        for (const auto& c : cs) {
            mx = std::max(mx, c.latency);
            sum += c.latency;
        }
        CHECK(completion_time(multicast(cs, at)) == at + mx);
        CHECK(completion_time(multicast(cs, at, DeliveryMode::sequential)) == at + sum);
    }
}

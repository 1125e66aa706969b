#include "gridminer/mining.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <random>
#include <set>

#include "gridminer/errors.hpp"
#include "gridminer/random.hpp"
#include "parallel.hpp"

namespace gridminer::mining {

bool is_subsequence(std::span<const Item> pattern, std::span<const Item> seq) {
    std::size_t i = 0;
    for (std::size_t j = 0; j < seq.size() && i < pattern.size(); ++j)
        if (seq[j] == pattern[i]) ++i;
    return i == pattern.size();
}

void SupportTable::merge(const SupportTable& other) {
    for (const auto& [items, count] : other.counts) counts[items] += count;
    total += other.total;
}

namespace {

const Sequence& sequence_of(const Record& record, const DataPartition& part) {
    const auto* seq = std::get_if<Sequence>(&record.body);
    if (!seq) throw TaskError("partition " + std::to_string(part.id) + " does not hold sequences");
    return *seq;
}

}  // namespace

SupportTable local_support(std::span<const Sequence> candidates, const DataPartition& part) {
    SupportTable table;
    table.total = part.records.size();
    for (const auto& c : candidates) table.counts[c] = 0;
    for (const auto& record : part.records) {
        const auto& seq = sequence_of(record, part);
        for (auto& [c, n] : table.counts)
            if (is_subsequence(c, seq)) ++n;
    }
    return table;
}

SupportTable local_item_support(const DataPartition& part) {
    SupportTable table;
    table.total = part.records.size();
    for (const auto& record : part.records) {
        std::set<Item> distinct;
        for (Item item : sequence_of(record, part)) distinct.insert(item);
        for (Item item : distinct) ++table.counts[Sequence{item}];
    }
    return table;
}

std::vector<Sequence> gsp_step(std::span<const Sequence> frequent_k, std::size_t k) {
    std::set<Sequence> known(frequent_k.begin(), frequent_k.end());
    std::set<Sequence> out;
    for (const auto& a : frequent_k) {
        for (const auto& b : frequent_k) {
            if (a.size() != k || b.size() != k) continue;
            if (!std::equal(a.begin() + 1, a.end(), b.begin())) continue;
            Sequence cand = a;
            cand.push_back(b.back());

            bool survives = true;
            for (std::size_t drop = 0; drop < cand.size() && survives; ++drop) {
                Sequence sub;
                sub.reserve(k);
                for (std::size_t i = 0; i < cand.size(); ++i)
                    if (i != drop) sub.push_back(cand[i]);
                survives = known.count(sub) > 0;
            }
            if (survives) out.insert(std::move(cand));
        }
    }
    return {out.begin(), out.end()};
}

LevelwiseMiner LevelwiseMiner::exact(Rational minsup) {
    check_minsup(minsup);
    return LevelwiseMiner(minsup, std::nullopt);
}

LevelwiseMiner LevelwiseMiner::estimated(Rational minsup, double epsilon) {
    check_minsup(minsup);
    return LevelwiseMiner(minsup, epsilon);
}

bool LevelwiseMiner::keep(std::uint64_t count, std::uint64_t total) const {
    // a pattern absent from the sample is never kept, even when minsup - eps <= 0
    if (total == 0 || count == 0) return false;
    if (epsilon_)
        return static_cast<double>(count) / static_cast<double>(total) >= minsup_.to_double() - *epsilon_;
    return Rational(static_cast<std::int64_t>(count), static_cast<std::int64_t>(total)) >= minsup_;
}

SupportTable LevelwiseMiner::count(const DataPartition& part) const {
    return round_ == 0 ? local_item_support(part) : local_support(candidates_, part);
}

std::uint64_t LevelwiseMiner::cost(const DataPartition& part, std::uint64_t c_count) const {
    std::uint64_t per_record = round_ == 0 ? 1 : candidates_.size();
    return std::max<std::uint64_t>(1, c_count * per_record * part.records.size());
}

void LevelwiseMiner::advance(const SupportTable& global) {
    if (done_) throw std::logic_error("LevelwiseMiner::advance after completion");
    std::vector<Sequence> frequent;
    for (const auto& [items, count] : global.counts) {
        if (!keep(count, global.total)) continue;
        frequent.push_back(items);
        Pattern p{items,
                  Rational(static_cast<std::int64_t>(count), static_cast<std::int64_t>(global.total)),
                  epsilon_ ? SupportMode::estimated : SupportMode::exact, epsilon_};
        found_.push_back(std::move(p));
    }
    std::size_t k = round_ + 1;  // length of the patterns just counted
    ++round_;
    candidates_ = frequent.empty() ? std::vector<Sequence>{} : gsp_step(frequent, k);
    done_ = candidates_.empty();
}

std::vector<Pattern> LevelwiseMiner::patterns() const { return found_; }

void check_minsup(const Rational& minsup) {
    if (minsup <= Rational(0) || minsup > Rational(1))
        throw ValidationError("minsup must be in (0, 1], got " + minsup.str());
}

namespace {

std::vector<Pattern> run_levelwise(LevelwiseMiner miner, std::span<const DataPartition> partitions, unsigned workers) {
    while (!miner.done()) {
        auto locals = detail::parallel_map(partitions.size(), workers,
                                           [&](std::size_t i) { return miner.count(partitions[i]); });
        SupportTable global;
        for (const auto& t : locals) global.merge(t);
        miner.advance(global);
    }
    return miner.patterns();
}

std::uint64_t total_records(std::span<const DataPartition> partitions) {
    std::uint64_t n = 0;
    for (const auto& p : partitions) n += p.records.size();
    return n;
}

}  // namespace

std::vector<Pattern> mine_frequent(std::span<const DataPartition> partitions, Rational minsup, unsigned workers) {
    auto miner = LevelwiseMiner::exact(minsup);
    if (total_records(partitions) == 0) throw ValidationError("no sequences to mine");
    return run_levelwise(std::move(miner), partitions, workers);
}

double hoeffding_epsilon(std::uint64_t m, double delta) {
    return std::sqrt(std::log(2.0 / delta) / (2.0 * static_cast<double>(m)));
}

std::vector<DataPartition> sample_partitions(std::span<const DataPartition> partitions, const Rational& sample_rate,
                                             std::uint64_t seed) {
    if (sample_rate <= Rational(0) || sample_rate > Rational(1))
        throw ValidationError("sample rate must be in (0, 1], got " + sample_rate.str());
    std::vector<DataPartition> out;
    out.reserve(partitions.size());
    for (const auto& part : partitions) {
        auto n = static_cast<std::int64_t>(part.records.size());
        // ceil(q * n) in exact arithmetic
        auto take = static_cast<std::size_t>((sample_rate.num() * n + sample_rate.den() - 1) / sample_rate.den());

        std::vector<std::size_t> idx(part.records.size());
        std::iota(idx.begin(), idx.end(), 0);
        std::mt19937_64 gen(mix_seed(seed, part.id));
        for (std::size_t i = 0; i < take; ++i) {
            auto j = i + uniform_below(gen, idx.size() - i);
            std::swap(idx[i], idx[j]);
        }
        idx.resize(take);
        std::sort(idx.begin(), idx.end());

        DataPartition sample{part.id, part.host_gridlet, part.schema_id, {}};
        sample.records.reserve(take);
        for (auto i : idx) sample.records.push_back(part.records[i]);
        out.push_back(std::move(sample));
    }
    return out;
}

std::vector<Pattern> mine_frequent_prob(std::span<const DataPartition> partitions, Rational minsup,
                                        const SamplingParams& params, unsigned workers) {
    check_minsup(minsup);
    if (!(params.delta > 0.0 && params.delta < 1.0))
        throw ValidationError("delta must be in (0, 1), got " + std::to_string(params.delta));
    auto samples = sample_partitions(partitions, params.sample_rate, params.seed);
    auto m = total_records(samples);
    if (m == 0) throw ValidationError("sample size is 0 on every partition");
    auto miner = LevelwiseMiner::estimated(minsup, hoeffding_epsilon(m, params.delta));
    return run_levelwise(std::move(miner), samples, workers);
}

std::string format_patterns(std::span<const Pattern> patterns) {
    std::string out;
    for (const auto& p : patterns) {
        for (std::size_t i = 0; i < p.items.size(); ++i) {
            if (i) out += ' ';
            out += std::to_string(p.items[i]);
        }
        out += '\t';
        out += p.support.str();
        if (p.epsilon) {
            char buf[48];
            std::snprintf(buf, sizeof buf, "\teps=%.6f", *p.epsilon);
            out += buf;
        }
        out += '\n';
    }
    return out;
}

}  // namespace gridminer::mining

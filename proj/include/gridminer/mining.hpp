#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "gridminer/rational.hpp"
#include "gridminer/topology.hpp"

namespace gridminer::mining {

/// True iff every item of `pattern` occurs in `seq` in order (gaps allowed).
bool is_subsequence(std::span<const Item> pattern, std::span<const Item> seq);

/// Candidate -> number of sequences containing it, over `total` sequences.
struct SupportTable {
    std::map<Sequence, std::uint64_t> counts;
    std::uint64_t total = 0;

    /// Adds counts and totals; commutative and associative.
    void merge(const SupportTable& other);

    friend bool operator==(const SupportTable&, const SupportTable&) = default;
};

/// Counts each candidate over the partition's sequences. Throws TaskError
/// when the partition holds anything other than sequences.
SupportTable local_support(std::span<const Sequence> candidates, const DataPartition& part);

/// Per-item sequence counts (each item counted once per sequence).
SupportTable local_item_support(const DataPartition& part);

/// Level k -> k+1 candidates: join every ordered pair (a, b) with
/// a[1..] == b[..k-1] into a + b.back(), then drop candidates that have a
/// delete-one subsequence outside frequent_k. Sorted, deduplicated.
std::vector<Sequence> gsp_step(std::span<const Sequence> frequent_k, std::size_t k);

enum class SupportMode { exact, estimated };

struct Pattern {
    Sequence items;
    Rational support;
    SupportMode mode = SupportMode::exact;
    std::optional<double> epsilon;  // estimated mode only

    friend bool operator==(const Pattern&, const Pattern&) = default;
};

/// Level-wise count-distribution miner, driven one round at a time so the
/// same code runs standalone and as simulated gridlet tasks. Round 0 counts
/// single items; round k counts the length-(k+1) candidates.
class LevelwiseMiner {
public:
    /// Keeps patterns with count/total >= minsup exactly.
    static LevelwiseMiner exact(Rational minsup);
    /// Keeps patterns with count/total >= minsup - epsilon.
    static LevelwiseMiner estimated(Rational minsup, double epsilon);

    bool done() const { return done_; }
    std::size_t round() const { return round_; }
    const std::vector<Sequence>& candidates() const { return candidates_; }

    /// This round's local work on one partition.
    SupportTable count(const DataPartition& part) const;
    /// Work units of count(part): c_count per sequence in round 0, per
    /// (candidate x sequence) after. At least 1.
    std::uint64_t cost(const DataPartition& part, std::uint64_t c_count) const;

    /// Consumes the globally merged table of this round.
    void advance(const SupportTable& global);

    /// Every frequent pattern so far, sorted by (length, items).
    std::vector<Pattern> patterns() const;

private:
    LevelwiseMiner(Rational minsup, std::optional<double> epsilon) : minsup_(minsup), epsilon_(epsilon) {}
    bool keep(std::uint64_t count, std::uint64_t total) const;

    Rational minsup_;
    std::optional<double> epsilon_;
    std::size_t round_ = 0;
    bool done_ = false;
    std::vector<Sequence> candidates_;
    std::vector<Pattern> found_;
};

/// Throws ValidationError unless 0 < minsup <= 1.
void check_minsup(const Rational& minsup);

/// Exact frequent sequences over the union of the partitions. `workers`
/// parallelizes the per-partition counting without changing the output.
std::vector<Pattern> mine_frequent(std::span<const DataPartition> partitions, Rational minsup, unsigned workers = 1);

/// sqrt(ln(2 / delta) / (2 m))
double hoeffding_epsilon(std::uint64_t m, double delta);

struct SamplingParams {
    Rational sample_rate{1, 2};  // q in (0, 1]
    double delta = 0.05;         // in (0, 1)
    std::uint64_t seed = 0;
};

/// Each partition keeps ceil(q * n_p) of its records, drawn without
/// replacement from a generator seeded with mix_seed(seed, partition id).
/// Sampled records keep their original order.
std::vector<DataPartition> sample_partitions(std::span<const DataPartition> partitions, const Rational& sample_rate,
                                             std::uint64_t seed);

/// Sample-based estimate: runs the level-wise loop over sample_partitions()
/// with the threshold relaxed to minsup - epsilon, epsilon from the total
/// sample size. Patterns carry mode=estimated and that epsilon.
std::vector<Pattern> mine_frequent_prob(std::span<const DataPartition> partitions, Rational minsup,
                                        const SamplingParams& params, unsigned workers = 1);

/// One line per pattern: `items... <TAB> support [<TAB> eps=...]`.
std::string format_patterns(std::span<const Pattern> patterns);

}  // namespace gridminer::mining

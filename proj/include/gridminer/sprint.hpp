#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "gridminer/rational.hpp"
#include "gridminer/topology.hpp"

namespace gridminer::mining {

/// 1 - sum (c_i / n)^2. Throws ValidationError when every count is zero.
Rational gini(std::span<const std::uint64_t> class_counts);

/// Numeric tests send `value <= threshold` left; categorical tests send
/// values in the set left.
struct SplitTest {
    std::size_t attribute = 0;
    std::variant<double, std::vector<std::string>> test;

    friend bool operator==(const SplitTest&, const SplitTest&) = default;
};

struct SplitChoice {
    SplitTest test;
    Rational weighted_gini;
};

/// Value -> per-class counts for one attribute at one node: SPRINT's
/// attribute list collapsed to its sorted distinct values.
struct AttributeHistogram {
    std::map<double, std::vector<std::uint64_t>> numeric;
    std::map<std::string, std::vector<std::uint64_t>> categorical;

    void merge(const AttributeHistogram& other);
};

/// Best test for one attribute from its histogram. Numeric candidates are the
/// midpoints between consecutive distinct values; categorical candidates are
/// every non-empty proper value subset when there are at most 5 distinct
/// values, else each single value. Ties go to the smaller threshold / the
/// lexicographically smaller value set. nullopt when the attribute is
/// constant at this node.
std::optional<SplitChoice> best_split(const AttributeHistogram& histogram, std::size_t attribute,
                                      AttributeKind kind, std::size_t class_count);

/// Convenience over raw records; `classes` is the sorted label list.
std::optional<SplitChoice> best_split(std::span<const Record> records, const TupleSchema& schema,
                                      std::size_t attribute, std::span<const std::string> classes);

struct TreeParams {
    std::size_t max_depth = 4;
    std::size_t min_records = 2;
};

struct Tree {
    struct Node {
        std::size_t depth = 0;
        std::vector<std::uint64_t> class_counts;
        std::string label;  // majority class; ties to the smallest label
        std::optional<SplitTest> split;
        std::size_t left = 0;
        std::size_t right = 0;

        bool is_leaf() const { return !split.has_value(); }
        std::uint64_t size() const;
    };

    std::vector<std::string> classes;  // sorted
    std::vector<Node> nodes;           // nodes[0] is the root

    /// Indented preorder text, one node per line.
    std::string render(const TupleSchema& schema) const;
    std::size_t depth() const;
};

/// Per-(open node, attribute) histograms one partition reports in a round.
struct SplitStatistics {
    std::map<std::size_t, std::vector<AttributeHistogram>> nodes;

    void merge(const SplitStatistics& other);
};

/// Level-wise distributed builder. Each round, every partition summarizes
/// its records routed to the open nodes; the merged summary picks each node's
/// best (attribute, test) and routes records one level down.
class TreeBuilder {
public:
    TreeBuilder(std::vector<DataPartition> partitions, TupleSchema schema, TreeParams params);

    bool done() const { return open_.empty(); }
    std::size_t partition_count() const { return partitions_.size(); }
    const DataPartition& partition(std::size_t i) const { return partitions_[i]; }

    SplitStatistics statistics(std::size_t partition_index) const;
    /// c_split per (routed record x attribute), at least 1.
    std::uint64_t cost(std::size_t partition_index, std::uint64_t c_split) const;

    void advance(const SplitStatistics& merged);

    const Tree& tree() const { return tree_; }
    const TupleSchema& schema() const { return schema_; }

private:
    std::size_t class_index(const Record& record) const;
    std::size_t add_node(std::size_t depth, std::vector<std::uint64_t> counts);

    std::vector<DataPartition> partitions_;
    TupleSchema schema_;
    TreeParams params_;
    Tree tree_;
    std::vector<std::vector<std::size_t>> routing_;  // partition -> record -> node
    std::vector<std::size_t> open_;
};

/// Throws ValidationError on an empty dataset, TaskError on non-tuple records.
Tree build_tree(std::span<const DataPartition> partitions, const TupleSchema& schema, const TreeParams& params,
                unsigned workers = 1);

}  // namespace gridminer::mining

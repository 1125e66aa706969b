#include "gridminer/sprint.hpp"

#include <algorithm>
#include <functional>
#include <numeric>
#include <set>

#include "gridminer/errors.hpp"
#include "parallel.hpp"

namespace gridminer::mining {

namespace {

using Counts = std::vector<std::uint64_t>;

std::uint64_t sum(const Counts& c) { return std::accumulate(c.begin(), c.end(), std::uint64_t{0}); }

void add_into(Counts& into, const Counts& from) {
    if (into.size() < from.size()) into.resize(from.size(), 0);
    for (std::size_t i = 0; i < from.size(); ++i) into[i] += from[i];
}

std::int64_t sum_of_squares(const Counts& c) {
    std::int64_t s = 0;
    for (auto v : c) s += static_cast<std::int64_t>(v * v);
    return s;
}

// (nL/n) gini(L) + (nR/n) gini(R), folded into two exact fractions.
Rational weighted_gini(const Counts& left, const Counts& right) {
    auto nl = static_cast<std::int64_t>(sum(left));
    auto nr = static_cast<std::int64_t>(sum(right));
    auto n = nl + nr;
    return Rational(nl * nl - sum_of_squares(left), n * nl) + Rational(nr * nr - sum_of_squares(right), n * nr);
}

Counts minus(const Counts& total, const Counts& part) {
    Counts out(total.size(), 0);
    for (std::size_t i = 0; i < total.size(); ++i) out[i] = total[i] - (i < part.size() ? part[i] : 0);
    return out;
}

bool goes_left(const SplitTest& split, const Scalar& value) {
    if (const auto* threshold = std::get_if<double>(&split.test)) return std::get<double>(value) <= *threshold;
    const auto& set = std::get<std::vector<std::string>>(split.test);
    return std::binary_search(set.begin(), set.end(), std::get<std::string>(value));
}

std::string join(const std::vector<std::string>& values) {
    std::string out;
    for (std::size_t i = 0; i < values.size(); ++i) out += (i ? "," : "") + values[i];
    return out;
}

}  // namespace

Rational gini(std::span<const std::uint64_t> class_counts) {
    std::int64_t n = 0, squares = 0;
    for (auto c : class_counts) {
        n += static_cast<std::int64_t>(c);
        squares += static_cast<std::int64_t>(c * c);
    }
    if (n == 0) throw ValidationError("gini of an empty class distribution");
    return Rational(1) - Rational(squares, n * n);
}

void AttributeHistogram::merge(const AttributeHistogram& other) {
    for (const auto& [value, counts] : other.numeric) add_into(numeric[value], counts);
    for (const auto& [value, counts] : other.categorical) add_into(categorical[value], counts);
}

std::optional<SplitChoice> best_split(const AttributeHistogram& histogram, std::size_t attribute,
                                      AttributeKind kind, std::size_t class_count) {
    std::optional<SplitChoice> best;
    auto consider = [&](SplitTest test, const Counts& left, const Counts& total) {
        auto score = weighted_gini(left, minus(total, left));
        if (!best || score < best->weighted_gini) best = SplitChoice{std::move(test), score};
    };

    if (kind == AttributeKind::numeric) {
        const auto& h = histogram.numeric;
        if (h.size() < 2) return std::nullopt;
        Counts total(class_count, 0);
        for (const auto& [value, counts] : h) add_into(total, counts);
        Counts left(class_count, 0);
        for (auto it = h.begin(); std::next(it) != h.end(); ++it) {
            add_into(left, it->second);
            double threshold = (it->first + std::next(it)->first) / 2.0;
            consider(SplitTest{attribute, threshold}, left, total);
        }
        return best;
    }

    const auto& h = histogram.categorical;
    if (h.size() < 2) return std::nullopt;
    std::vector<std::string> values;
    Counts total(class_count, 0);
    for (const auto& [value, counts] : h) {
        values.push_back(value);
        add_into(total, counts);
    }

    std::vector<std::vector<std::string>> candidates;
    if (values.size() <= 5) {
        for (std::uint32_t mask = 1; mask + 1 < (1u << values.size()); ++mask) {
            std::vector<std::string> set;
            for (std::size_t i = 0; i < values.size(); ++i)
                if (mask & (1u << i)) set.push_back(values[i]);
            candidates.push_back(std::move(set));
        }
        std::sort(candidates.begin(), candidates.end());
    } else {
        for (const auto& v : values) candidates.push_back({v});
    }
    for (auto& set : candidates) {
        Counts left(class_count, 0);
        for (const auto& v : set) add_into(left, h.at(v));
        consider(SplitTest{attribute, std::move(set)}, left, total);
    }
    return best;
}

std::optional<SplitChoice> best_split(std::span<const Record> records, const TupleSchema& schema,
                                      std::size_t attribute, std::span<const std::string> classes) {
    AttributeHistogram h;
    for (const auto& record : records) {
        const auto& tuple = std::get<AttributeTuple>(record.body);
        auto cls = static_cast<std::size_t>(std::lower_bound(classes.begin(), classes.end(), tuple.label) -
                                            classes.begin());
        const auto& value = tuple.values.at(attribute);
        Counts* slot = schema.kinds[attribute] == AttributeKind::numeric ? &h.numeric[std::get<double>(value)]
                                                                         : &h.categorical[std::get<std::string>(value)];
        slot->resize(classes.size(), 0);
        ++(*slot)[cls];
    }
    return best_split(h, attribute, schema.kinds[attribute], classes.size());
}

std::uint64_t Tree::Node::size() const { return sum(class_counts); }

std::size_t Tree::depth() const {
    std::size_t d = 0;
    for (const auto& n : nodes) d = std::max(d, n.depth);
    return d;
}

std::string Tree::render(const TupleSchema& schema) const {
    std::string out;
    std::function<void(std::size_t)> walk = [&](std::size_t id) {
        const Node& node = nodes[id];
        out.append(2 * node.depth, ' ');
        if (node.is_leaf()) {
            out += "leaf " + node.label;
        } else {
            const auto& name = schema.attributes.at(node.split->attribute);
            if (const auto* t = std::get_if<double>(&node.split->test))
                out += name + " <= " + format_scalar(*t);
            else
                out += name + " in {" + join(std::get<std::vector<std::string>>(node.split->test)) + "}";
        }
        out += " (n=" + std::to_string(node.size()) + ")\n";
        if (!node.is_leaf()) {
            walk(node.left);
            walk(node.right);
        }
    };
    if (!nodes.empty()) walk(0);
    return out;
}

void SplitStatistics::merge(const SplitStatistics& other) {
    for (const auto& [node, hists] : other.nodes) {
        auto& mine = nodes[node];
        if (mine.size() < hists.size()) mine.resize(hists.size());
        for (std::size_t a = 0; a < hists.size(); ++a) mine[a].merge(hists[a]);
    }
}

TreeBuilder::TreeBuilder(std::vector<DataPartition> partitions, TupleSchema schema, TreeParams params)
    : partitions_(std::move(partitions)), schema_(std::move(schema)), params_(params) {
    std::set<std::string> labels;
    std::size_t total = 0;
    for (const auto& part : partitions_) {
        for (const auto& record : part.records) {
            const auto* tuple = std::get_if<AttributeTuple>(&record.body);
            if (!tuple) throw TaskError("partition " + std::to_string(part.id) + " does not hold attribute tuples");
            if (tuple->values.size() != schema_.attributes.size())
                throw ValidationError("record " + std::to_string(record.id) + " has the wrong number of attributes");
            labels.insert(tuple->label);
            ++total;
        }
    }
    if (total == 0) throw ValidationError("empty dataset");
    tree_.classes.assign(labels.begin(), labels.end());

    Counts root(tree_.classes.size(), 0);
    routing_.resize(partitions_.size());
    for (std::size_t p = 0; p < partitions_.size(); ++p) {
        routing_[p].assign(partitions_[p].records.size(), 0);
        for (const auto& record : partitions_[p].records) ++root[class_index(record)];
    }
    add_node(0, std::move(root));
}

std::size_t TreeBuilder::class_index(const Record& record) const {
    const auto& label = std::get<AttributeTuple>(record.body).label;
    return static_cast<std::size_t>(std::lower_bound(tree_.classes.begin(), tree_.classes.end(), label) -
                                    tree_.classes.begin());
}

std::size_t TreeBuilder::add_node(std::size_t depth, Counts counts) {
    Tree::Node node;
    node.depth = depth;
    auto majority = std::max_element(counts.begin(), counts.end());  // first max = smallest label
    node.label = tree_.classes[static_cast<std::size_t>(majority - counts.begin())];
    node.class_counts = std::move(counts);

    auto nonzero = std::count_if(node.class_counts.begin(), node.class_counts.end(), [](auto c) { return c > 0; });
    bool leaf = nonzero <= 1 || depth >= params_.max_depth || node.size() < params_.min_records;

    tree_.nodes.push_back(std::move(node));
    std::size_t id = tree_.nodes.size() - 1;
    if (!leaf) open_.push_back(id);
    return id;
}

SplitStatistics TreeBuilder::statistics(std::size_t partition_index) const {
    SplitStatistics stats;
    const auto& part = partitions_[partition_index];
    const auto& routes = routing_[partition_index];
    std::size_t classes = tree_.classes.size();
    for (std::size_t r = 0; r < part.records.size(); ++r) {
        std::size_t node = routes[r];
        if (!std::binary_search(open_.begin(), open_.end(), node)) continue;
        auto& hists = stats.nodes[node];
        hists.resize(schema_.attributes.size());
        const auto& tuple = std::get<AttributeTuple>(part.records[r].body);
        std::size_t cls = class_index(part.records[r]);
        for (std::size_t a = 0; a < hists.size(); ++a) {
            Counts& slot = schema_.kinds[a] == AttributeKind::numeric
                               ? hists[a].numeric[std::get<double>(tuple.values[a])]
                               : hists[a].categorical[std::get<std::string>(tuple.values[a])];
            slot.resize(classes, 0);
            ++slot[cls];
        }
    }
    return stats;
}

std::uint64_t TreeBuilder::cost(std::size_t partition_index, std::uint64_t c_split) const {
    std::uint64_t routed = 0;
    for (auto node : routing_[partition_index])
        if (std::binary_search(open_.begin(), open_.end(), node)) ++routed;
    auto attrs = std::max<std::uint64_t>(1, schema_.attributes.size());
    return std::max<std::uint64_t>(1, c_split * routed * attrs);
}

void TreeBuilder::advance(const SplitStatistics& merged) {
    std::vector<std::size_t> current = std::move(open_);
    open_.clear();
    std::size_t classes = tree_.classes.size();

    for (std::size_t id : current) {
        auto it = merged.nodes.find(id);
        if (it == merged.nodes.end()) continue;  // no attributes at all: stays a leaf
        const auto& hists = it->second;

        std::optional<SplitChoice> best;
        for (std::size_t a = 0; a < hists.size(); ++a) {
            auto choice = best_split(hists[a], a, schema_.kinds[a], classes);
            if (choice && (!best || choice->weighted_gini < best->weighted_gini)) best = std::move(choice);
        }
        if (!best) continue;

        Counts left(classes, 0);
        const auto& h = hists[best->test.attribute];
        if (const auto* t = std::get_if<double>(&best->test.test)) {
            for (const auto& [value, counts] : h.numeric)
                if (value <= *t) add_into(left, counts);
        } else {
            for (const auto& value : std::get<std::vector<std::string>>(best->test.test)) add_into(left, h.categorical.at(value));
        }
        Counts right = minus(tree_.nodes[id].class_counts, left);
        std::size_t depth = tree_.nodes[id].depth + 1;
        std::size_t l = add_node(depth, std::move(left));
        std::size_t r = add_node(depth, std::move(right));
        tree_.nodes[id].split = best->test;
        tree_.nodes[id].left = l;
        tree_.nodes[id].right = r;

        for (std::size_t p = 0; p < partitions_.size(); ++p) {
            for (std::size_t k = 0; k < routing_[p].size(); ++k) {
                if (routing_[p][k] != id) continue;
                const auto& tuple = std::get<AttributeTuple>(partitions_[p].records[k].body);
                routing_[p][k] = goes_left(best->test, tuple.values[best->test.attribute]) ? l : r;
            }
        }
    }
    std::sort(open_.begin(), open_.end());
}

Tree build_tree(std::span<const DataPartition> partitions, const TupleSchema& schema, const TreeParams& params,
                unsigned workers) {
    TreeBuilder builder({partitions.begin(), partitions.end()}, schema, params);
    while (!builder.done()) {
        auto locals = detail::parallel_map(builder.partition_count(), workers,
                                           [&](std::size_t i) { return builder.statistics(i); });
        SplitStatistics merged;
        for (const auto& s : locals) merged.merge(s);
        builder.advance(merged);
    }
    return builder.tree();
}

}  // namespace gridminer::mining

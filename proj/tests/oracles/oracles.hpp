#pragma once

// Brute-force reference implementations for tests. None of these call into
// the code paths they are used to check.

#include <algorithm>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "gridminer/query.hpp"
#include "gridminer/rational.hpp"
#include "gridminer/topology.hpp"

namespace oracle {

using gridminer::Rational;
using gridminer::Sequence;

// ---------------------------------------------------------------------------
// Frequent subsequences by enumerating every subsequence of every record.

struct FrequentPattern {
    Sequence items;
    Rational support;
    bool operator==(const FrequentPattern&) const = default;
};

inline std::vector<FrequentPattern> frequent_subsequences(const std::vector<Sequence>& db, const Rational& minsup) {
    std::map<Sequence, std::uint64_t> counts;
    for (const auto& s : db) {
        std::set<Sequence> distinct;
        std::uint32_t n = static_cast<std::uint32_t>(s.size());
        for (std::uint32_t mask = 1; mask < (1u << n); ++mask) {
            Sequence sub;
            for (std::uint32_t i = 0; i < n; ++i)
                if (mask & (1u << i)) sub.push_back(s[i]);
            distinct.insert(std::move(sub));
        }
        for (const auto& sub : distinct) ++counts[sub];
    }
    std::vector<FrequentPattern> out;
    for (const auto& [items, c] : counts) {
        Rational support(static_cast<std::int64_t>(c), static_cast<std::int64_t>(db.size()));
        if (support >= minsup) out.push_back({items, support});
    }
    std::stable_sort(out.begin(), out.end(),
                     [](const auto& a, const auto& b) { return a.items.size() < b.items.size(); });
    return out;
}

/// Exact support of one pattern by direct scan.
inline Rational exact_support(const std::vector<Sequence>& db, const Sequence& pattern) {
    std::uint64_t c = 0;
    for (const auto& s : db) {
        // subsequence test via DP over positions
        std::vector<std::vector<bool>> ok(pattern.size() + 1, std::vector<bool>(s.size() + 1, false));
        for (std::size_t j = 0; j <= s.size(); ++j) ok[0][j] = true;
        for (std::size_t i = 1; i <= pattern.size(); ++i)
            for (std::size_t j = 1; j <= s.size(); ++j)
                ok[i][j] = ok[i][j - 1] || (ok[i - 1][j - 1] && pattern[i - 1] == s[j - 1]);
        if (ok[pattern.size()][s.size()]) ++c;
    }
    return Rational(static_cast<std::int64_t>(c), static_cast<std::int64_t>(db.size()));
}

// ---------------------------------------------------------------------------
// Reformulation closure by explicit path-graph search: materialize every
// (schema, path) node over the label alphabet up to max_steps, add an edge
// for every applicable mapping pair, and take the reachable set.

using State = std::pair<std::string, std::vector<std::string>>;

inline std::set<State> reformulation_closure(const State& start, const std::vector<gridminer::query::SchemaMapping>& mappings,
                                             const std::vector<std::string>& schemas,
                                             const std::vector<std::string>& alphabet, std::size_t max_steps) {
    std::vector<std::vector<std::string>> paths{{}};
    std::vector<std::vector<std::string>> all;
    for (std::size_t len = 1; len <= max_steps; ++len) {
        std::vector<std::vector<std::string>> next;
        for (const auto& p : paths)
            for (const auto& l : alphabet) {
                auto q = p;
                q.push_back(l);
                next.push_back(q);
            }
        all.insert(all.end(), next.begin(), next.end());
        paths = std::move(next);
    }

    std::map<State, std::vector<State>> edges;
    for (const auto& schema : schemas) {
        for (const auto& path : all) {
            State node{schema, path};
            auto& out = edges[node];
            for (const auto& m : mappings) {
                if (m.from_schema != schema) continue;
                for (const auto& [src, dst] : m.pairs) {
                    bool prefix = src.size() <= path.size();
                    for (std::size_t i = 0; prefix && i < src.size(); ++i) prefix = src[i] == path[i];
                    if (!prefix) continue;
                    std::vector<std::string> rewritten = dst;
                    for (std::size_t i = src.size(); i < path.size(); ++i) rewritten.push_back(path[i]);
                    if (rewritten.size() <= max_steps) out.push_back({m.to_schema, rewritten});
                }
            }
        }
    }

    std::set<State> seen{start};
    std::vector<State> stack{start};
    while (!stack.empty()) {
        State s = stack.back();
        stack.pop_back();
        for (const auto& t : edges[s])
            if (seen.insert(t).second) stack.push_back(t);
    }
    seen.erase(start);
    return seen;
}

// ---------------------------------------------------------------------------
// Path matching by listing every node with its full root path.

inline std::vector<gridminer::query::Match> naive_path_eval(const gridminer::query::PathQuery& q,
                                                            const std::vector<gridminer::Record>& records,
                                                            std::uint64_t* skipped = nullptr) {
    using gridminer::LabeledNode;
    using gridminer::Scalar;
    std::vector<gridminer::query::Match> out;
    for (const auto& rec : records) {
        std::vector<std::pair<std::vector<std::string>, const LabeledNode*>> listing;
        std::function<void(const LabeledNode&, std::vector<std::string>)> walk = [&](const LabeledNode& n,
                                                                                       std::vector<std::string> path) {
            path.push_back(n.label);
            listing.push_back({path, &n});
            for (const auto& c : n.children) walk(c, path);
        };
        for (const auto& root : std::get<gridminer::LabeledTree>(rec.body).roots) walk(root, {});

        std::vector<const LabeledNode*> hits;
        for (const auto& [path, node] : listing)
            if (path == q.steps) hits.push_back(node);
        if (hits.empty()) continue;
        if (!q.predicate) {
            out.push_back({rec.id, hits[0]->value});
            continue;
        }
        const auto& lit = q.predicate->literal;
        bool bad = false;
        for (const auto* h : hits) bad = bad || !h->value || h->value->index() != lit.index();
        if (bad) {
            if (skipped) ++*skipped;
            continue;
        }
        for (const auto* h : hits) {
            const Scalar& v = *h->value;
            bool holds = false;
            switch (q.predicate->op) {
                case gridminer::query::Comparator::eq: holds = v == lit; break;
                case gridminer::query::Comparator::lt: holds = v < lit; break;
                case gridminer::query::Comparator::gt: holds = v > lit; break;
            }
            if (holds) {
                out.push_back({rec.id, v});
                break;
            }
        }
    }
    std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.record_id < b.record_id; });
    return out;
}

// ---------------------------------------------------------------------------
// Decision tree by exhaustive split search, rendered in the same text form
// as Tree::render.

struct Row {
    std::vector<gridminer::Scalar> values;
    std::string label;
};

inline Rational gini_of(const std::map<std::string, std::int64_t>& counts) {
    std::int64_t n = 0;
    for (const auto& [k, c] : counts) n += c;
    Rational g(1);
    for (const auto& [k, c] : counts) g = g - Rational(c, n) * Rational(c, n);
    return g;
}

inline std::string exhaustive_tree(const std::vector<Row>& rows, const gridminer::TupleSchema& schema,
                                   std::size_t max_depth, std::size_t min_records, std::size_t depth = 0) {
    std::map<std::string, std::int64_t> counts;
    for (const auto& r : rows) ++counts[r.label];
    std::string label;
    std::int64_t top = -1;
    for (const auto& [k, c] : counts)
        if (c > top) {
            top = c;
            label = k;
        }
    auto n = static_cast<std::int64_t>(rows.size());
    std::string indent(2 * depth, ' ');
    std::string leaf = indent + "leaf " + label + " (n=" + std::to_string(n) + ")\n";
    if (counts.size() <= 1 || depth >= max_depth || rows.size() < min_records) return leaf;

    struct Best {
        Rational w;
        std::size_t attr;
        std::optional<double> threshold;
        std::vector<std::string> set;
    };
    std::optional<Best> best;
    auto score = [&](const std::function<bool(const Row&)>& left) {
        std::map<std::string, std::int64_t> l, r;
        std::int64_t nl = 0, nr = 0;
        for (const auto& row : rows) {
            if (left(row)) {
                ++l[row.label];
                ++nl;
            } else {
                ++r[row.label];
                ++nr;
            }
        }
        return Rational(nl, n) * gini_of(l) + Rational(nr, n) * gini_of(r);
    };

    for (std::size_t a = 0; a < schema.attributes.size(); ++a) {
        if (schema.kinds[a] == gridminer::AttributeKind::numeric) {
            std::set<double> vals;
            for (const auto& r : rows) vals.insert(std::get<double>(r.values[a]));
            std::vector<double> v(vals.begin(), vals.end());
            for (std::size_t i = 0; i + 1 < v.size(); ++i) {
                double t = (v[i] + v[i + 1]) / 2.0;
                auto w = score([&](const Row& r) { return std::get<double>(r.values[a]) <= t; });
                if (!best || w < best->w) best = Best{w, a, t, {}};
            }
        } else {
            std::set<std::string> vals;
            for (const auto& r : rows) vals.insert(std::get<std::string>(r.values[a]));
            std::vector<std::string> v(vals.begin(), vals.end());
            if (v.size() < 2) continue;
            std::vector<std::vector<std::string>> sets;
            if (v.size() <= 5) {
                for (std::uint32_t mask = 1; mask + 1 < (1u << v.size()); ++mask) {
                    std::vector<std::string> s;
                    for (std::size_t i = 0; i < v.size(); ++i)
                        if (mask & (1u << i)) s.push_back(v[i]);
                    sets.push_back(s);
                }
                std::sort(sets.begin(), sets.end());
            } else {
                for (const auto& x : v) sets.push_back({x});
            }
            for (const auto& s : sets) {
                auto w = score([&](const Row& r) {
                    return std::find(s.begin(), s.end(), std::get<std::string>(r.values[a])) != s.end();
                });
                if (!best || w < best->w) best = Best{w, a, std::nullopt, s};
            }
        }
    }
    if (!best) return leaf;

    std::vector<Row> left, right;
    for (const auto& r : rows) {
        bool goes_left = best->threshold
                             ? std::get<double>(r.values[best->attr]) <= *best->threshold
                             : std::find(best->set.begin(), best->set.end(), std::get<std::string>(r.values[best->attr])) !=
                                   best->set.end();
        (goes_left ? left : right).push_back(r);
    }
    std::string head = indent + schema.attributes[best->attr];
    if (best->threshold) {
        head += " <= " + gridminer::format_scalar(*best->threshold);
    } else {
        head += " in {";
        for (std::size_t i = 0; i < best->set.size(); ++i) head += (i ? "," : "") + best->set[i];
        head += "}";
    }
    head += " (n=" + std::to_string(n) + ")\n";
    return head + exhaustive_tree(left, schema, max_depth, min_records, depth + 1) +
           exhaustive_tree(right, schema, max_depth, min_records, depth + 1);
}

// ---------------------------------------------------------------------------
// Generators

inline std::vector<Sequence> random_sequences(std::mt19937_64& rng, std::size_t max_records, std::size_t max_len,
                                              std::uint32_t alphabet) {
    std::size_t n = 1 + rng() % max_records;
    std::vector<Sequence> db(n);
    for (auto& s : db) {
        std::size_t len = 1 + rng() % max_len;
        for (std::size_t i = 0; i < len; ++i) s.push_back(static_cast<gridminer::Item>(rng() % alphabet));
    }
    return db;
}

inline std::vector<gridminer::Record> as_records(const std::vector<Sequence>& db) {
    std::vector<gridminer::Record> out;
    for (std::size_t i = 0; i < db.size(); ++i) out.push_back({i, db[i]});
    return out;
}

}  // namespace oracle

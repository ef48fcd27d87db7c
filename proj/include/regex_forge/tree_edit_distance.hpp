#ifndef REGEX_FORGE_TREE_EDIT_DISTANCE_HPP
#define REGEX_FORGE_TREE_EDIT_DISTANCE_HPP

#include <algorithm>
#include <cstddef>
#include <string>
#include <vector>

#include "regex_forge/ast.hpp"
#include "regex_forge/charclass.hpp"

namespace regex_forge {

/// Ordered labeled tree used by the edit distance. Nodes are stored in
/// post-order; children of node i precede it.
struct LabeledTree {
    std::vector<std::string> labels;
    std::vector<std::size_t> leftmost;  // leftmost leaf descendant, post-order index
    std::vector<int> parent;            // -1 for the root

    std::size_t size() const { return labels.size(); }
};

/// Canonical label of an AST node: kind plus the payload an engineer can
/// see. Classes use their normalized member ranges, quantifiers keep their
/// bounds and laziness.
inline std::string node_label(const Node& node) {
    std::string out(node_kind_name(node.kind));
    auto put = [&](long long v) {
        out += ':';
        out += std::to_string(v);
    };
    switch (node.kind) {
        case NodeKind::Literal:
        case NodeKind::AnchorStart:
        case NodeKind::AnchorEnd: put(static_cast<long long>(node.codepoint)); break;
        case NodeKind::Shorthand:
            put(static_cast<int>(node.shorthand));
            put(node.negated);
            break;
        case NodeKind::CharClass:
            put(node.negated);
            for (const CodeRange& r : item_ranges(node.items)) {
                put(static_cast<long long>(r.lo));
                put(static_cast<long long>(r.hi));
            }
            break;
        case NodeKind::Quantifier:
            put(node.min);
            put(node.max);
            put(node.lazy);
            break;
        case NodeKind::NamedGroup: out += ':' + node.name; break;
        case NodeKind::Backreference:
            put(node.group);
            if (!node.name.empty()) out += ':' + node.name;
            break;
        case NodeKind::InlineFlags: put(node.case_insensitive); break;
        default: break;
    }
    return out;
}

namespace detail {

inline std::size_t flatten(const Node& node, int parent, LabeledTree& tree) {
    const std::size_t first = tree.size();
    std::vector<std::size_t> kids;
    for (const Node& child : node.children) kids.push_back(flatten(child, -1, tree));
    const std::size_t self = tree.size();
    tree.labels.push_back(node_label(node));
    tree.leftmost.push_back(node.children.empty() ? self : tree.leftmost[first]);
    tree.parent.push_back(parent);
    for (std::size_t k : kids) tree.parent[k] = static_cast<int>(self);
    return self;
}

}  // namespace detail

inline LabeledTree labeled_tree(const Node& root) {
    LabeledTree tree;
    detail::flatten(root, -1, tree);
    return tree;
}

/// Zhang-Shasha ordered tree edit distance with unit insert, delete and
/// relabel costs.
inline std::size_t tree_edit_distance(const LabeledTree& a, const LabeledTree& b) {
    const std::size_t n = a.size(), m = b.size();
    if (n == 0 || m == 0) return n + m;

    auto keyroots = [](const LabeledTree& t) {
        std::vector<std::size_t> roots;
        std::vector<bool> seen(t.size(), false);
        for (std::size_t i = t.size(); i-- > 0;) {
            if (!seen[t.leftmost[i]]) {
                seen[t.leftmost[i]] = true;
                roots.push_back(i);
            }
        }
        std::reverse(roots.begin(), roots.end());
        return roots;
    };

    std::vector<std::size_t> tree_dist(n * m, 0);
    std::vector<std::size_t> forest((n + 1) * (m + 1), 0);
    const std::size_t stride = m + 1;

    for (std::size_t i : keyroots(a)) {
        for (std::size_t j : keyroots(b)) {
            const std::size_t li = a.leftmost[i], lj = b.leftmost[j];
            // forest(x, y) indexes prefixes a[li..li+x-1], b[lj..lj+y-1].
            const std::size_t rows = i - li + 2, cols = j - lj + 2;
            auto fd = [&](std::size_t x, std::size_t y) -> std::size_t& { return forest[x * stride + y]; };
            fd(0, 0) = 0;
            for (std::size_t x = 1; x < rows; ++x) fd(x, 0) = fd(x - 1, 0) + 1;
            for (std::size_t y = 1; y < cols; ++y) fd(0, y) = fd(0, y - 1) + 1;
            for (std::size_t x = 1; x < rows; ++x) {
                const std::size_t ai = li + x - 1;
                for (std::size_t y = 1; y < cols; ++y) {
                    const std::size_t bj = lj + y - 1;
                    const std::size_t del = fd(x - 1, y) + 1;
                    const std::size_t ins = fd(x, y - 1) + 1;
                    if (a.leftmost[ai] == li && b.leftmost[bj] == lj) {
                        const std::size_t rel = fd(x - 1, y - 1) + (a.labels[ai] == b.labels[bj] ? 0 : 1);
                        fd(x, y) = std::min({del, ins, rel});
                        tree_dist[ai * m + bj] = fd(x, y);
                    } else {
                        const std::size_t px = a.leftmost[ai] - li, py = b.leftmost[bj] - lj;
                        fd(x, y) = std::min({del, ins, fd(px, py) + tree_dist[ai * m + bj]});
                    }
                }
            }
        }
    }
    return tree_dist[(n - 1) * m + (m - 1)];
}

inline std::size_t syntactic_distance(const RegexAst& a, const RegexAst& b) {
    return tree_edit_distance(labeled_tree(a.root), labeled_tree(b.root));
}

}  // namespace regex_forge

#endif  // REGEX_FORGE_TREE_EDIT_DISTANCE_HPP

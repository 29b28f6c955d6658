#pragma once

#include <functional>
#include <map>

#include "common.hpp"

namespace ftconn {

/// What a deterministic query knows about one failed tree edge, decoded from its label.
struct FailedTreeEdge {
    std::uint32_t parent = 0; // DFS(u)
    std::uint32_t child = 0;  // DFS(v)
    std::uint32_t down = 0;   // T* position of (u,v)
    std::uint32_t up = 0;     // T* position of (v,u)
    std::uint32_t level = 1;
    std::vector<std::uint32_t> tree; // tree[l - level] = id of the level-l tree containing the edge
    std::uint32_t tree_at(std::uint32_t l) const { return tree[l - level]; }
};

struct TreeCut {
    std::uint32_t pos;
    std::uint32_t fault; // index into the fault list
    bool down;
};

/// P_l[T] for one tree meeting F: intervals of Euler(T) minus the failed copies, joined by a union-find.
class TreePartition {
public:
    TreePartition(std::uint32_t id, std::vector<TreeCut> cuts, const std::vector<FailedTreeEdge>* faults)
        : id_(id), cuts_(std::move(cuts)), faults_(faults), parts_(cuts_.size() + 1), big_(cuts_.size() + 1, 0)
    {
        pos_.reserve(cuts_.size());
        for (const TreeCut& c : cuts_) pos_.push_back(c.pos);
    }

    std::uint32_t id() const { return id_; }
    std::size_t intervals() const { return cuts_.size() + 1; }
    const std::vector<TreeCut>& cuts() const { return cuts_; }

    /// Interval containing T* position p; only meaningful for vertices of this tree.
    std::size_t locate(std::uint32_t p) const
    {
        return std::size_t(std::upper_bound(pos_.begin(), pos_.end(), p) - pos_.begin());
    }

    /// Vertex the tour enters / leaves through at a cut.
    std::uint32_t head(const TreeCut& c) const
    {
        const FailedTreeEdge& e = (*faults_)[c.fault];
        return c.down ? e.child : e.parent;
    }
    std::uint32_t tail(const TreeCut& c) const
    {
        const FailedTreeEdge& e = (*faults_)[c.fault];
        return c.down ? e.parent : e.child;
    }

    /// A vertex of T in the same component of T - F as interval i.
    std::uint32_t anchor(std::size_t i) const { return i == 0 ? id_ : head(cuts_[i - 1]); }

    /// Cut bounding interval i on the left / right, if any.
    const TreeCut* left_cut(std::size_t i) const { return i == 0 ? nullptr : &cuts_[i - 1]; }
    const TreeCut* right_cut(std::size_t i) const { return i == cuts_.size() ? nullptr : &cuts_[i]; }

    std::size_t find(std::size_t i) const { return parts_.find(i); }
    bool unite(std::size_t i, std::size_t j) { return parts_.unite(i, j); }
    bool unite_vertices(std::uint32_t x, std::uint32_t y) { return parts_.unite(locate(x), locate(y)); }

    std::size_t part_count() const
    {
        std::size_t c = 0;
        for (std::size_t i = 0; i < intervals(); ++i) c += find(i) == i;
        return c;
    }

    /// Intervals the scheme proved to lie in a component of large volume (R4 bookkeeping).
    std::vector<char>& big() { return big_; }
    const std::vector<char>& big() const { return big_; }

private:
    std::uint32_t id_;
    std::vector<TreeCut> cuts_;
    std::vector<std::uint32_t> pos_;
    const std::vector<FailedTreeEdge>* faults_;
    mutable DisjointSets parts_;
    std::vector<char> big_;
};

/// Level-by-level partition refinement shared by the deterministic schemes: builds J(T,F) and applies
/// R1 and R2; the scheme applies its own R3/R4 between begin_level calls.
class PartitionState {
public:
    PartitionState(std::vector<FailedTreeEdge> faults, std::uint32_t h) : faults_(std::move(faults)), h_(h)
    {
        std::vector<std::uint32_t> downs;
        for (const auto& e : faults_) {
            if (e.level < 1 || e.level > h_ || e.tree.size() != h_ - e.level + 1)
                throw Error(ErrorKind::corrupt, "tree edge label has inconsistent levels");
            downs.push_back(e.down);
        }
        std::sort(downs.begin(), downs.end());
        if (std::adjacent_find(downs.begin(), downs.end()) != downs.end())
            throw Error(ErrorKind::invalid, "duplicate failed edge");
    }

    std::uint32_t h() const { return h_; }
    std::uint32_t level() const { return level_; }
    const std::vector<FailedTreeEdge>& faults() const { return faults_; }
    std::vector<TreePartition>& trees() { return trees_; }
    const std::vector<TreePartition>& trees() const { return trees_; }

    TreePartition* tree(std::uint32_t id)
    {
        auto it = index_.find(id);
        return it == index_.end() ? nullptr : &trees_[it->second];
    }

    /// Starts level l: P_l[T] <- J(T,F), then R1 and R2.
    void begin_level(std::uint32_t l)
    {
        // R2 record: every union of the previous level, as anchor vertex pairs
        std::vector<std::pair<std::uint32_t, std::pair<std::uint32_t, std::uint32_t>>> replay;
        for (TreePartition& t : trees_) {
            const FailedTreeEdge& any = faults_[t.cuts().front().fault];
            std::uint32_t next_id = any.tree_at(l);
            for (std::size_t i = 0; i < t.intervals(); ++i) {
                std::size_t r = t.find(i);
                if (r != i) replay.push_back({next_id, {t.anchor(i), t.anchor(r)}});
            }
        }

        level_ = l;
        std::map<std::uint32_t, std::vector<TreeCut>> groups;
        for (std::uint32_t k = 0; k < faults_.size(); ++k) {
            const FailedTreeEdge& e = faults_[k];
            if (e.level > l) continue;
            auto& cuts = groups[e.tree_at(l)];
            cuts.push_back({e.down, k, true});
            cuts.push_back({e.up, k, false});
        }
        trees_.clear();
        index_.clear();
        for (auto& [id, cuts] : groups) {
            std::sort(cuts.begin(), cuts.end(), [](const TreeCut& a, const TreeCut& b) { return a.pos < b.pos; });
            index_[id] = trees_.size();
            trees_.emplace_back(id, std::move(cuts), &faults_);
        }

        // R1: each interval walks from the head of its left cut to the tail of its right cut
        for (TreePartition& t : trees_) {
            for (std::size_t i = 0; i < t.intervals(); ++i) {
                if (const TreeCut* c = t.left_cut(i)) t.unite(i, t.locate(t.head(*c)));
                if (const TreeCut* c = t.right_cut(i)) t.unite(i, t.locate(t.tail(*c)));
            }
        }
        for (const auto& [id, pair] : replay) {
            TreePartition* t = tree(id);
            if (!t) throw Error(ErrorKind::corrupt, "tree ids are not nested across levels");
            t->unite_vertices(pair.first, pair.second);
        }
    }

    /// R4 on one tree: unites every interval marked big.
    static void unite_big(TreePartition& t)
    {
        std::size_t first = SIZE_MAX;
        for (std::size_t i = 0; i < t.intervals(); ++i) {
            if (!t.big()[i]) continue;
            if (first == SIZE_MAX) first = i;
            else t.unite(first, i);
        }
    }

private:
    std::vector<FailedTreeEdge> faults_;
    std::uint32_t h_;
    std::uint32_t level_ = 0;
    std::vector<TreePartition> trees_;
    std::map<std::uint32_t, std::size_t> index_;
};

/// Final answers over P_h; `roots` are the T* root positions (one per component of G, ascending).
class ComponentAnswer {
public:
    ComponentAnswer(PartitionState& state, const std::vector<std::uint32_t>& roots) : state_(&state), roots_(&roots) {}

    std::uint32_t root_of(std::uint32_t dfs) const
    {
        auto it = std::upper_bound(roots_->begin(), roots_->end(), dfs);
        if (it == roots_->begin()) throw Error(ErrorKind::corrupt, "vertex label precedes every root");
        return *(it - 1);
    }

    bool connected(std::uint32_t s, std::uint32_t t) const
    {
        std::uint32_t rs = root_of(s), rt = root_of(t);
        if (rs != rt) return false;
        TreePartition* tree = state_->tree(rs);
        if (!tree) return true;
        return tree->find(tree->locate(s)) == tree->find(tree->locate(t));
    }

    std::size_t count() const
    {
        std::size_t c = roots_->size();
        for (const TreePartition& t : state_->trees()) c += t.part_count() - 1;
        return c;
    }

private:
    PartitionState* state_;
    const std::vector<std::uint32_t>* roots_;
};

/// Called after each level with the finished partition; used by tests to compare against oracles.
using LevelObserver = std::function<void(std::uint32_t level, const PartitionState&)>;

} // namespace ftconn

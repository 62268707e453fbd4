/*
 Copyright 2026 The d2oc Authors

 Licensed under the Apache License, Version 2.0 (the "License");
 you may not use this file except in compliance with the License.
 You may obtain a copy of the License at

      https://www.apache.org/licenses/LICENSE-2.0

 Unless required by applicable law or agreed to in writing, software
 distributed under the License is distributed on an "AS IS" BASIS,
 WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 See the License for the specific language governing permissions and
 limitations under the License.
*/
#include "d2oc/network_simplex.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace d2oc {

namespace {

// Bipartite network: sources [0, m), sinks [m, m + n), artificial root m + n.
// Real arc e = i * n + j runs i -> m + j. Artificial arc (m n + u) joins node
// u with the root: u -> root for sources, root -> u for sinks.
class BipartiteSimplex {
public:
    BipartiteSimplex(const Vector& supply, const Vector& demand, const Matrix& cost)
        : m_(static_cast<int>(supply.size())),
          n_(static_cast<int>(demand.size())),
          root_(m_ + n_),
          node_count_(m_ + n_ + 1),
          real_arcs_(static_cast<long>(m_) * n_) {
        cost_.resize(real_arcs_ + m_ + n_);
        double max_cost = 0.0;
        for (int i = 0; i < m_; ++i) {
            for (int j = 0; j < n_; ++j) {
                const double c = cost(i, j);
                cost_[static_cast<long>(i) * n_ + j] = c;
                max_cost = std::max(max_cost, std::abs(c));
            }
        }
        const double art_cost = (max_cost + 1.0) * node_count_;
        flow_.assign(cost_.size(), 0.0);
        in_tree_.assign(cost_.size(), 0);
        for (int u = 0; u < m_ + n_; ++u) {
            const long e = real_arcs_ + u;
            cost_[e] = u < m_ ? 0.0 : art_cost;
            flow_[e] = u < m_ ? supply(u) : demand(u - m_);
            in_tree_[e] = 1;
        }
        parent_.assign(node_count_, -1);
        pred_.assign(node_count_, -1);
        up_.assign(node_count_, 0);
        depth_.assign(node_count_, 0);
        pi_.assign(node_count_, 0.0);
        adjacency_.resize(node_count_);
        for (int u = 0; u < m_ + n_; ++u) link(real_arcs_ + u);
        stack_.reserve(node_count_);
        block_size_ = std::max<long>(10, static_cast<long>(std::sqrt(static_cast<double>(real_arcs_))));
        hang(root_, -1, -1);
    }

    TransportationResult run() {
        TransportationResult result;
        const long pivot_cap = 50 * (real_arcs_ + node_count_) + 1000;
        long in_arc = -1;
        while ((in_arc = find_entering_arc()) >= 0) {
            pivot(in_arc);
            if (++result.pivots > pivot_cap) {
                throw std::runtime_error("network simplex exceeded its pivot budget");
            }
        }

        double artificial = 0.0;
        for (int u = 0; u < m_ + n_; ++u) artificial = std::max(artificial, flow_[real_arcs_ + u]);
        if (artificial > 1e-9) {
            throw std::runtime_error("transportation problem is unbalanced or infeasible");
        }
        for (long e = 0; e < real_arcs_; ++e) {
            if (flow_[e] > 0.0) {
                const int i = static_cast<int>(e / n_);
                const int j = static_cast<int>(e % n_);
                result.flows.push_back({i, j, flow_[e]});
                result.cost += flow_[e] * cost_[e];
            }
        }
        return result;
    }

private:
    int source(long e) const {
        if (e < real_arcs_) return static_cast<int>(e / n_);
        const int u = static_cast<int>(e - real_arcs_);
        return u < m_ ? u : root_;
    }
    int target(long e) const {
        if (e < real_arcs_) return m_ + static_cast<int>(e % n_);
        const int u = static_cast<int>(e - real_arcs_);
        return u < m_ ? root_ : u;
    }

    int other(long e, int u) const {
        const int s = source(e);
        return s == u ? target(e) : s;
    }

    // Walks the tree from `start`, hung below `parent` through arc `via`, and
    // resets parent/pred/depth/potentials for every node reached.
    void hang(int start, int parent, long via) {
        stack_.clear();
        set_parent(start, parent, via);
        stack_.push_back(start);
        while (!stack_.empty()) {
            const int v = stack_.back();
            stack_.pop_back();
            for (long e : adjacency_[v]) {
                const int w = other(e, v);
                if (w == parent_[v]) continue;
                set_parent(w, v, e);
                stack_.push_back(w);
            }
        }
    }

    // Tree arcs have zero reduced cost: cost + pi[s] - pi[t] = 0.
    void set_parent(int v, int p, long e) {
        parent_[v] = p;
        pred_[v] = e;
        if (p < 0) {
            depth_[v] = 0;
            pi_[v] = 0.0;
            return;
        }
        depth_[v] = depth_[p] + 1;
        if (source(e) == v) {
            up_[v] = 1;
            pi_[v] = pi_[p] - cost_[e];
        } else {
            up_[v] = 0;
            pi_[v] = pi_[p] + cost_[e];
        }
    }

    void link(long e) {
        adjacency_[source(e)].push_back(e);
        adjacency_[target(e)].push_back(e);
    }

    void unlink(long e) {
        for (int u : {source(e), target(e)}) {
            auto& list = adjacency_[u];
            *std::find(list.begin(), list.end(), e) = list.back();
            list.pop_back();
        }
    }

    double reduced_cost(long e) const {
        return cost_[e] + pi_[source(e)] - pi_[target(e)];
    }

    bool improving(long e, double rc) const {
        const double scale = std::abs(cost_[e]) + std::abs(pi_[source(e)]) + std::abs(pi_[target(e)]);
        return rc < -1e-12 * scale;
    }

    // Block search pricing over real arcs.
    long find_entering_arc() {
        double best = 0.0;
        long best_arc = -1;
        long count = block_size_;
        for (long scanned = 0; scanned < real_arcs_; ++scanned) {
            const long e = next_arc_;
            next_arc_ = next_arc_ + 1 == real_arcs_ ? 0 : next_arc_ + 1;
            if (!in_tree_[e]) {
                const double rc = reduced_cost(e);
                if (rc < best && improving(e, rc)) {
                    best = rc;
                    best_arc = e;
                }
            }
            if (--count == 0) {
                if (best_arc >= 0) return best_arc;
                count = block_size_;
            }
        }
        return best_arc;
    }

    void pivot(long in_arc) {
        const int first = source(in_arc);
        const int second = target(in_arc);

        int u = first;
        int v = second;
        while (u != v) {
            if (depth_[u] > depth_[v]) {
                u = parent_[u];
            } else if (depth_[v] > depth_[u]) {
                v = parent_[v];
            } else {
                u = parent_[u];
                v = parent_[v];
            }
        }
        const int join = u;

        // Flow is pushed first -> second over the entering arc, then back
        // second -> join -> first through the tree. Ties on the first side
        // keep the deepest blocking arc; the second side overrides with <=,
        // which keeps the tree strongly feasible.
        double delta = std::numeric_limits<double>::infinity();
        int u_out = -1;
        bool out_on_first = true;
        for (int w = first; w != join; w = parent_[w]) {
            if (up_[w]) {
                const double d = flow_[pred_[w]];
                if (d < delta) {
                    delta = d;
                    u_out = w;
                }
            }
        }
        for (int w = second; w != join; w = parent_[w]) {
            if (!up_[w]) {
                const double d = flow_[pred_[w]];
                if (d <= delta) {
                    delta = d;
                    u_out = w;
                    out_on_first = false;
                }
            }
        }
        if (u_out < 0) throw std::runtime_error("transportation problem is unbounded");

        if (delta > 0.0) {
            flow_[in_arc] += delta;
            for (int w = first; w != join; w = parent_[w]) {
                flow_[pred_[w]] += up_[w] ? -delta : delta;
            }
            for (int w = second; w != join; w = parent_[w]) {
                flow_[pred_[w]] += up_[w] ? delta : -delta;
            }
        }

        const long out_arc = pred_[u_out];
        flow_[out_arc] = 0.0;
        in_tree_[out_arc] = 0;
        in_tree_[in_arc] = 1;
        unlink(out_arc);
        link(in_arc);
        // The subtree below u_out now hangs from the entering arc.
        if (out_on_first) {
            hang(first, second, in_arc);
        } else {
            hang(second, first, in_arc);
        }
    }

    int m_, n_, root_, node_count_;
    long real_arcs_;
    std::vector<double> cost_;
    std::vector<double> flow_;
    std::vector<char> in_tree_;
    std::vector<int> parent_;
    std::vector<long> pred_;
    std::vector<char> up_;
    std::vector<int> depth_;
    std::vector<double> pi_;
    std::vector<std::vector<long>> adjacency_;
    std::vector<int> stack_;
    long block_size_ = 10;
    long next_arc_ = 0;
};

}  // namespace

TransportationResult solve_transportation(const Vector& supply, const Vector& demand,
                                          const Matrix& cost) {
    if (supply.size() == 0 || demand.size() == 0) {
        throw std::invalid_argument("transportation problem needs nonempty supply and demand");
    }
    if (cost.rows() != supply.size() || cost.cols() != demand.size()) {
        throw DimensionError("cost matrix must be |supply| x |demand|");
    }
    if ((supply.array() <= 0.0).any() || (demand.array() <= 0.0).any()) {
        throw std::invalid_argument("supply and demand entries must be positive");
    }
    const double total_s = supply.sum();
    const double total_d = demand.sum();
    if (std::abs(total_s - total_d) > 1e-9 * std::max(1.0, total_s)) {
        throw std::invalid_argument("supply and demand totals differ");
    }
    BipartiteSimplex simplex(supply, demand, cost);
    return simplex.run();
}

}  // namespace d2oc

#pragma once

// Signal flow graphs with frequency-dependent edge gains.
//
// A graph is assembled once with add_node()/add_edge() and then treated as
// immutable; every solver below is a const, pure function of the graph and
// the evaluation frequency, so one graph may be queried from several threads.
//
// Two independent routes to a transfer function are provided:
//   * mason_gain()        -- path/loop enumeration plus Mason's gain rule
//   * linear_solve_gain() -- dense LU solve of the node-balance equations
// They share nothing beyond edge evaluation and exist to cross-check each other.

#include "pomt/error.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <complex>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace pomt::sfg {

using Complex = std::complex<double>;

/// Gain of an edge as a function of angular frequency (rad/s).
using EdgeGain = std::function<Complex(double omega)>;

enum class NodeKind { source, internal, sink };

struct Node {
    std::string id;
    NodeKind kind = NodeKind::internal;
};

struct Edge {
    std::string from;
    std::string to;
    EdgeGain gain;
    std::string label;
};

/// Node-id sequence. For a loop the closing edge back to front() is implied.
using NodeSequence = std::vector<std::string>;

class SignalFlowGraph {
public:
    SignalFlowGraph& add_node(std::string id, NodeKind kind = NodeKind::internal) {
        if (id.empty()) throw ValidationError("node id must not be empty");
        if (has_node(id)) throw ValidationError("duplicate node id '" + id + "'");
        auto pos = std::lower_bound(nodes_.begin(), nodes_.end(), id,
                                    [](const Node& n, const std::string& key) { return n.id < key; });
        nodes_.insert(pos, Node{std::move(id), kind});
        rebuild();
        return *this;
    }

    SignalFlowGraph& add_edge(const std::string& from, const std::string& to, EdgeGain gain,
                              std::string label = {}) {
        const auto u = index_of(from);
        const auto v = index_of(to);
        if (nodes_[v].kind == NodeKind::source)
            throw ValidationError("source node '" + to + "' cannot have incoming edges");
        if (nodes_[u].kind == NodeKind::sink)
            throw ValidationError("sink node '" + from + "' cannot have outgoing edges");
        if (edge_between(u, v))
            throw ValidationError("duplicate edge '" + from + "' -> '" + to + "'");
        if (!gain) throw ValidationError("edge '" + from + "' -> '" + to + "' has no gain");
        if (label.empty()) label = from + "->" + to;
        edges_.push_back(Edge{from, to, std::move(gain), std::move(label)});
        rebuild();
        return *this;
    }

    bool has_node(std::string_view id) const {
        auto it = std::lower_bound(nodes_.begin(), nodes_.end(), id,
                                   [](const Node& n, std::string_view key) { return n.id < key; });
        return it != nodes_.end() && it->id == id;
    }

    /// Position of a node in id-sorted order; throws naming the id if absent.
    std::size_t index_of(std::string_view id) const {
        auto it = std::lower_bound(nodes_.begin(), nodes_.end(), id,
                                   [](const Node& n, std::string_view key) { return n.id < key; });
        if (it == nodes_.end() || it->id != id)
            throw ValidationError("unknown node id '" + std::string(id) + "'");
        return static_cast<std::size_t>(it - nodes_.begin());
    }

    const std::vector<Node>& nodes() const noexcept { return nodes_; }
    const std::vector<Edge>& edges() const noexcept { return edges_; }
    std::size_t size() const noexcept { return nodes_.size(); }

    /// Successor node indices of u, ascending (equivalently, ascending id).
    const std::vector<std::size_t>& successors(std::size_t u) const { return succ_[u]; }

    std::optional<std::size_t> edge_between(std::size_t u, std::size_t v) const {
        auto it = edge_lookup_.find({u, v});
        if (it == edge_lookup_.end()) return std::nullopt;
        return it->second;
    }

    /// Evaluates the gain of edge u->v. Failures are rethrown naming the edge.
    Complex gain(std::size_t u, std::size_t v, double omega) const {
        const auto e = edge_between(u, v);
        if (!e) return Complex{0.0, 0.0};
        const Edge& edge = edges_[*e];
        try {
            return edge.gain(omega);
        } catch (const Error& err) {
            throw Error(err.code(), "edge '" + edge.from + "' -> '" + edge.to + "': " + err.what());
        } catch (const std::exception& err) {
            throw Error(ErrorCode::validation,
                        "edge '" + edge.from + "' -> '" + edge.to + "': " + err.what());
        }
    }

    /// Plain-text adjacency listing, one `from -> to : label` line per edge.
    std::string dump() const {
        std::ostringstream os;
        for (std::size_t u = 0; u < nodes_.size(); ++u)
            for (auto v : succ_[u])
                os << nodes_[u].id << " -> " << nodes_[v].id << " : "
                   << edges_[*edge_between(u, v)].label << '\n';
        return os.str();
    }

private:
    void rebuild() {
        succ_.assign(nodes_.size(), {});
        edge_lookup_.clear();
        for (std::size_t e = 0; e < edges_.size(); ++e) {
            const auto u = index_of(edges_[e].from);
            const auto v = index_of(edges_[e].to);
            succ_[u].push_back(v);
            edge_lookup_[{u, v}] = e;
        }
        for (auto& s : succ_) std::sort(s.begin(), s.end());
    }

    std::vector<Node> nodes_;
    std::vector<Edge> edges_;
    std::vector<std::vector<std::size_t>> succ_;
    std::map<std::pair<std::size_t, std::size_t>, std::size_t> edge_lookup_;
};

namespace detail {

using Mask = std::uint64_t;

inline void require_mask_capacity(const SignalFlowGraph& g) {
    if (g.size() > 64) throw ValidationError("graphs with more than 64 nodes are not supported");
}

inline Mask mask_of(const std::vector<std::size_t>& seq) {
    Mask m = 0;
    for (auto i : seq) m |= Mask{1} << i;
    return m;
}

inline void paths_dfs(const SignalFlowGraph& g, std::size_t u, std::size_t dst,
                      std::vector<bool>& on_path, std::vector<std::size_t>& stack,
                      std::vector<std::vector<std::size_t>>& out) {
    if (u == dst) {
        out.push_back(stack);
        return;
    }
    for (auto v : g.successors(u)) {
        if (on_path[v]) continue;
        on_path[v] = true;
        stack.push_back(v);
        paths_dfs(g, v, dst, on_path, stack, out);
        stack.pop_back();
        on_path[v] = false;
    }
}

inline std::vector<std::vector<std::size_t>> simple_paths(const SignalFlowGraph& g,
                                                          std::size_t src, std::size_t dst) {
    std::vector<std::vector<std::size_t>> out;
    std::vector<bool> on_path(g.size(), false);
    std::vector<std::size_t> stack{src};
    on_path[src] = true;
    paths_dfs(g, src, dst, on_path, stack, out);
    return out;
}

// Cycles rooted at `start` whose other nodes all have larger index.
inline void loops_dfs(const SignalFlowGraph& g, std::size_t start, std::size_t u,
                      std::vector<bool>& on_path, std::vector<std::size_t>& stack,
                      std::vector<std::vector<std::size_t>>& out) {
    for (auto v : g.successors(u)) {
        if (v == start) {
            out.push_back(stack);
        } else if (v > start && !on_path[v]) {
            on_path[v] = true;
            stack.push_back(v);
            loops_dfs(g, start, v, on_path, stack, out);
            stack.pop_back();
            on_path[v] = false;
        }
    }
}

inline std::vector<std::vector<std::size_t>> simple_loops(const SignalFlowGraph& g) {
    std::vector<std::vector<std::size_t>> out;
    std::vector<bool> on_path(g.size(), false);
    for (std::size_t s = 0; s < g.size(); ++s) {
        std::vector<std::size_t> stack{s};
        on_path[s] = true;
        loops_dfs(g, s, s, on_path, stack, out);
        on_path[s] = false;
    }
    return out;
}

inline Complex sequence_gain(const SignalFlowGraph& g, const std::vector<std::size_t>& seq,
                             bool closed, double omega) {
    Complex prod{1.0, 0.0};
    for (std::size_t k = 0; k + 1 < seq.size(); ++k) prod *= g.gain(seq[k], seq[k + 1], omega);
    if (closed) prod *= g.gain(seq.back(), seq.front(), omega);
    return prod;
}

struct EvaluatedLoop {
    Mask mask;
    Complex gain;
};

// Sum over all sets of mutually non-touching loops (index >= k, disjoint
// from `used`) of (-1)^|set| * product of loop gains, empty set included.
inline Complex nontouching_sum(const std::vector<EvaluatedLoop>& loops, std::size_t k, Mask used) {
    Complex total{1.0, 0.0};
    for (std::size_t j = k; j < loops.size(); ++j) {
        if (loops[j].mask & used) continue;
        total -= loops[j].gain * nontouching_sum(loops, j + 1, used | loops[j].mask);
    }
    return total;
}

inline std::vector<NodeSequence> to_ids(const SignalFlowGraph& g,
                                        const std::vector<std::vector<std::size_t>>& seqs) {
    std::vector<NodeSequence> out;
    out.reserve(seqs.size());
    for (const auto& s : seqs) {
        NodeSequence ids;
        ids.reserve(s.size());
        for (auto i : s) ids.push_back(g.nodes()[i].id);
        out.push_back(std::move(ids));
    }
    return out;
}

struct Determinant {
    Complex value;
    double loop_magnitude_sum;
    std::vector<EvaluatedLoop> loops;
};

inline Determinant determinant(const SignalFlowGraph& g, double omega) {
    require_mask_capacity(g);
    Determinant d{{1.0, 0.0}, 0.0, {}};
    for (const auto& loop : simple_loops(g)) {
        const auto gain = sequence_gain(g, loop, true, omega);
        d.loops.push_back({mask_of(loop), gain});
        d.loop_magnitude_sum += std::abs(gain);
    }
    d.value = nontouching_sum(d.loops, 0, 0);
    return d;
}

inline bool is_singular(const Determinant& d) {
    return !(std::abs(d.value) >= 1e-14 * (1.0 + d.loop_magnitude_sum));
}

} // namespace detail

/// Every simple path src -> dst, in lexicographic order of node-id sequences.
inline std::vector<NodeSequence> enumerate_paths(const SignalFlowGraph& g, std::string_view src,
                                                 std::string_view dst) {
    const auto s = g.index_of(src);
    const auto t = g.index_of(dst);
    return detail::to_ids(g, detail::simple_paths(g, s, t));
}

/// Every simple cycle exactly once, rotated to start at its smallest node id.
inline std::vector<NodeSequence> enumerate_loops(const SignalFlowGraph& g) {
    return detail::to_ids(g, detail::simple_loops(g));
}

/// Mason graph determinant 1 - sum(L) + sum(non-touching pairs) - ...
inline Complex graph_determinant(const SignalFlowGraph& g, double omega) {
    return detail::determinant(g, omega).value;
}

/// Transfer function src -> dst by Mason's gain rule. Zero when dst is unreachable.
inline Complex mason_gain(const SignalFlowGraph& g, std::string_view src, std::string_view dst,
                          double omega) {
    const auto s = g.index_of(src);
    const auto t = g.index_of(dst);
    const auto paths = detail::simple_paths(g, s, t);
    if (paths.empty()) return {0.0, 0.0};

    const auto det = detail::determinant(g, omega);
    if (detail::is_singular(det)) {
        std::ostringstream os;
        os << "graph determinant vanishes at omega = " << omega << " rad/s";
        throw SingularityError(os.str(), omega);
    }
    Complex numerator{0.0, 0.0};
    for (const auto& path : paths) {
        const auto path_gain = detail::sequence_gain(g, path, false, omega);
        numerator += path_gain * detail::nontouching_sum(det.loops, 0, detail::mask_of(path));
    }
    return numerator / det.value;
}

/// Transfer function src -> dst from the node-balance equations
/// x_v = sum_u gain(u->v) x_u + [v == src], solved by full-pivot LU.
inline Complex linear_solve_gain(const SignalFlowGraph& g, std::string_view src,
                                 std::string_view dst, double omega) {
    const auto s = g.index_of(src);
    const auto t = g.index_of(dst);
    const auto n = static_cast<Eigen::Index>(g.size());
    Eigen::MatrixXcd a = Eigen::MatrixXcd::Identity(n, n);
    for (const auto& e : g.edges()) {
        const auto u = g.index_of(e.from);
        const auto v = g.index_of(e.to);
        a(static_cast<Eigen::Index>(v), static_cast<Eigen::Index>(u)) -= g.gain(u, v, omega);
    }
    Eigen::VectorXcd rhs = Eigen::VectorXcd::Zero(n);
    rhs(static_cast<Eigen::Index>(s)) = 1.0;

    Eigen::FullPivLU<Eigen::MatrixXcd> lu(a);
    lu.setThreshold(1e-14);
    if (!lu.isInvertible()) {
        std::ostringstream os;
        os << "node-balance system is singular at omega = " << omega << " rad/s";
        throw SingularityError(os.str(), omega);
    }
    const Eigen::VectorXcd x = lu.solve(rhs);
    return x(static_cast<Eigen::Index>(t));
}

struct SourceGains {
    std::map<std::string, Complex> gains;
    /// Sum of |G|^2 over all sources; a unitarity diagnostic, not asserted.
    double power_sum = 0.0;
};

/// Mason gain from every source node to dst.
inline SourceGains all_source_gains(const SignalFlowGraph& g, std::string_view dst, double omega) {
    g.index_of(dst);
    SourceGains out;
    for (const auto& node : g.nodes()) {
        if (node.kind != NodeKind::source) continue;
        const auto gain = mason_gain(g, node.id, dst, omega);
        out.gains.emplace(node.id, gain);
        out.power_sum += std::norm(gain);
    }
    return out;
}

} // namespace pomt::sfg

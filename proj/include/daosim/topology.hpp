#pragma once

#include <span>
#include <utility>
#include <vector>

namespace daosim {

/// Directed edge, 0-based endpoints.
struct Edge {
    int from = 0;
    int to = 0;

    friend bool operator==(const Edge&, const Edge&) = default;
    friend auto operator<=>(const Edge&, const Edge&) = default;
};

/// Directed weighted agent communication graph. The adjacency entry
/// a(i, j) is the linking intensity from agent i to agent j; entries may
/// be negative, the diagonal must be zero, and the edge set is exactly
/// the nonzero support of the matrix.
///
/// Agents are 0-based here; configs and reports use 1-based ids and the
/// scenario loader converts.
///
/// Immutable after construction, safe to share across concurrent runs.
class Topology {
public:
    /// Builds from a square adjacency matrix. Throws std::invalid_argument
    /// if the matrix is not square or has a nonzero diagonal.
    static Topology fromAdjacency(const std::vector<std::vector<double>>& rows);

    int size() const { return n_; }

    double weight(int i, int j) const { return a_[static_cast<size_t>(i) * n_ + j]; }

    /// Out-neighbors of i as (j, a_ij), ascending j. Throws
    /// std::out_of_range for an invalid index.
    const std::vector<std::pair<int, double>>& neighbors(int i) const;

    /// In-neighbors of i as (j, a_ji), ascending j.
    const std::vector<std::pair<int, double>>& inNeighbors(int i) const;

    /// Coupled control input of agent i: u_i + sum_j a_ji * u_j
    /// (column i of the adjacency weights the other agents' controls).
    double coupledInput(int i, std::span<const double> u) const;

    /// Support of the adjacency matrix, ordered by (from, to).
    const std::vector<Edge>& edges() const { return edges_; }

private:
    Topology() = default;

    int n_ = 0;
    std::vector<double> a_;  // row-major, n_ * n_
    std::vector<std::vector<std::pair<int, double>>> out_;
    std::vector<std::vector<std::pair<int, double>>> in_;
    std::vector<Edge> edges_;
};

/// A subgraph of a Topology: a member subset plus the subset of parent
/// edges retained among members. Produced by the DAO operation; also used
/// to represent the full graph as its own subgraph.
class Subgraph {
public:
    /// The full graph viewed as a subgraph of itself.
    static Subgraph full(const Topology& parent);

    /// Builds from explicit members and retained edges; sorts and indexes
    /// them. Throws std::invalid_argument if members are out of range,
    /// a retained edge is not a parent edge, or an endpoint is not a member.
    static Subgraph of(const Topology& parent, std::vector<int> members,
                       std::vector<Edge> retained);

    const Topology& parent() const { return *parent_; }
    const std::vector<int>& members() const { return members_; }
    const std::vector<Edge>& retainedEdges() const { return retained_; }
    bool isMember(int i) const { return memberFlag_[static_cast<size_t>(i)] != 0; }

    /// Retained out-edges of i as (j, a_ij), ascending j. Empty for
    /// non-members.
    const std::vector<std::pair<int, double>>& outNeighbors(int i) const;

private:
    const Topology* parent_ = nullptr;
    std::vector<int> members_;          // ascending
    std::vector<Edge> retained_;        // ordered by (from, to)
    std::vector<char> memberFlag_;      // size n
    std::vector<std::vector<std::pair<int, double>>> out_;  // size n
};

}  // namespace daosim

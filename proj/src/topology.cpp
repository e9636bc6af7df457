#include "daosim/topology.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace daosim {

namespace {

void checkIndex(int i, int n) {
    if (i < 0 || i >= n) {
        throw std::out_of_range("agent index " + std::to_string(i) +
                                " out of range [0, " + std::to_string(n) + ")");
    }
}

}  // namespace

Topology Topology::fromAdjacency(const std::vector<std::vector<double>>& rows) {
    const int n = static_cast<int>(rows.size());
    if (n == 0) throw std::invalid_argument("adjacency matrix is empty");

    Topology t;
    t.n_ = n;
    t.a_.assign(static_cast<size_t>(n) * n, 0.0);
    for (int i = 0; i < n; ++i) {
        if (static_cast<int>(rows[i].size()) != n) {
            throw std::invalid_argument("adjacency row " + std::to_string(i + 1) +
                                        " has " + std::to_string(rows[i].size()) +
                                        " entries, expected " + std::to_string(n));
        }
        for (int j = 0; j < n; ++j) {
            t.a_[static_cast<size_t>(i) * n + j] = rows[i][j];
        }
        if (rows[i][i] != 0.0) {
            throw std::invalid_argument("adjacency diagonal must be zero (agent " +
                                        std::to_string(i + 1) + ")");
        }
    }

    t.out_.resize(n);
    t.in_.resize(n);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            const double w = t.weight(i, j);
            if (w != 0.0) {
                t.out_[i].emplace_back(j, w);
                t.in_[j].emplace_back(i, w);
                t.edges_.push_back({i, j});
            }
        }
    }
    std::sort(t.edges_.begin(), t.edges_.end());
    return t;
}

const std::vector<std::pair<int, double>>& Topology::neighbors(int i) const {
    checkIndex(i, n_);
    return out_[i];
}

const std::vector<std::pair<int, double>>& Topology::inNeighbors(int i) const {
    checkIndex(i, n_);
    return in_[i];
}

double Topology::coupledInput(int i, std::span<const double> u) const {
    checkIndex(i, n_);
    if (static_cast<int>(u.size()) != n_) {
        throw std::invalid_argument("control vector has " + std::to_string(u.size()) +
                                    " entries, expected " + std::to_string(n_));
    }
    double coupled = u[i];
    for (const auto& [j, w] : in_[i]) coupled += w * u[j];
    return coupled;
}

Subgraph Subgraph::full(const Topology& parent) {
    std::vector<int> members(parent.size());
    for (int i = 0; i < parent.size(); ++i) members[i] = i;
    return of(parent, std::move(members), parent.edges());
}

Subgraph Subgraph::of(const Topology& parent, std::vector<int> members,
                      std::vector<Edge> retained) {
    const int n = parent.size();
    Subgraph s;
    s.parent_ = &parent;
    s.memberFlag_.assign(static_cast<size_t>(n), 0);

    std::sort(members.begin(), members.end());
    members.erase(std::unique(members.begin(), members.end()), members.end());
    for (int m : members) {
        checkIndex(m, n);
        s.memberFlag_[static_cast<size_t>(m)] = 1;
    }
    s.members_ = std::move(members);

    std::sort(retained.begin(), retained.end());
    retained.erase(std::unique(retained.begin(), retained.end()), retained.end());
    s.out_.resize(n);
    for (const Edge& e : retained) {
        checkIndex(e.from, n);
        checkIndex(e.to, n);
        if (parent.weight(e.from, e.to) == 0.0) {
            throw std::invalid_argument("retained edge (" + std::to_string(e.from + 1) +
                                        "," + std::to_string(e.to + 1) +
                                        ") is not an edge of the parent graph");
        }
        if (!s.isMember(e.from) || !s.isMember(e.to)) {
            throw std::invalid_argument("retained edge (" + std::to_string(e.from + 1) +
                                        "," + std::to_string(e.to + 1) +
                                        ") touches a non-member agent");
        }
        s.out_[e.from].emplace_back(e.to, parent.weight(e.from, e.to));
    }
    s.retained_ = std::move(retained);
    return s;
}

const std::vector<std::pair<int, double>>& Subgraph::outNeighbors(int i) const {
    checkIndex(i, static_cast<int>(memberFlag_.size()));
    return out_[i];
}

}  // namespace daosim

#include "daosim/daoop.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "daosim/rng.hpp"

namespace daosim {

void OperationParams::validate() const {
    if (phi < 1) throw std::invalid_argument("operation.phi must be >= 1");
    if (std::isnan(psi) || psi < 0.0) {
        throw std::invalid_argument("operation.psi must be >= 0");
    }
    if (maxOuterIterations < 1) {
        throw std::invalid_argument("operation.max_outer_iterations must be >= 1");
    }
}

namespace {

double edgeWeight(const Topology& topo, std::span<const double> r, int i, int j) {
    return topo.weight(i, j) * std::abs(r[i] - r[j]);
}

std::vector<double> fullRowSums(const Topology& topo, std::span<const double> r) {
    std::vector<double> row(topo.size(), 0.0);
    for (int i = 0; i < topo.size(); ++i) {
        for (const auto& [j, w] : topo.neighbors(i)) {
            row[i] += w * std::abs(r[i] - r[j]);
        }
    }
    return row;
}

}  // namespace

double tolerance(int i, const Topology& full, const Subgraph& sub,
                 std::span<const double> r) {
    double lost = 0.0;
    for (const auto& [j, w] : full.neighbors(i)) lost += w * std::abs(r[i] - r[j]);
    for (const auto& [j, w] : sub.outNeighbors(i)) lost -= w * std::abs(r[i] - r[j]);
    return lost;
}

OperationResult operate(const Topology& full, std::span<const double> r,
                        const OperationParams& params) {
    params.validate();
    const int n = full.size();
    if (static_cast<int>(r.size()) != n) {
        throw std::invalid_argument("ECE vector size does not match topology");
    }

    const std::vector<double> fullRow = fullRowSums(full, r);
    SplitMix64 rng(params.rngSeed);

    OperationResult result;
    for (int outer = 1; outer <= params.maxOuterIterations; ++outer) {
        // Pristine working copy of the full graph.
        std::vector<int> members(n);
        for (int i = 0; i < n; ++i) members[i] = i;
        std::vector<char> retained(static_cast<size_t>(n) * n, 0);
        std::vector<double> retainedRow = fullRow;
        std::vector<int> incident(n, 0);  // retained edges touching i, either direction
        for (const Edge& e : full.edges()) {
            retained[static_cast<size_t>(e.from) * n + e.to] = 1;
            ++incident[e.from];
            ++incident[e.to];
        }
        int removed = 0;
        bool rejected = false;

        while (static_cast<int>(members.size()) > params.phi) {
            const size_t pick = rng.nextBelow(members.size());
            const int i = members[pick];

            if (incident[i] == 0) {
                members.erase(members.begin() + static_cast<long>(pick));
                continue;
            }

            // Minimum-weight retained edge incident to i. Ties: lowest
            // neighbor index, then out-edge before in-edge.
            double bestW = std::numeric_limits<double>::infinity();
            int bestNbr = -1;
            int bestDir = 0;  // 0 = out (i -> nbr), 1 = in (nbr -> i)
            for (const auto& [j, w] : full.neighbors(i)) {
                (void)w;
                if (!retained[static_cast<size_t>(i) * n + j]) continue;
                const double ew = edgeWeight(full, r, i, j);
                if (ew < bestW || (ew == bestW && (j < bestNbr))) {
                    bestW = ew;
                    bestNbr = j;
                    bestDir = 0;
                }
            }
            for (const auto& [j, w] : full.inNeighbors(i)) {
                (void)w;
                if (!retained[static_cast<size_t>(j) * n + i]) continue;
                const double ew = edgeWeight(full, r, j, i);
                if (ew < bestW || (ew == bestW && j < bestNbr)) {
                    bestW = ew;
                    bestNbr = j;
                    bestDir = 1;
                }
            }
            const int p = bestDir == 0 ? i : bestNbr;  // removed edge is (p, q)
            const int q = bestDir == 0 ? bestNbr : i;

            // Only W_p changes (the edge leaves p's retained row); the spec
            // checks both endpoints of the removed edge.
            const double newRowP = retainedRow[p] - edgeWeight(full, r, p, q);
            const double wP = fullRow[p] - newRowP;
            const double wQ = fullRow[q] - retainedRow[q];
            if (wP <= params.psi && wQ <= params.psi) {
                retained[static_cast<size_t>(p) * n + q] = 0;
                retainedRow[p] = newRowP;
                --incident[p];
                --incident[q];
                ++removed;
            } else {
                rejected = true;
                break;
            }
        }

        if (!rejected) {
            std::vector<Edge> edges;
            for (const Edge& e : full.edges()) {
                if (retained[static_cast<size_t>(e.from) * n + e.to]) edges.push_back(e);
            }
            result.found = true;
            result.subgraph = Subgraph::of(full, members, std::move(edges));
            result.removedEdgeCount = removed;
            result.iterationsUsed = outer;
            return result;
        }
        result.iterationsUsed = outer;
    }
    result.found = false;
    return result;
}

ConstraintReport validate(const Topology& full, const Subgraph& sub,
                          std::span<const double> r, const OperationParams& params) {
    ConstraintReport report;
    report.phi = params.phi;
    report.psi = params.psi;
    report.memberCount = static_cast<int>(sub.members().size());
    report.capacityOk = report.memberCount <= params.phi;

    bool allOk = true;
    for (int i = 0; i < full.size(); ++i) {
        ConstraintReport::AgentEntry entry;
        entry.id = i + 1;
        entry.member = sub.isMember(i);
        entry.w = tolerance(i, full, sub, r);
        entry.ok = entry.w <= params.psi;
        if (!entry.ok) {
            allOk = false;
            report.violating.push_back(entry.id);
        }
        report.agents.push_back(entry);
    }
    report.pass = report.capacityOk && allOk;
    return report;
}

BruteForceResult bruteForce(const Topology& full, std::span<const double> r,
                            int phi, double psi) {
    const int n = full.size();
    if (n > 12) {
        throw std::length_error("bruteForce enumerates subsets exhaustively; n must be <= 12");
    }
    if (phi < 1) throw std::invalid_argument("phi must be >= 1");
    if (std::isnan(psi) || psi < 0.0) throw std::invalid_argument("psi must be >= 0");
    if (static_cast<int>(r.size()) != n) {
        throw std::invalid_argument("ECE vector size does not match topology");
    }

    const std::vector<double> fullRow = fullRowSums(full, r);

    bool haveBest = false;
    int bestEdges = 0;
    int bestMembers = 0;
    std::vector<Edge> bestEdgeList;
    std::vector<int> bestMemberList;

    for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
        std::vector<int> members;
        for (int i = 0; i < n; ++i) {
            if (mask & (1u << i)) members.push_back(i);
        }
        if (static_cast<int>(members.size()) > phi) continue;

        // Non-members retain nothing, so their full row pressure must
        // already sit within the tolerance.
        bool ok = true;
        for (int i = 0; i < n && ok; ++i) {
            if (!(mask & (1u << i)) && !(fullRow[i] <= psi)) ok = false;
        }
        if (!ok) continue;

        // Rows are independent: W_i depends only on i's retained out-edges.
        // Per member, pick the smallest (then lexicographically first)
        // out-edge subset whose weight sum keeps W_i within psi.
        std::vector<Edge> chosen;
        for (int i : members) {
            std::vector<std::pair<int, double>> cand;  // (target, weight), ascending target
            for (const auto& [j, w] : full.neighbors(i)) {
                (void)w;
                if (mask & (1u << j)) cand.emplace_back(j, edgeWeight(full, r, i, j));
            }
            const int m = static_cast<int>(cand.size());
            int bestCount = -1;
            std::vector<int> bestPick;
            for (std::uint32_t sub = 0; sub < (1u << m); ++sub) {
                double sum = 0.0;
                int count = 0;
                std::vector<int> pick;
                for (int b = 0; b < m; ++b) {
                    if (sub & (1u << b)) {
                        sum += cand[b].second;
                        ++count;
                        pick.push_back(cand[b].first);
                    }
                }
                if (!(fullRow[i] - sum <= psi)) continue;
                if (bestCount < 0 || count < bestCount ||
                    (count == bestCount &&
                     std::lexicographical_compare(pick.begin(), pick.end(),
                                                  bestPick.begin(), bestPick.end()))) {
                    bestCount = count;
                    bestPick = std::move(pick);
                }
            }
            if (bestCount < 0) {
                ok = false;
                break;
            }
            for (int j : bestPick) chosen.push_back({i, j});
        }
        if (!ok) continue;

        std::sort(chosen.begin(), chosen.end());
        const int edgeCount = static_cast<int>(chosen.size());
        const int memberCount = static_cast<int>(members.size());
        bool better = false;
        if (!haveBest) {
            better = true;
        } else if (edgeCount != bestEdges) {
            better = edgeCount < bestEdges;
        } else if (memberCount != bestMembers) {
            better = memberCount > bestMembers;
        } else {
            better = std::lexicographical_compare(chosen.begin(), chosen.end(),
                                                  bestEdgeList.begin(), bestEdgeList.end());
        }
        if (better) {
            haveBest = true;
            bestEdges = edgeCount;
            bestMembers = memberCount;
            bestEdgeList = std::move(chosen);
            bestMemberList = members;
        }
    }

    BruteForceResult result;
    if (haveBest) {
        result.feasible = true;
        result.subgraph = Subgraph::of(full, bestMemberList, bestEdgeList);
        result.edgeCount = bestEdges;
    }
    return result;
}

}  // namespace daosim

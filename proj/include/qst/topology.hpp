#pragma once

#include <array>
#include <cmath>
#include <string>
#include <vector>

#include "qst/config.hpp"
#include "qst/dyadic.hpp"
#include "qst/errors.hpp"

namespace qst {

// Node (n, t): level n = 1 is the apex, level N+1 the support row;
// t counts left to right within the level.
struct NodeId {
    int level = 0;
    int ordinal = 0;
};

enum class MemberKind { inclined, horizontal };

struct MemberId {
    MemberKind kind = MemberKind::inclined;
    int level = 0;
    int ordinal = 0; // p for inclined members, q for horizontal ones
};

struct Node {
    NodeId id;
    double x = 0.0; // [mm], origin at support 1, rightward
    double y = 0.0; // [mm], upward
};

struct Member {
    MemberId id;
    int node_a = 0;     // flat node indexes into Topology::nodes
    int node_b = 0;
    double length = 0.0; // [mm]
    double ea = 0.0;     // axial stiffness product EA [kN]
};

struct Support {
    int index = 0; // 1-based support number i
    int node = 0;  // flat node index of (N+1, i)
};

struct Topology {
    int levels = 0;
    double height = 0.0; // Y [mm]
    double width = 0.0;  // 2Yc/s [mm]
    std::vector<Node> nodes;
    std::vector<Member> members;
    std::vector<Support> supports;

    int nodes_per_level(int level) const {
        return level <= levels ? (1 << (level - 1)) : (1 << (levels - 1)) + 1;
    }

    int node_index(int level, int ordinal) const {
        if (level < 1 || level > levels + 1 || ordinal < 1 || ordinal > nodes_per_level(level))
            throw DomainError("node (" + std::to_string(level) + "," + std::to_string(ordinal) +
                              ") out of range");
        return (1 << (level - 1)) - 1 + (ordinal - 1);
    }

    int apex_index() const { return 0; }
};

// Normalized abscissa of node (n, t): (2t-1)/2^n on the member levels,
// (t-1)/2^{N-1} on the support row. Support 1 sits at 0, the last
// support at 1.
inline DyadicPoint node_abscissa(int levels, int level, int ordinal) {
    if (level < 1 || level > levels + 1)
        throw DomainError("node level out of range");
    const int per_level = level <= levels ? (1 << (level - 1)) : (1 << (levels - 1)) + 1;
    if (ordinal < 1 || ordinal > per_level)
        throw DomainError("node ordinal out of range");
    if (level <= levels)
        return DyadicPoint(static_cast<std::uint64_t>(2 * ordinal - 1), level);
    return DyadicPoint(static_cast<std::uint64_t>(ordinal - 1), levels - 1);
}

// Physical position of node (n, t): y = Y / 2^{n-1} on member levels and
// 0 on the support row; x = abscissa * 2Yc/s.
inline std::array<double, 2> node_position(const StructureConfig& config, int level, int ordinal) {
    const DyadicPoint xhat = node_abscissa(config.levels, level, ordinal);
    const double x = xhat.value() * config.width();
    const double y = level <= config.levels ? std::ldexp(config.height, 1 - level) : 0.0;
    return {x, y};
}

// Build the full truss: 3*2^{N-1} nodes, 5*2^{N-1}-3 members,
// 2^{N-1}+1 supports. The support-row horizontal members carry no force
// under fixed horizontal restraints and are omitted.
inline Topology build_topology(const StructureConfig& config) {
    config.ensure_valid();
    const int n_levels = config.levels;
    const Trig trig = config.trig();

    Topology topo;
    topo.levels = n_levels;
    topo.height = config.height;
    topo.width = config.width();

    topo.nodes.reserve(static_cast<std::size_t>(config.node_count()));
    for (int n = 1; n <= n_levels + 1; ++n) {
        const int per_level = topo.nodes_per_level(n);
        for (int t = 1; t <= per_level; ++t) {
            const auto pos = node_position(config, n, t);
            topo.nodes.push_back(Node{NodeId{n, t}, pos[0], pos[1]});
        }
    }

    topo.members.reserve(static_cast<std::size_t>(config.member_count()));
    const double ea_i = config.area_inclined * config.modulus_inclined;
    const double ea_h = config.area_horizontal * config.modulus_horizontal;
    for (int n = 1; n <= n_levels; ++n) {
        // Inclined members (n, p): p odd descends left from node (n, (p+1)/2),
        // p even descends right from node (n, p/2).
        const double len = n < n_levels ? config.height / (trig.s * std::ldexp(1.0, n))
                                        : config.height / (trig.s * std::ldexp(1.0, n - 1));
        const double ea = config.ratios_inclined.rho(n) * ea_i;
        for (int p = 1; p <= (1 << n); ++p) {
            const int upper = topo.node_index(n, (p + 1) / 2);
            const int lower = n < n_levels ? topo.node_index(n + 1, p)
                                           : topo.node_index(n_levels + 1, p / 2 + 1);
            topo.members.push_back(Member{MemberId{MemberKind::inclined, n, p}, upper, lower, len, ea});
        }
    }
    for (int n = 2; n <= n_levels; ++n) {
        // Horizontal members (n, q) join the sibling pair (n, 2q-1)-(n, 2q).
        const double len = trig.c_over_s * config.height * std::ldexp(1.0, 2 - n);
        const double ea = config.ratios_horizontal.rho(n) * ea_h;
        for (int q = 1; q <= (1 << (n - 2)); ++q) {
            const int a = topo.node_index(n, 2 * q - 1);
            const int b = topo.node_index(n, 2 * q);
            topo.members.push_back(Member{MemberId{MemberKind::horizontal, n, q}, a, b, len, ea});
        }
    }

    topo.supports.reserve(static_cast<std::size_t>(config.support_count()));
    for (int i = 1; i <= config.support_count(); ++i)
        topo.supports.push_back(Support{i, topo.node_index(n_levels + 1, i)});

    return topo;
}

} // namespace qst

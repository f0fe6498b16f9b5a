#include <catch2/catch.hpp>

#include <cmath>
#include <map>
#include <set>

#include "helpers.hpp"
#include "qst/config.hpp"
#include "qst/topology.hpp"

using namespace qst;
using qst::testing::reference_config;
using qst::testing::sized_config;

TEST_CASE("counts match the closed formulas") {
    const Topology topo = build_topology(reference_config());
    CHECK(topo.nodes.size() == 48);
    CHECK(topo.members.size() == 77);
    CHECK(topo.supports.size() == 17);

    const Topology small = build_topology(sized_config(2));
    CHECK(small.nodes.size() == 6);
    CHECK(small.members.size() == 7);
    CHECK(small.supports.size() == 3);

    for (int n = 2; n <= 10; ++n) {
        const Topology t = build_topology(sized_config(n));
        CHECK(static_cast<int>(t.nodes.size()) == 3 * (1 << (n - 1)));
        CHECK(static_cast<int>(t.members.size()) == 5 * (1 << (n - 1)) - 3);
        CHECK(static_cast<int>(t.supports.size()) == (1 << (n - 1)) + 1);
    }
}

TEST_CASE("member lengths and axial stiffness follow the level rules") {
    const StructureConfig config = reference_config();
    const Topology topo = build_topology(config);
    const double s = 2.0 / std::sqrt(5.0);

    std::map<int, double> inclined_len, horizontal_len;
    for (const Member& m : topo.members) {
        if (m.id.kind == MemberKind::inclined) {
            inclined_len[m.id.level] = m.length;
            CHECK(m.ea == Approx(config.ratios_inclined.rho(m.id.level) * 8.0 * 210.0));
        } else {
            horizontal_len[m.id.level] = m.length;
            CHECK(m.ea == Approx(config.ratios_horizontal.rho(m.id.level) * 0.5 * 210.0));
        }
    }
    CHECK(inclined_len[1] == Approx(8944.271909999159).epsilon(1e-12)); // Y/(2s)
    CHECK(inclined_len[2] == Approx(16000.0 / (4.0 * s)).epsilon(1e-12));
    CHECK(inclined_len[4] == Approx(16000.0 / (16.0 * s)).epsilon(1e-12));
    CHECK(inclined_len[5] == inclined_len[4]); // last level keeps the previous length
    CHECK(horizontal_len[2] == Approx(8000.0).epsilon(1e-12)); // cY/s
    CHECK(horizontal_len[5] == Approx(1000.0).epsilon(1e-12));

    // stored lengths agree with the node coordinates
    for (const Member& m : topo.members) {
        const Node& a = topo.nodes[static_cast<std::size_t>(m.node_a)];
        const Node& b = topo.nodes[static_cast<std::size_t>(m.node_b)];
        CHECK(std::hypot(b.x - a.x, b.y - a.y) == Approx(m.length).epsilon(1e-12));
    }
}

TEST_CASE("node positions use the declared coordinate convention") {
    const StructureConfig config = reference_config();
    CHECK(node_position(config, 6, 1) == std::array<double, 2>{0.0, 0.0});
    CHECK(node_position(config, 1, 1)[0] == Approx(8000.0));
    CHECK(node_position(config, 1, 1)[1] == 16000.0);
    CHECK(node_position(config, 6, 17)[0] == Approx(16000.0));
    CHECK(node_position(config, 6, 17)[1] == 0.0);
    CHECK(node_position(config, 2, 2)[1] == 8000.0);

    CHECK_THROWS_AS(node_position(config, 7, 1), DomainError);
    CHECK_THROWS_AS(node_position(config, 3, 5), DomainError);
    CHECK_THROWS_AS(node_position(config, 6, 18), DomainError);
}

TEST_CASE("vertical projections along every support path sum to the height") {
    for (int n = 2; n <= 8; ++n) {
        const StructureConfig config = sized_config(n);
        const Topology topo = build_topology(config);

        // member attached above each node: inclined (n-1, t) ends at (n, t)
        std::map<int, int> upper_member_of_node;
        for (std::size_t mi = 0; mi < topo.members.size(); ++mi) {
            const Member& m = topo.members[mi];
            if (m.id.kind == MemberKind::inclined)
                upper_member_of_node[m.node_b] = static_cast<int>(mi);
        }
        for (const Support& s : topo.supports) {
            double total = 0.0;
            int node = s.node;
            while (node != topo.apex_index()) {
                const Member& m = topo.members[static_cast<std::size_t>(upper_member_of_node.at(node))];
                const Node& a = topo.nodes[static_cast<std::size_t>(m.node_a)];
                const Node& b = topo.nodes[static_cast<std::size_t>(m.node_b)];
                total += a.y - b.y;
                node = m.node_a;
            }
            CHECK(total == config.height); // exact: the projections are binary fractions of Y
        }
    }
}

TEST_CASE("supports are equally spaced across the base") {
    for (int n : {2, 5, 8}) {
        const StructureConfig config = sized_config(n);
        const Topology topo = build_topology(config);
        const double spacing = std::ldexp(topo.width, -(n - 1));
        for (std::size_t i = 1; i < topo.supports.size(); ++i) {
            const double xa = topo.nodes[static_cast<std::size_t>(topo.supports[i - 1].node)].x;
            const double xb = topo.nodes[static_cast<std::size_t>(topo.supports[i].node)].x;
            CHECK(xb - xa == Approx(spacing).epsilon(1e-14));
        }
        // the normalized grid is exactly uniform
        for (int i = 1; i <= (1 << (n - 1)) + 1; ++i)
            CHECK(node_abscissa(n, n + 1, i) == DyadicPoint(static_cast<std::uint64_t>(i - 1), n - 1));
    }
}

TEST_CASE("connectivity degrees match the construction rules") {
    const StructureConfig config = reference_config();
    const Topology topo = build_topology(config);

    struct Degree {
        int inclined_above = 0, inclined_below = 0, horizontal = 0;
    };
    std::vector<Degree> deg(topo.nodes.size());
    for (const Member& m : topo.members) {
        if (m.id.kind == MemberKind::horizontal) {
            ++deg[static_cast<std::size_t>(m.node_a)].horizontal;
            ++deg[static_cast<std::size_t>(m.node_b)].horizontal;
        } else {
            ++deg[static_cast<std::size_t>(m.node_a)].inclined_below;
            ++deg[static_cast<std::size_t>(m.node_b)].inclined_above;
        }
    }
    for (const Node& node : topo.nodes) {
        const Degree& d = deg[static_cast<std::size_t>(topo.node_index(node.id.level, node.id.ordinal))];
        if (node.id.level == 1) {
            CHECK(d.inclined_above == 0);
            CHECK(d.inclined_below == 2);
            CHECK(d.horizontal == 0);
        } else if (node.id.level <= topo.levels) {
            CHECK(d.inclined_above == 1);
            CHECK(d.inclined_below == 2);
            CHECK(d.horizontal == 1);
        } else {
            const bool end = node.id.ordinal == 1 || node.id.ordinal == (1 << (topo.levels - 1)) + 1;
            CHECK(d.inclined_above == (end ? 1 : 2));
            CHECK(d.inclined_below == 0);
            CHECK(d.horizontal == 0);
        }
    }
}

TEST_CASE("config validation lists every violation") {
    StructureConfig bad = reference_config();
    bad.levels = 1;
    bad.height = -5.0;
    auto errors = bad.validate();
    CHECK(errors.size() >= 2);
    CHECK_THROWS_AS(bad.ensure_valid(), ValidationError);

    StructureConfig wrong_ratios = reference_config();
    wrong_ratios.ratios_horizontal = RatioSequence::horizontal({1.0, 0.75}); // needs N-1 = 4
    CHECK_FALSE(wrong_ratios.validate().empty());

    StructureConfig swapped = reference_config();
    swapped.boundary = {17, 1, -0.1, -0.1};
    CHECK_FALSE(swapped.validate().empty());

    StructureConfig flat = reference_config();
    flat.beta_tan = std::numeric_limits<double>::quiet_NaN();
    flat.beta_rad = 0.0;
    CHECK_FALSE(flat.validate().empty());

    CHECK(reference_config().validate().empty());

    // beta_tan wins over beta_rad when both are present
    StructureConfig both = reference_config();
    both.beta_rad = 0.3;
    CHECK(both.trig().c_over_s == 0.5);
}

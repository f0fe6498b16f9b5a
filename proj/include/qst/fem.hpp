#pragma once

#include <array>
#include <cmath>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>

#include "qst/analysis.hpp"
#include "qst/config.hpp"
#include "qst/errors.hpp"
#include "qst/topology.hpp"

namespace qst {

// One axial bar in global coordinates.
struct FemElement {
    int node_a = 0;
    int node_b = 0;
    double ex = 0.0; // unit vector a -> b
    double ey = 0.0;
    double stiffness = 0.0; // EA / l [kN/mm]
    int member = 0;         // index into Topology::members
};

// Assembled linear system. The horizontal DOF of every support node is
// eliminated (fixed restraint); vertical support DOFs stay free and are
// grounded through the springs on the diagonal.
struct FemSystem {
    int free_dofs = 0;
    std::vector<std::array<int, 2>> dof;   // per node {x dof, y dof}, -1 = fixed
    Eigen::SparseMatrix<double> stiffness; // free DOFs only
    Eigen::VectorXd load;                  // [kN] per free DOF; solve() adds the apex load
    std::vector<double> spring_constants;  // [kN/mm] per support
    std::vector<FemElement> elements;
    std::vector<int> support_node; // flat node index per support
    std::vector<int> support_of_node;
    int apex_node = 0;
    int node_count = 0;
};

struct FemSolution {
    std::vector<std::array<double, 2>> displacement; // [mm] per node, fixed DOFs 0
    std::vector<double> axial_force;                 // [kN] per member, tension +
    std::vector<std::array<double, 2>> reaction;     // {horizontal, vertical} [kN] per support
    double max_equilibrium_residual = 0.0;           // [kN] over free DOFs
};

inline FemSystem assemble(const Topology& topo, const std::vector<double>& stiffnesses) {
    if (static_cast<int>(stiffnesses.size()) != static_cast<int>(topo.supports.size()))
        throw DomainError("assemble: one spring constant per support required");
    for (double k : stiffnesses)
        if (!(std::isfinite(k) && k > 0.0))
            throw SolverError("assemble: spring constants must be positive");

    FemSystem sys;
    sys.node_count = static_cast<int>(topo.nodes.size());
    sys.apex_node = topo.apex_index();
    sys.spring_constants = stiffnesses;
    sys.support_of_node.assign(static_cast<std::size_t>(sys.node_count), -1);
    for (const Support& s : topo.supports) {
        sys.support_node.push_back(s.node);
        sys.support_of_node[static_cast<std::size_t>(s.node)] = s.index - 1;
    }

    sys.dof.assign(static_cast<std::size_t>(sys.node_count), {-1, -1});
    int next = 0;
    for (int i = 0; i < sys.node_count; ++i) {
        const bool is_support = sys.support_of_node[static_cast<std::size_t>(i)] >= 0;
        sys.dof[static_cast<std::size_t>(i)][0] = is_support ? -1 : next++;
        sys.dof[static_cast<std::size_t>(i)][1] = next++;
    }
    sys.free_dofs = next;

    std::vector<Eigen::Triplet<double>> triplets;
    triplets.reserve(topo.members.size() * 16 + topo.supports.size());

    sys.elements.reserve(topo.members.size());
    for (std::size_t mi = 0; mi < topo.members.size(); ++mi) {
        const Member& m = topo.members[mi];
        const Node& a = topo.nodes[static_cast<std::size_t>(m.node_a)];
        const Node& b = topo.nodes[static_cast<std::size_t>(m.node_b)];
        const double dx = b.x - a.x;
        const double dy = b.y - a.y;
        const double len = std::hypot(dx, dy);
        if (!(len > 0.0))
            throw SolverError("assemble: zero-length member (" + std::to_string(m.id.level) + "," +
                              std::to_string(m.id.ordinal) + ")");
        if (!(m.ea > 0.0))
            throw SolverError("assemble: non-positive EA on member (" + std::to_string(m.id.level) + "," +
                              std::to_string(m.id.ordinal) + ")");
        FemElement e;
        e.node_a = m.node_a;
        e.node_b = m.node_b;
        e.ex = dx / len;
        e.ey = dy / len;
        e.stiffness = m.ea / len;
        e.member = static_cast<int>(mi);
        sys.elements.push_back(e);

        // k * [c^2 cs; cs s^2] on the (a,a)/(b,b) blocks, negated across.
        const double kxx = e.stiffness * e.ex * e.ex;
        const double kxy = e.stiffness * e.ex * e.ey;
        const double kyy = e.stiffness * e.ey * e.ey;
        const std::array<int, 4> gdof = {sys.dof[static_cast<std::size_t>(m.node_a)][0],
                                         sys.dof[static_cast<std::size_t>(m.node_a)][1],
                                         sys.dof[static_cast<std::size_t>(m.node_b)][0],
                                         sys.dof[static_cast<std::size_t>(m.node_b)][1]};
        const std::array<std::array<double, 4>, 4> ke = {{{kxx, kxy, -kxx, -kxy},
                                                          {kxy, kyy, -kxy, -kyy},
                                                          {-kxx, -kxy, kxx, kxy},
                                                          {-kxy, -kyy, kxy, kyy}}};
        for (int r = 0; r < 4; ++r) {
            if (gdof[static_cast<std::size_t>(r)] < 0)
                continue;
            for (int col = 0; col < 4; ++col) {
                if (gdof[static_cast<std::size_t>(col)] < 0)
                    continue;
                triplets.emplace_back(gdof[static_cast<std::size_t>(r)], gdof[static_cast<std::size_t>(col)],
                                      ke[static_cast<std::size_t>(r)][static_cast<std::size_t>(col)]);
            }
        }
    }

    for (std::size_t si = 0; si < sys.support_node.size(); ++si) {
        const int ydof = sys.dof[static_cast<std::size_t>(sys.support_node[si])][1];
        triplets.emplace_back(ydof, ydof, stiffnesses[si]);
    }

    sys.stiffness.resize(sys.free_dofs, sys.free_dofs);
    sys.stiffness.setFromTriplets(triplets.begin(), triplets.end());
    sys.stiffness.makeCompressed();
    sys.load = Eigen::VectorXd::Zero(sys.free_dofs);
    return sys;
}

// Direct symmetric factorization of K u = f with the point load at the
// apex, one refinement pass, then force and reaction recovery.
inline FemSolution solve(const FemSystem& sys, double load) {
    if (!std::isfinite(load))
        throw SolverError("solve: load must be finite");
    Eigen::VectorXd f = sys.load;
    const int apex_y = sys.dof[static_cast<std::size_t>(sys.apex_node)][1];
    f[apex_y] -= load;

    Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt(sys.stiffness);
    if (ldlt.info() != Eigen::Success)
        throw SolverError("solve: factorization failed (mechanism or invalid restraint)");
    const Eigen::VectorXd& d = ldlt.vectorD();
    for (int i = 0; i < d.size(); ++i)
        if (!(d[i] > 0.0) || !std::isfinite(d[i]))
            throw SolverError("solve: stiffness matrix is not positive definite "
                              "(mechanism or invalid restraint)");
    Eigen::VectorXd u = ldlt.solve(f);
    if (ldlt.info() != Eigen::Success)
        throw SolverError("solve: back-substitution failed");
    u += ldlt.solve(f - sys.stiffness * u);
    u += ldlt.solve(f - sys.stiffness * u);

    FemSolution sol;
    sol.displacement.assign(static_cast<std::size_t>(sys.node_count), {0.0, 0.0});
    for (int i = 0; i < sys.node_count; ++i)
        for (int d = 0; d < 2; ++d) {
            const int g = sys.dof[static_cast<std::size_t>(i)][static_cast<std::size_t>(d)];
            if (g >= 0)
                sol.displacement[static_cast<std::size_t>(i)][static_cast<std::size_t>(d)] = u[g];
        }

    sol.axial_force.assign(sys.elements.size(), 0.0);
    for (const FemElement& e : sys.elements) {
        const auto& ua = sol.displacement[static_cast<std::size_t>(e.node_a)];
        const auto& ub = sol.displacement[static_cast<std::size_t>(e.node_b)];
        const double elongation = (ub[0] - ua[0]) * e.ex + (ub[1] - ua[1]) * e.ey;
        sol.axial_force[static_cast<std::size_t>(e.member)] = e.stiffness * elongation;
    }

    // Reactions: springs carry the vertical share, the fixed horizontal
    // DOF balances the member forces meeting at the support node.
    sol.reaction.assign(sys.support_node.size(), {0.0, 0.0});
    std::vector<double> member_pull_x(static_cast<std::size_t>(sys.node_count), 0.0);
    for (const FemElement& e : sys.elements) {
        const double p = sol.axial_force[static_cast<std::size_t>(e.member)];
        member_pull_x[static_cast<std::size_t>(e.node_a)] += p * e.ex;
        member_pull_x[static_cast<std::size_t>(e.node_b)] -= p * e.ex;
    }
    for (std::size_t si = 0; si < sys.support_node.size(); ++si) {
        const int node = sys.support_node[si];
        sol.reaction[si][0] = -member_pull_x[static_cast<std::size_t>(node)];
        sol.reaction[si][1] =
            -sys.spring_constants[si] * sol.displacement[static_cast<std::size_t>(node)][1];
    }

    const Eigen::VectorXd residual = sys.stiffness * u - f;
    sol.max_equilibrium_residual = residual.size() > 0 ? residual.cwiseAbs().maxCoeff() : 0.0;
    return sol;
}

struct CategoryReport {
    std::string name;
    double max_abs = 0.0;  // worst absolute deviation
    double deviation = 0.0; // worst deviation on the category scale
    double tolerance = 0.0;
    bool pass = true;
};

struct ComparisonReport {
    std::vector<CategoryReport> categories;
    bool pass = true;

    const CategoryReport* find(const std::string& name) const {
        for (const auto& c : categories)
            if (c.name == name)
                return &c;
        return nullptr;
    }
};

namespace detail {

// scale <= 0 requests per-element relative deviation; the expected values
// must then be structurally nonzero (reactions, axial forces).
inline CategoryReport compare_series(std::string name, const std::vector<double>& actual,
                                     const std::vector<double>& expected, double scale, double tol) {
    CategoryReport rep;
    rep.name = std::move(name);
    rep.tolerance = tol;
    for (std::size_t i = 0; i < actual.size(); ++i) {
        const double abs_dev = std::abs(actual[i] - expected[i]);
        rep.max_abs = std::max(rep.max_abs, abs_dev);
        if (scale <= 0.0)
            rep.deviation = std::max(rep.deviation, abs_dev / std::abs(expected[i]));
    }
    if (scale > 0.0)
        rep.deviation = rep.max_abs / scale;
    rep.pass = rep.deviation <= tol;
    return rep;
}

} // namespace detail

// FEM solution against the closed form, category by category. Reactions
// and axial forces are compared value by value in relative terms; the
// signed displacement fields, which cross zero, are measured on their
// joint magnitude scale. Interior horizontal reactions must vanish and
// are held to a tenth of the tolerance times the applied load.
inline ComparisonReport compare(const Topology& topo, const StructureConfig& config,
                                const FemSolution& sol, const AnalysisResult& analysis,
                                double tol_rel = 1e-8) {
    const std::size_t ns = topo.supports.size();
    if (sol.reaction.size() != ns || analysis.reaction_vertical.size() != ns ||
        analysis.delta.size() != ns)
        throw DomainError("compare: support count mismatch");
    if (sol.axial_force.size() != topo.members.size())
        throw DomainError("compare: member count mismatch");
    if (sol.displacement.size() != topo.nodes.size())
        throw DomainError("compare: node count mismatch");
    if (static_cast<int>(analysis.epsilon.size()) != topo.levels + 1 ||
        static_cast<int>(analysis.mu.size()) != topo.levels + 1)
        throw DomainError("compare: displacement table shape mismatch");

    ComparisonReport report;
    const double f_scale = config.load;

    {
        std::vector<double> fem_v(ns), fem_h_ends(2), exp_h_ends(2);
        for (std::size_t i = 0; i < ns; ++i)
            fem_v[i] = sol.reaction[i][1];
        report.categories.push_back(detail::compare_series("reaction_vertical", fem_v,
                                                           analysis.reaction_vertical, -1.0, tol_rel));
        fem_h_ends[0] = sol.reaction.front()[0];
        fem_h_ends[1] = sol.reaction.back()[0];
        exp_h_ends[0] = analysis.reaction_horizontal.front();
        exp_h_ends[1] = analysis.reaction_horizontal.back();
        report.categories.push_back(detail::compare_series("reaction_horizontal_ends", fem_h_ends,
                                                           exp_h_ends, -1.0, tol_rel));
        CategoryReport interior;
        interior.name = "reaction_horizontal_interior";
        interior.tolerance = 0.1 * tol_rel;
        for (std::size_t i = 1; i + 1 < ns; ++i)
            interior.max_abs = std::max(interior.max_abs, std::abs(sol.reaction[i][0]));
        interior.deviation = interior.max_abs / f_scale;
        interior.pass = interior.deviation <= interior.tolerance;
        report.categories.push_back(interior);
    }

    {
        std::vector<double> fem_i, exp_i, fem_h, exp_h;
        for (std::size_t mi = 0; mi < topo.members.size(); ++mi) {
            const Member& m = topo.members[mi];
            if (m.id.kind == MemberKind::inclined) {
                fem_i.push_back(sol.axial_force[mi]);
                exp_i.push_back(analysis.inclined_force[static_cast<std::size_t>(m.id.level - 1)]);
            } else {
                fem_h.push_back(sol.axial_force[mi]);
                exp_h.push_back(analysis.horizontal_force[static_cast<std::size_t>(m.id.level - 2)]);
            }
        }
        report.categories.push_back(
            detail::compare_series("axial_inclined", fem_i, exp_i, -1.0, tol_rel));
        report.categories.push_back(
            detail::compare_series("axial_horizontal", fem_h, exp_h, -1.0, tol_rel));
    }

    {
        std::vector<double> fem_eps, exp_eps, fem_mu, exp_mu;
        double disp_scale = 0.0;
        for (const Node& node : topo.nodes) {
            const int idx = topo.node_index(node.id.level, node.id.ordinal);
            const auto& u = sol.displacement[static_cast<std::size_t>(idx)];
            fem_eps.push_back(u[1] / topo.height);
            fem_mu.push_back(u[0] / topo.height);
            const double eps = analysis.epsilon[static_cast<std::size_t>(node.id.level - 1)]
                                               [static_cast<std::size_t>(node.id.ordinal - 1)];
            const double mu = analysis.mu[static_cast<std::size_t>(node.id.level - 1)]
                                         [static_cast<std::size_t>(node.id.ordinal - 1)];
            exp_eps.push_back(eps);
            exp_mu.push_back(mu);
            disp_scale = std::max({disp_scale, std::abs(eps), std::abs(mu)});
        }
        report.categories.push_back(
            detail::compare_series("epsilon", fem_eps, exp_eps, disp_scale, tol_rel));
        report.categories.push_back(detail::compare_series("mu", fem_mu, exp_mu, disp_scale, tol_rel));
    }

    for (const auto& c : report.categories)
        report.pass = report.pass && c.pass;
    return report;
}

// Convenience end-to-end verification run.
inline ComparisonReport verify_against_fem(const StructureConfig& config, double tol_rel = 1e-8,
                                           bool allow_nonnegative_delta = false) {
    const Topology topo = build_topology(config);
    const AnalysisResult analysis = analyze(config, allow_nonnegative_delta);
    const FemSystem sys = assemble(topo, support_stiffnesses(config, analysis.delta));
    const FemSolution sol = solve(sys, config.load);
    return compare(topo, config, sol, analysis, tol_rel);
}

} // namespace qst

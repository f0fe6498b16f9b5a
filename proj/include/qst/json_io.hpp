#pragma once

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <map>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "qst/analysis.hpp"
#include "qst/config.hpp"
#include "qst/errors.hpp"
#include "qst/fem.hpp"
#include "qst/topology.hpp"

namespace qst {

inline constexpr int kSchemaVersion = 1;

// ---------------------------------------------------------------------------
// Deterministic JSON emission. Output files must be byte-identical across
// runs: objects keep their keys sorted and doubles are printed with 17
// significant digits, which round-trips exactly.

class JValue {
public:
    using Array = std::vector<JValue>;
    using Object = std::map<std::string, JValue>;

    JValue() : data_(nullptr) {}
    JValue(std::nullptr_t) : data_(nullptr) {}
    JValue(bool b) : data_(b) {}
    JValue(double d) : data_(d) {}
    JValue(int i) : data_(static_cast<std::int64_t>(i)) {}
    JValue(std::int64_t i) : data_(i) {}
    JValue(const char* s) : data_(std::string(s)) {}
    JValue(std::string s) : data_(std::move(s)) {}
    JValue(Array a) : data_(std::move(a)) {}
    JValue(Object o) : data_(std::move(o)) {}

    static JValue array() { return JValue(Array{}); }
    static JValue object() { return JValue(Object{}); }

    JValue& operator[](const std::string& key) { return std::get<Object>(data_)[key]; }
    void push_back(JValue v) { std::get<Array>(data_).push_back(std::move(v)); }

    static JValue from(const std::vector<double>& values) {
        Array a;
        a.reserve(values.size());
        for (double v : values)
            a.emplace_back(v);
        return JValue(std::move(a));
    }

    std::string dump(int indent = 0) const {
        std::string out;
        write(out, indent);
        out += '\n';
        return out;
    }

private:
    static std::string format_double(double v) {
        if (!std::isfinite(v))
            return "null"; // JSON has no nan/inf literal
        char buf[40];
        std::snprintf(buf, sizeof(buf), "%.17g", v);
        return buf;
    }

    static void escape(std::string& out, const std::string& s) {
        out += '"';
        for (char ch : s) {
            switch (ch) {
            case '"': out += "\\\""; break;
            case '\\': out += "\\\\"; break;
            case '\n': out += "\\n"; break;
            case '\t': out += "\\t"; break;
            default: out += ch;
            }
        }
        out += '"';
    }

    void write(std::string& out, int indent) const {
        const std::string pad(static_cast<std::size_t>(indent) * 2, ' ');
        const std::string pad_in(static_cast<std::size_t>(indent + 1) * 2, ' ');
        if (std::holds_alternative<std::nullptr_t>(data_)) {
            out += "null";
        } else if (const auto* b = std::get_if<bool>(&data_)) {
            out += *b ? "true" : "false";
        } else if (const auto* i = std::get_if<std::int64_t>(&data_)) {
            out += std::to_string(*i);
        } else if (const auto* d = std::get_if<double>(&data_)) {
            out += format_double(*d);
        } else if (const auto* s = std::get_if<std::string>(&data_)) {
            escape(out, *s);
        } else if (const auto* a = std::get_if<Array>(&data_)) {
            if (a->empty()) {
                out += "[]";
                return;
            }
            out += "[\n";
            for (std::size_t k = 0; k < a->size(); ++k) {
                out += pad_in;
                (*a)[k].write(out, indent + 1);
                if (k + 1 < a->size())
                    out += ',';
                out += '\n';
            }
            out += pad + "]";
        } else if (const auto* o = std::get_if<Object>(&data_)) {
            if (o->empty()) {
                out += "{}";
                return;
            }
            out += "{\n";
            std::size_t k = 0;
            for (const auto& [key, value] : *o) {
                out += pad_in;
                escape(out, key);
                out += ": ";
                value.write(out, indent + 1);
                if (++k < o->size())
                    out += ',';
                out += '\n';
            }
            out += pad + "}";
        }
    }

    std::variant<std::nullptr_t, bool, std::int64_t, double, std::string, Array, Object> data_;
};

// ---------------------------------------------------------------------------
// Run configuration file

struct PlotOptions {
    std::string what = "deformed"; // deformed | displacements | takagi | cantor | j
    int sample_depth = 12;         // curves get 2^depth + 1 samples
    double magnify = 1.0;
    double cantor_r = 1.5;
};

struct RunConfig {
    StructureConfig structure;
    std::string output_dir;
    double tol_closed_form = 1e-12;
    double tol_fem = 1e-8;
    PlotOptions plot;
};

namespace detail {

inline double take_number(const nlohmann::json& j, const std::string& key,
                          std::vector<std::string>& errors, bool required = true) {
    if (!j.contains(key)) {
        if (required)
            errors.push_back(key + ": missing");
        return std::numeric_limits<double>::quiet_NaN();
    }
    if (!j[key].is_number()) {
        errors.push_back(key + ": must be a number");
        return std::numeric_limits<double>::quiet_NaN();
    }
    return j[key].get<double>();
}

inline std::vector<double> take_ratio_list(const nlohmann::json& j, const std::string& key,
                                           std::vector<std::string>& errors) {
    std::vector<double> out;
    if (!j.contains(key)) {
        errors.push_back(key + ": missing");
        return out;
    }
    if (!j[key].is_array()) {
        errors.push_back(key + ": must be an array of positive reals");
        return out;
    }
    for (std::size_t i = 0; i < j[key].size(); ++i) {
        const auto& v = j[key][i];
        if (!v.is_number() || !(v.get<double>() > 0.0)) {
            errors.push_back(key + "[" + std::to_string(i) + "]: must be a positive real");
            return {};
        }
        out.push_back(v.get<double>());
    }
    if (!out.empty() && out.front() != 1.0)
        errors.push_back(key + "[0]: leading ratio must equal 1");
    return out;
}

inline RatioSequence::Extension parse_extension(const nlohmann::json& j, const std::string& key,
                                                std::vector<std::string>& errors) {
    if (!j.contains(key))
        return std::monostate{};
    const auto& e = j[key];
    if (!e.is_object() || !e.contains("kind") || !e["kind"].is_string()) {
        errors.push_back(key + ": must be an object with a \"kind\" of \"geometric\" or \"explicit\"");
        return std::monostate{};
    }
    const std::string kind = e["kind"].get<std::string>();
    if (kind == "geometric") {
        const double ratio = take_number(e, "ratio", errors);
        double start = ratio;
        if (e.contains("start"))
            start = take_number(e, "start", errors);
        if (!(ratio > 0.25))
            errors.push_back(key + ".ratio: summability requires 4r > 1");
        else if (!(start > 0.0))
            errors.push_back(key + ".start: must be > 0");
        else
            return GeometricTail{start, ratio};
        return std::monostate{};
    }
    if (kind == "explicit") {
        if (!e.contains("values") || !e["values"].is_array()) {
            errors.push_back(key + ".values: missing array");
            return std::monostate{};
        }
        std::vector<double> values;
        for (const auto& v : e["values"]) {
            if (!v.is_number() || !(v.get<double>() > 0.0)) {
                errors.push_back(key + ".values: entries must be positive reals");
                return std::monostate{};
            }
            values.push_back(v.get<double>());
        }
        return values;
    }
    errors.push_back(key + ".kind: unknown kind \"" + kind + "\"");
    return std::monostate{};
}

} // namespace detail

// Parse a run configuration, collecting one message per broken field.
inline RunConfig parse_run_config(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw IoError(std::string("config is not valid JSON: ") + e.what());
    }
    std::vector<std::string> errors;
    RunConfig rc;
    StructureConfig& c = rc.structure;

    if (j.contains("levels") && j["levels"].is_number_integer())
        c.levels = j["levels"].get<int>();
    else
        errors.push_back("levels: missing integer");
    if (j.contains("beta_tan"))
        c.beta_tan = detail::take_number(j, "beta_tan", errors);
    if (j.contains("beta_rad"))
        c.beta_rad = detail::take_number(j, "beta_rad", errors);
    c.height = detail::take_number(j, "height_mm", errors);
    c.load = detail::take_number(j, "load_kn", errors);
    c.area_inclined = detail::take_number(j, "area_inclined_mm2", errors);
    c.modulus_inclined = detail::take_number(j, "modulus_inclined_kn_mm2", errors);
    c.area_horizontal = detail::take_number(j, "area_horizontal_mm2", errors);
    c.modulus_horizontal = detail::take_number(j, "modulus_horizontal_kn_mm2", errors);

    const auto incl = detail::take_ratio_list(j, "ratios_inclined", errors);
    const auto hor = detail::take_ratio_list(j, "ratios_horizontal", errors);
    const auto ext = detail::parse_extension(j, "ratios_horizontal_extension", errors);
    try {
        if (!incl.empty())
            c.ratios_inclined = RatioSequence::inclined(incl);
        if (!hor.empty())
            c.ratios_horizontal = RatioSequence::horizontal(hor, ext);
    } catch (const Error& e) {
        errors.push_back(std::string("ratios: ") + e.what());
    }

    if (j.contains("boundary") && j["boundary"].is_object()) {
        const auto& b = j["boundary"];
        if (b.contains("z1") && b["z1"].is_number_integer())
            c.boundary.z1 = b["z1"].get<int>();
        else
            errors.push_back("boundary.z1: missing integer");
        if (b.contains("z2") && b["z2"].is_number_integer())
            c.boundary.z2 = b["z2"].get<int>();
        else
            errors.push_back("boundary.z2: missing integer");
        c.boundary.d1 = detail::take_number(b, "d1", errors);
        c.boundary.d2 = detail::take_number(b, "d2", errors);
    } else {
        errors.push_back("boundary: missing object {z1, z2, d1, d2}");
    }

    if (j.contains("output_dir") && j["output_dir"].is_string())
        rc.output_dir = j["output_dir"].get<std::string>();
    if (j.contains("tolerances") && j["tolerances"].is_object()) {
        const auto& t = j["tolerances"];
        if (t.contains("closed_form"))
            rc.tol_closed_form = detail::take_number(t, "closed_form", errors);
        if (t.contains("fem"))
            rc.tol_fem = detail::take_number(t, "fem", errors);
    }
    if (j.contains("plot") && j["plot"].is_object()) {
        const auto& p = j["plot"];
        if (p.contains("what") && p["what"].is_string())
            rc.plot.what = p["what"].get<std::string>();
        if (p.contains("sample_depth") && p["sample_depth"].is_number_integer())
            rc.plot.sample_depth = p["sample_depth"].get<int>();
        if (p.contains("magnify"))
            rc.plot.magnify = detail::take_number(p, "magnify", errors);
        if (p.contains("cantor_r"))
            rc.plot.cantor_r = detail::take_number(p, "cantor_r", errors);
    }

    for (const auto& e : rc.structure.validate())
        errors.push_back(e);
    if (!errors.empty()) {
        std::string msg = "invalid config:";
        for (const auto& e : errors)
            msg += "\n  - " + e;
        throw ValidationError(msg);
    }
    return rc;
}

// ---------------------------------------------------------------------------
// Topology schema

inline std::string topology_to_json(const Topology& topo) {
    JValue root = JValue::object();
    root["schema_version"] = kSchemaVersion;
    root["levels"] = topo.levels;
    root["height_mm"] = topo.height;
    root["width_mm"] = topo.width;

    JValue counts = JValue::object();
    counts["nodes"] = static_cast<std::int64_t>(topo.nodes.size());
    counts["members"] = static_cast<std::int64_t>(topo.members.size());
    counts["supports"] = static_cast<std::int64_t>(topo.supports.size());
    root["counts"] = std::move(counts);

    JValue nodes = JValue::array();
    for (const Node& n : topo.nodes) {
        JValue jn = JValue::object();
        jn["level"] = n.id.level;
        jn["ordinal"] = n.id.ordinal;
        jn["x_mm"] = n.x;
        jn["y_mm"] = n.y;
        nodes.push_back(std::move(jn));
    }
    root["nodes"] = std::move(nodes);

    JValue members = JValue::array();
    for (const Member& m : topo.members) {
        JValue jm = JValue::object();
        jm["kind"] = m.id.kind == MemberKind::inclined ? "inclined" : "horizontal";
        jm["level"] = m.id.level;
        jm["ordinal"] = m.id.ordinal;
        jm["node_a"] = m.node_a;
        jm["node_b"] = m.node_b;
        jm["length_mm"] = m.length;
        jm["ea_kn"] = m.ea;
        members.push_back(std::move(jm));
    }
    root["members"] = std::move(members);

    JValue supports = JValue::array();
    for (const Support& s : topo.supports) {
        JValue js = JValue::object();
        js["index"] = s.index;
        js["node"] = s.node;
        supports.push_back(std::move(js));
    }
    root["supports"] = std::move(supports);
    return root.dump();
}

inline Topology topology_from_json(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw IoError(std::string("topology is not valid JSON: ") + e.what());
    }
    try {
        Topology topo;
        topo.levels = j.at("levels").get<int>();
        topo.height = j.at("height_mm").get<double>();
        topo.width = j.at("width_mm").get<double>();
        for (const auto& n : j.at("nodes"))
            topo.nodes.push_back(Node{NodeId{n.at("level").get<int>(), n.at("ordinal").get<int>()},
                                      n.at("x_mm").get<double>(), n.at("y_mm").get<double>()});
        for (const auto& m : j.at("members")) {
            const MemberKind kind = m.at("kind").get<std::string>() == "inclined"
                                        ? MemberKind::inclined
                                        : MemberKind::horizontal;
            topo.members.push_back(Member{MemberId{kind, m.at("level").get<int>(), m.at("ordinal").get<int>()},
                                          m.at("node_a").get<int>(), m.at("node_b").get<int>(),
                                          m.at("length_mm").get<double>(), m.at("ea_kn").get<double>()});
        }
        for (const auto& s : j.at("supports"))
            topo.supports.push_back(Support{s.at("index").get<int>(), s.at("node").get<int>()});
        const int n_nodes = static_cast<int>(topo.nodes.size());
        for (const Member& m : topo.members)
            if (m.node_a < 0 || m.node_a >= n_nodes || m.node_b < 0 || m.node_b >= n_nodes)
                throw IoError("topology: member end-node index out of range");
        for (const Support& s : topo.supports)
            if (s.node < 0 || s.node >= n_nodes)
                throw IoError("topology: support node index out of range");
        return topo;
    } catch (const nlohmann::json::exception& e) {
        throw IoError(std::string("topology schema mismatch: ") + e.what());
    }
}

// ---------------------------------------------------------------------------
// Analysis result schema

inline std::string analysis_to_json(const AnalysisResult& r) {
    JValue root = JValue::object();
    root["schema_version"] = kSchemaVersion;

    JValue groups = JValue::object();
    groups["omega_h"] = r.groups.omega_h;
    groups["omega_i"] = r.groups.omega_i;
    groups["lambda1"] = r.groups.lambda1;
    groups["lambda2"] = r.groups.lambda2;
    groups["chi"] = r.groups.chi;
    root["groups"] = std::move(groups);

    JValue forces = JValue::object();
    forces["inclined_by_level_kn"] = JValue::from(r.inclined_force);
    forces["horizontal_by_level_kn"] = JValue::from(r.horizontal_force);
    root["member_forces"] = std::move(forces);

    JValue supports = JValue::object();
    supports["reaction_vertical_kn"] = JValue::from(r.reaction_vertical);
    supports["reaction_horizontal_kn"] = JValue::from(r.reaction_horizontal);
    supports["delta"] = JValue::from(r.delta);
    supports["stiffness_kn_mm"] = JValue::from(r.stiffness);
    root["supports"] = std::move(supports);

    JValue nodes = JValue::array();
    for (std::size_t lvl = 0; lvl < r.epsilon.size(); ++lvl) {
        for (std::size_t t = 0; t < r.epsilon[lvl].size(); ++t) {
            JValue jn = JValue::object();
            jn["level"] = static_cast<int>(lvl + 1);
            jn["ordinal"] = static_cast<int>(t + 1);
            jn["epsilon"] = r.epsilon[lvl][t];
            jn["mu"] = r.mu[lvl][t];
            nodes.push_back(std::move(jn));
        }
    }
    root["nodes"] = std::move(nodes);
    return root.dump();
}

inline AnalysisResult analysis_from_json(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw IoError(std::string("analysis is not valid JSON: ") + e.what());
    }
    try {
        AnalysisResult r;
        const auto& g = j.at("groups");
        r.groups.omega_h = g.at("omega_h").get<double>();
        r.groups.omega_i = g.at("omega_i").get<double>();
        r.groups.lambda1 = g.at("lambda1").get<double>();
        r.groups.lambda2 = g.at("lambda2").get<double>();
        r.groups.chi = g.at("chi").get<double>();
        r.inclined_force = j.at("member_forces").at("inclined_by_level_kn").get<std::vector<double>>();
        r.horizontal_force = j.at("member_forces").at("horizontal_by_level_kn").get<std::vector<double>>();
        const auto& s = j.at("supports");
        r.reaction_vertical = s.at("reaction_vertical_kn").get<std::vector<double>>();
        r.reaction_horizontal = s.at("reaction_horizontal_kn").get<std::vector<double>>();
        r.delta = s.at("delta").get<std::vector<double>>();
        for (const auto& k : s.at("stiffness_kn_mm")) // null marks an undefined constant
            r.stiffness.push_back(k.is_null() ? std::numeric_limits<double>::quiet_NaN()
                                              : k.get<double>());
        for (const auto& n : j.at("nodes")) {
            const std::size_t lvl = n.at("level").get<std::size_t>();
            if (r.epsilon.size() < lvl) {
                r.epsilon.resize(lvl);
                r.mu.resize(lvl);
            }
            r.epsilon[lvl - 1].push_back(n.at("epsilon").get<double>());
            r.mu[lvl - 1].push_back(n.at("mu").get<double>());
        }
        return r;
    } catch (const nlohmann::json::exception& e) {
        throw IoError(std::string("analysis schema mismatch: ") + e.what());
    }
}

// ---------------------------------------------------------------------------
// CSV tables

namespace detail {

inline std::string csv_number(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

} // namespace detail

inline std::string supports_csv(const AnalysisResult& r) {
    std::string out = "support,delta,stiffness_kn_per_mm,reaction_vertical_kn,reaction_horizontal_kn\n";
    for (std::size_t i = 0; i < r.delta.size(); ++i) {
        out += std::to_string(i + 1) + ',' + detail::csv_number(r.delta[i]) + ',' +
               detail::csv_number(r.stiffness[i]) + ',' + detail::csv_number(r.reaction_vertical[i]) +
               ',' + detail::csv_number(r.reaction_horizontal[i]) + '\n';
    }
    return out;
}

inline std::string nodes_csv(const Topology& topo, const AnalysisResult& r) {
    std::string out = "level,ordinal,x_mm,y_mm,epsilon,mu\n";
    for (const Node& n : topo.nodes) {
        const std::size_t lvl = static_cast<std::size_t>(n.id.level - 1);
        const std::size_t t = static_cast<std::size_t>(n.id.ordinal - 1);
        out += std::to_string(n.id.level) + ',' + std::to_string(n.id.ordinal) + ',' +
               detail::csv_number(n.x) + ',' + detail::csv_number(n.y) + ',' +
               detail::csv_number(r.epsilon[lvl][t]) + ',' + detail::csv_number(r.mu[lvl][t]) + '\n';
    }
    return out;
}

// ---------------------------------------------------------------------------
// FEM solution and comparison report

inline std::string solution_to_json(const FemSolution& sol) {
    JValue root = JValue::object();
    root["schema_version"] = kSchemaVersion;
    JValue disp = JValue::array();
    for (const auto& u : sol.displacement) {
        JValue ju = JValue::object();
        ju["ux_mm"] = u[0];
        ju["uy_mm"] = u[1];
        disp.push_back(std::move(ju));
    }
    root["displacements"] = std::move(disp);
    root["axial_forces_kn"] = JValue::from(sol.axial_force);
    JValue reactions = JValue::array();
    for (const auto& rr : sol.reaction) {
        JValue jr = JValue::object();
        jr["horizontal_kn"] = rr[0];
        jr["vertical_kn"] = rr[1];
        reactions.push_back(std::move(jr));
    }
    root["reactions"] = std::move(reactions);
    root["max_equilibrium_residual_kn"] = sol.max_equilibrium_residual;
    return root.dump();
}

inline std::string report_to_json(const ComparisonReport& report) {
    JValue root = JValue::object();
    root["schema_version"] = kSchemaVersion;
    root["pass"] = report.pass;
    JValue cats = JValue::array();
    for (const auto& c : report.categories) {
        JValue jc = JValue::object();
        jc["name"] = c.name;
        jc["max_abs"] = c.max_abs;
        jc["deviation"] = c.deviation;
        jc["tolerance"] = c.tolerance;
        jc["pass"] = c.pass;
        cats.push_back(std::move(jc));
    }
    root["categories"] = std::move(cats);
    return root.dump();
}

inline std::string report_to_text(const ComparisonReport& report) {
    std::string out;
    for (const auto& c : report.categories) {
        char line[160];
        std::snprintf(line, sizeof(line), "%-30s %-4s  deviation %.3e  (tol %.1e)\n", c.name.c_str(),
                      c.pass ? "PASS" : "FAIL", c.deviation, c.tolerance);
        out += line;
    }
    out += report.pass ? "verification: PASS\n" : "verification: FAIL\n";
    return out;
}

} // namespace qst

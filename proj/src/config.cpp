#include "dooc/config.hpp"

#include "dooc/errors.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <string>
#include <vector>

namespace dooc {

namespace {

using nlohmann::json;

void reject_unknown_keys(const json& obj, const std::set<std::string>& allowed,
                         const std::string& where) {
    for (const auto& [key, value] : obj.items()) {
        if (!allowed.count(key))
            throw ValidationError("config: unknown key '" + key + "' in " + where);
    }
}

double require_number(const json& obj, const std::string& key, const std::string& where) {
    if (!obj.contains(key) || !obj[key].is_number())
        throw ValidationError("config: " + where + " needs numeric '" + key + "'");
    return obj[key].get<double>();
}

Eigen::VectorXd to_vector(const json& arr, const std::string& where) {
    if (!arr.is_array()) throw ValidationError("config: " + where + " must be an array");
    Eigen::VectorXd v(arr.size());
    Eigen::Index k = 0;
    for (const auto& item : arr) {
        if (!item.is_number()) throw ValidationError("config: " + where + " must be numeric");
        v(k++) = item.get<double>();
    }
    return v;
}

json from_vector(const Eigen::VectorXd& v) {
    json arr = json::array();
    for (Eigen::Index k = 0; k < v.size(); ++k) arr.push_back(v(k));
    return arr;
}

json from_matrix(const Eigen::MatrixXd& m) {
    json rows = json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) rows.push_back(from_vector(m.row(i).transpose()));
    return rows;
}

Eigen::MatrixXd to_matrix(const json& arr, const std::string& where) {
    if (!arr.is_array() || arr.empty())
        throw ValidationError("config: " + where + " must be a nonempty array of rows");
    const auto rows = static_cast<Eigen::Index>(arr.size());
    Eigen::MatrixXd m;
    for (Eigen::Index i = 0; i < rows; ++i) {
        const Eigen::VectorXd row = to_vector(arr[static_cast<std::size_t>(i)], where);
        if (i == 0) m.resize(rows, row.size());
        if (row.size() != m.cols()) throw ValidationError("config: " + where + " rows differ");
        m.row(i) = row.transpose();
    }
    return m;
}

ControlMode parse_mode(const std::string& text) {
    if (text == "output_feedback") return ControlMode::OutputFeedback;
    if (text == "state_feedback") return ControlMode::StateFeedback;
    if (text == "coordinator_only") return ControlMode::CoordinatorOnly;
    throw ValidationError("config: unknown controller mode '" + text + "'");
}

std::string mode_name(ControlMode mode) {
    switch (mode) {
        case ControlMode::OutputFeedback: return "output_feedback";
        case ControlMode::StateFeedback: return "state_feedback";
        case ControlMode::CoordinatorOnly: return "coordinator_only";
    }
    return "output_feedback";
}

PlantFamily parse_family(const std::string& text) {
    if (text == "second_order_zero_dynamics") return PlantFamily::SecondOrderZeroDyn;
    if (text == "third_order_chain") return PlantFamily::ThirdOrderChain;
    throw ValidationError("config: unknown plant family '" + text + "'");
}

std::string family_name(PlantFamily family) {
    switch (family) {
        case PlantFamily::SecondOrderZeroDyn: return "second_order_zero_dynamics";
        case PlantFamily::ThirdOrderChain: return "third_order_chain";
        case PlantFamily::Custom: return "custom";
    }
    return "custom";
}

}  // namespace

Scenario load_scenario(const json& doc) {
    if (!doc.is_object()) throw ValidationError("config: scenario root must be an object");
    reject_unknown_keys(doc,
                        {"name", "seed", "graph", "costs", "coordinator", "exosystem", "plants",
                         "regulators", "observer", "controller", "integration"},
                        "scenario");

    Scenario scn;
    scn.name = doc.value("name", std::string("scenario"));
    if (doc.contains("seed")) {
        if (!doc["seed"].is_number_unsigned() && !doc["seed"].is_number_integer())
            throw ValidationError("config: seed must be an integer");
        scn.seed = doc["seed"].get<std::uint64_t>();
    }

    // graph
    if (!doc.contains("graph")) throw ValidationError("config: missing graph section");
    const json& graph = doc["graph"];
    reject_unknown_keys(graph, {"n", "edges"}, "graph");
    const int n = static_cast<int>(require_number(graph, "n", "graph"));
    std::vector<DirectedEdge> edges;
    if (graph.contains("edges")) {
        for (const auto& e : graph["edges"]) {
            reject_unknown_keys(e, {"from", "to", "weight"}, "graph.edges[]");
            DirectedEdge edge;
            edge.from = static_cast<int>(require_number(e, "from", "edge"));
            edge.to = static_cast<int>(require_number(e, "to", "edge"));
            edge.weight = e.contains("weight") ? e["weight"].get<double>() : 1.0;
            edges.push_back(edge);
        }
    }
    scn.graph = Digraph::from_edges(n, edges);

    // costs
    if (!doc.contains("costs")) throw ValidationError("config: missing costs section");
    for (const auto& c : doc["costs"]) {
        reject_unknown_keys(c, {"kind", "q", "b"}, "costs[]");
        if (c.value("kind", "") != "quadratic")
            throw ValidationError("config: only 'quadratic' costs are configurable");
        scn.costs.push_back(
            CostFunction::quadratic(require_number(c, "q", "cost"), require_number(c, "b", "cost")));
    }

    // coordinator
    if (!doc.contains("coordinator")) throw ValidationError("config: missing coordinator section");
    const json& coord = doc["coordinator"];
    reject_unknown_keys(coord, {"alpha1", "alpha2", "y_r0"}, "coordinator");
    scn.coordinator.alpha1 = coord.value("alpha1", 1.0);
    scn.coordinator.alpha2 = coord.value("alpha2", 1.0);
    if (!coord.contains("y_r0")) throw ValidationError("config: coordinator needs y_r0");
    scn.y_r0 = to_vector(coord["y_r0"], "coordinator.y_r0");

    // controller (holds the mode flag, so parse before the plant sections)
    ControlMode mode = ControlMode::OutputFeedback;
    if (doc.contains("controller")) {
        const json& ctl = doc["controller"];
        reject_unknown_keys(ctl, {"mode", "K", "delta", "g", "gamma"}, "controller");
        mode = parse_mode(ctl.value("mode", "output_feedback"));
        scn.controller.mode = mode;
        scn.controller.K = ctl.value("K", 1.0);
        scn.controller.delta = ctl.value("delta", 1e5);
        scn.controller.g = ctl.value("g", 1.0);
        if (ctl.contains("gamma") && ctl["gamma"].is_array()) {
            scn.controller.binomial_gamma = false;
            for (const auto& row : ctl["gamma"])
                scn.controller.gamma_per_agent.push_back(to_vector(row, "controller.gamma"));
        } else if (ctl.contains("gamma") && ctl["gamma"] != "binomial") {
            throw ValidationError("config: controller.gamma must be 'binomial' or per-agent arrays");
        }
    } else {
        throw ValidationError("config: missing controller section");
    }

    if (mode != ControlMode::CoordinatorOnly) {
        // exosystem
        if (!doc.contains("exosystem"))
            throw ValidationError("config: closed-loop scenarios need an exosystem section");
        const json& exo = doc["exosystem"];
        reject_unknown_keys(exo, {"theta", "amplitude", "v0"}, "exosystem");
        scn.exosystem = Exosystem::harmonic(require_number(exo, "theta", "exosystem"));
        if (exo.contains("v0")) scn.exosystem.v0 = to_vector(exo["v0"], "exosystem.v0");
        const double amplitude = exo.value("amplitude", 0.0);

        // plants
        if (!doc.contains("plants"))
            throw ValidationError("config: closed-loop scenarios need a plants section");
        int index = 0;
        for (const auto& p : doc["plants"]) {
            reject_unknown_keys(p, {"family", "p_bar", "b", "w", "z0", "x0", "z_star_s_coeff"},
                                "plants[]");
            if (!p.contains("family")) throw ValidationError("config: plant needs a family");
            AgentPlant plant;
            plant.family = parse_family(p["family"].get<std::string>());
            plant.n_chain = plant.family == PlantFamily::SecondOrderZeroDyn ? 2 : 3;
            plant.n_zero = plant.family == PlantFamily::SecondOrderZeroDyn ? 1 : 0;
            if (!p.contains("p_bar")) throw ValidationError("config: plant needs p_bar");
            const Eigen::VectorXd p_bar = to_vector(p["p_bar"], "plants[].p_bar");
            if (p_bar.size() != 3) throw ValidationError("config: p_bar needs three entries");
            plant.p_nominal = p_bar;
            plant.b = p.value("b", 1.0);
            plant.dist_amplitude = amplitude;
            plant.z_star_s_coeff = p.value("z_star_s_coeff", 0.0);

            if (!p.contains("w") || p["w"] == "seeded") {
                plant.w = sample_uncertainty(scn.seed, index, plant.p_nominal);
            } else if (p["w"] == "zero") {
                plant.w = zero_uncertainty(plant.p_nominal);
            } else {
                const Eigen::VectorXd w = to_vector(p["w"], "plants[].w");
                if (w.size() != 3) throw ValidationError("config: explicit w needs three entries");
                plant.w = w;
            }
            plant.validate();

            scn.z0.push_back(p.contains("z0") ? to_vector(p["z0"], "plants[].z0")
                                              : Eigen::VectorXd::Zero(plant.n_zero));
            scn.x0.push_back(p.contains("x0") ? to_vector(p["x0"], "plants[].x0")
                                              : Eigen::VectorXd::Zero(plant.n_chain));
            scn.plants.push_back(std::move(plant));
            ++index;
        }

        // regulators (optional per-agent overrides)
        scn.regulators.assign(scn.plants.size(), RegulatorOverride{});
        if (doc.contains("regulators")) {
            const json& regs = doc["regulators"];
            if (!regs.is_array() || regs.size() != scn.plants.size())
                throw ValidationError("config: regulators must list one entry per agent");
            for (std::size_t i = 0; i < regs.size(); ++i) {
                if (regs[i].is_null()) continue;
                reject_unknown_keys(regs[i], {"M", "N"}, "regulators[]");
                RegulatorOverride entry;
                entry.present = true;
                entry.M = to_matrix(regs[i]["M"], "regulators[].M");
                entry.N = to_vector(regs[i]["N"], "regulators[].N");
                scn.regulators[i] = std::move(entry);
            }
        }

        // observer
        if (!doc.contains("observer"))
            throw ValidationError("config: closed-loop scenarios need an observer section");
        const json& obs = doc["observer"];
        reject_unknown_keys(obs, {"h", "c"}, "observer");
        scn.observer.h = require_number(obs, "h", "observer");
        if (obs.contains("c") && obs["c"].is_array()) {
            scn.observer.binomial = false;
            for (const auto& row : obs["c"])
                scn.observer.c_per_agent.push_back(to_vector(row, "observer.c"));
        } else if (obs.contains("c") && obs["c"] != "binomial") {
            throw ValidationError("config: observer.c must be 'binomial' or per-agent arrays");
        }
    }

    // integration (defaults: dt 1e-4, horizon 100 s, record every 100 steps)
    if (doc.contains("integration")) {
        const json& integ = doc["integration"];
        reject_unknown_keys(integ, {"dt", "t_final", "record_stride"}, "integration");
        scn.integration.dt = integ.value("dt", 1e-4);
        scn.integration.t_final = integ.value("t_final", 100.0);
        scn.integration.record_stride = static_cast<int>(integ.value("record_stride", 100.0));
    }

    return scn;
}

Scenario load_scenario_file(const std::string& path) {
    std::ifstream file(path);
    if (!file) throw ValidationError("config: cannot open scenario file: " + path);
    json doc;
    try {
        doc = json::parse(file);
    } catch (const json::parse_error& err) {
        throw ValidationError("config: scenario JSON parse error: " + std::string(err.what()));
    }
    return load_scenario(doc);
}

nlohmann::json scenario_to_json(const Scenario& scn) {
    json doc;
    doc["name"] = scn.name;
    doc["seed"] = scn.seed;

    json edges = json::array();
    for (int i = 0; i < scn.graph.n; ++i) {
        for (int j = 0; j < scn.graph.n; ++j) {
            if (scn.graph.adjacency(i, j) > 0.0)
                edges.push_back({{"from", j + 1}, {"to", i + 1}, {"weight", scn.graph.adjacency(i, j)}});
        }
    }
    doc["graph"] = {{"n", scn.graph.n}, {"edges", edges}};

    json costs = json::array();
    for (const auto& c : scn.costs) {
        if (!c.is_quadratic())
            throw ValidationError("config: only quadratic costs serialize to JSON");
        costs.push_back({{"kind", "quadratic"}, {"q", c.quad_scale()}, {"b", c.quad_center()}});
    }
    doc["costs"] = costs;

    doc["coordinator"] = {{"alpha1", scn.coordinator.alpha1},
                          {"alpha2", scn.coordinator.alpha2},
                          {"y_r0", from_vector(scn.y_r0)}};

    json controller = {{"mode", mode_name(scn.controller.mode)}};
    if (scn.has_plants()) {
        controller["K"] = scn.controller.K;
        controller["delta"] = scn.controller.delta;
        controller["g"] = scn.controller.g;
        if (scn.controller.binomial_gamma) {
            controller["gamma"] = "binomial";
        } else {
            json rows = json::array();
            for (const auto& row : scn.controller.gamma_per_agent) rows.push_back(from_vector(row));
            controller["gamma"] = rows;
        }
    }
    doc["controller"] = controller;

    if (scn.has_plants()) {
        doc["exosystem"] = {{"theta", scn.exosystem.theta()},
                            {"amplitude",
                             scn.plants.empty() ? 0.0 : scn.plants.front().dist_amplitude},
                            {"v0", from_vector(scn.exosystem.v0)}};
        json plants = json::array();
        for (std::size_t i = 0; i < scn.plants.size(); ++i) {
            const auto& plant = scn.plants[i];
            json p = {{"family", family_name(plant.family)},
                      {"p_bar", from_vector(plant.p_nominal)},
                      {"b", plant.b},
                      {"w", from_vector(plant.w)},
                      {"x0", from_vector(scn.x0[i])}};
            if (plant.n_zero > 0) p["z0"] = from_vector(scn.z0[i]);
            if (plant.z_star_s_coeff != 0.0) p["z_star_s_coeff"] = plant.z_star_s_coeff;
            plants.push_back(p);
        }
        doc["plants"] = plants;

        json regulators = json::array();
        bool any_override = false;
        for (const auto& reg : scn.regulators) {
            if (reg.present) {
                regulators.push_back({{"M", from_matrix(reg.M)}, {"N", from_vector(reg.N)}});
                any_override = true;
            } else {
                regulators.push_back(nullptr);
            }
        }
        if (any_override) doc["regulators"] = regulators;

        json observer = {{"h", scn.observer.h}};
        if (scn.observer.binomial) {
            observer["c"] = "binomial";
        } else {
            json rows = json::array();
            for (const auto& row : scn.observer.c_per_agent) rows.push_back(from_vector(row));
            observer["c"] = rows;
        }
        doc["observer"] = observer;
    }

    doc["integration"] = {{"dt", scn.integration.dt},
                          {"t_final", scn.integration.t_final},
                          {"record_stride", scn.integration.record_stride}};
    return doc;
}

void apply_set_override(nlohmann::json& doc, const std::string& assignment) {
    const auto eq = assignment.find('=');
    if (eq == std::string::npos || eq == 0)
        throw ValidationError("override must look like path.to.key=value: " + assignment);
    const std::string path = assignment.substr(0, eq);
    const std::string raw = assignment.substr(eq + 1);

    json value;
    try {
        value = json::parse(raw);
    } catch (const json::parse_error&) {
        value = raw;  // unquoted strings like --set observer.c=binomial
    }

    json* node = &doc;
    std::size_t begin = 0;
    std::vector<std::string> segments;
    while (begin <= path.size()) {
        const auto dot = path.find('.', begin);
        segments.push_back(path.substr(begin, dot == std::string::npos ? dot : dot - begin));
        if (dot == std::string::npos) break;
        begin = dot + 1;
    }
    for (std::size_t k = 0; k < segments.size(); ++k) {
        const std::string& seg = segments[k];
        if (seg.empty()) throw ValidationError("override has an empty path segment: " + path);
        if (node->is_array()) {
            std::size_t idx = 0;
            try {
                idx = std::stoul(seg);
            } catch (...) {
                throw ValidationError("override indexes array with non-number: " + seg);
            }
            if (idx >= node->size())
                throw ValidationError("override index out of range: " + path);
            node = &(*node)[idx];
        } else if (node->is_object()) {
            if (!node->contains(seg))
                throw ValidationError("override references unknown key '" + seg + "' in " + path);
            node = &(*node)[seg];
        } else {
            throw ValidationError("override path descends into a scalar: " + path);
        }
    }
    *node = value;
}

nlohmann::json metrics_to_json(const MetricsReport& report) {
    json doc;
    doc["final_error_max"] = report.final_error_max;
    doc["rate_fit_slope"] = report.rate_fit_valid ? json(report.rate_fit_slope) : json(nullptr);
    doc["xi_rowsum_max_err"] = report.xi_rowsum_max_err;
    doc["xi_diag_min"] = report.xi_diag_min;
    doc["xi_final_vs_r_max_err"] = report.xi_final_vs_r_max_err;
    json agents = json::array();
    for (const auto& am : report.agents) {
        agents.push_back(
            {{"final_error", am.final_error},
             {"settling_time", std::isfinite(am.settling_time) ? json(am.settling_time) : json(nullptr)},
             {"sup_u", am.sup_u},
             {"im_residual_sup", am.im_residual_sup},
             {"u_star_sup", am.u_star_sup},
             {"im_residual_ratio", am.im_residual_ratio}});
    }
    doc["agents"] = agents;
    return doc;
}

nlohmann::json default_closed_loop_json() {
    json doc;
    doc["name"] = "five-agent-unbalanced";
    doc["seed"] = 0;
    doc["graph"] = {{"n", 5},
                    {"edges", json::array({{{"from", 3}, {"to", 1}},
                                           {{"from", 1}, {"to", 2}},
                                           {{"from", 2}, {"to", 3}},
                                           {{"from", 3}, {"to", 4}},
                                           {{"from", 4}, {"to", 5}},
                                           {{"from", 2}, {"to", 5}},
                                           {{"from", 5}, {"to", 1}}})}};
    json costs = json::array();
    for (int i = 1; i <= 5; ++i)
        costs.push_back({{"kind", "quadratic"}, {"q", 0.25}, {"b", static_cast<double>(i - 1)}});
    doc["costs"] = costs;
    doc["coordinator"] = {{"alpha1", 1.0}, {"alpha2", 1.0}, {"y_r0", {0.0, 1.0, 2.0, 3.0, 4.0}}};
    doc["exosystem"] = {{"theta", 0.8}, {"amplitude", 10.0}, {"v0", {0.0, 1.0}}};
    // Input gains and saturation bound are sized against the fixed pair
    // (K = 4e4, h = 100): the loop bandwidth b*K must stay well below the
    // observer bandwidth (including the h = 25 sweep point), while b*delta
    // must dominate the worst transient drift term of the cubic plants.
    doc["plants"] = json::array(
        {{{"family", "second_order_zero_dynamics"},
          {"p_bar", {1.0, 1.0, 1.0}},
          {"b", 0.001},
          {"w", "seeded"},
          {"z0", {0.2}},
          {"x0", {0.3, -0.1}}},
         {{"family", "second_order_zero_dynamics"},
          {"p_bar", {2.0, 2.0, 2.0}},
          {"b", 0.001},
          {"w", "seeded"},
          {"z0", {-0.3}},
          {"x0", {-0.2, 0.4}}},
         {{"family", "third_order_chain"},
          {"p_bar", {3.0, 3.0, 3.0}},
          {"b", 0.001},
          {"w", "seeded"},
          {"x0", {0.5, -0.3, 0.2}}},
         {{"family", "third_order_chain"},
          {"p_bar", {4.0, 4.0, 4.0}},
          {"b", 0.001},
          {"w", "seeded"},
          {"x0", {-0.4, 0.1, -0.2}}},
         {{"family", "third_order_chain"},
          {"p_bar", {5.0, 5.0, 5.0}},
          {"b", 0.001},
          {"w", "seeded"},
          {"x0", {0.1, 0.2, -0.3}}}});
    // Observer poles at -4 before h-scaling keep the estimation-error
    // bandwidth above the feedback loop at every swept h.
    doc["observer"] = {{"h", 100.0},
                       {"c", json::array({{16.0, 8.0},
                                          {16.0, 8.0},
                                          {64.0, 48.0, 12.0},
                                          {64.0, 48.0, 12.0},
                                          {64.0, 48.0, 12.0}})}};
    doc["controller"] = {{"mode", "output_feedback"},
                         {"K", 4.0e4},
                         {"delta", 1.0e6},
                         {"g", 1.0},
                         {"gamma", "binomial"}};
    doc["integration"] = {{"dt", 1.0e-4}, {"t_final", 100.0}, {"record_stride", 100}};
    return doc;
}

nlohmann::json default_coordinator_json() {
    json doc;
    doc["name"] = "five-agent-coordinator-only";
    doc["seed"] = 0;
    doc["graph"] = default_closed_loop_json()["graph"];
    doc["costs"] = default_closed_loop_json()["costs"];
    doc["coordinator"] = {{"alpha1", 1.0}, {"alpha2", 1.0}, {"y_r0", {0.0, 1.0, 2.0, 3.0, 4.0}}};
    doc["controller"] = {{"mode", "coordinator_only"}};
    doc["integration"] = {{"dt", 1.0e-3}, {"t_final", 200.0}, {"record_stride", 10}};
    return doc;
}

}  // namespace dooc

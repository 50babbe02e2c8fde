#include "ceg/report_json.hpp"

namespace ceg {

using nlohmann::json;

json to_json(const Distribution& d) {
    json out = json::object();
    for (const auto& [value, p] : d) out[value] = p ? json(to_string(*p)) : json(nullptr);
    return out;
}

json to_json(const Check& c) {
    json out{{"name", c.name}, {"passed", c.passed}};
    if (!c.passed) out["witness"] = c.witness;
    return out;
}

json to_json(const std::vector<Check>& checks) {
    json out = json::array();
    for (const auto& c : checks) out.push_back(to_json(c));
    return out;
}

json positions_json(const ChainEventGraph& g, const std::vector<VertexIndex>& W) {
    json out = json::array();
    for (VertexIndex w : W) out.push_back(g.display(w));
    return out;
}

json to_json(const ActiveBackgroundSplit& s, const ChainEventGraph& g) {
    json out{{"active", positions_json(g, s.active)},
             {"background", positions_json(g, s.background)},
             {"levels", s.levels},
             {"modifiable", positions_json(g, s.modifiable)}};
    out["common_active_factor"] = s.common_active_factor ? json(to_string(*s.common_active_factor)) : json(nullptr);
    json mass = json::object();
    for (const auto& [w, p] : s.background_mass) mass[g.display(w)] = to_string(p);
    out["background_mass"] = mass;
    return out;
}

json to_json(const AmenabilityReport& r, const ChainEventGraph& g) {
    json out{{"amenable", r.amenable}, {"checks", to_json(r.checks)}};
    if (r.idle_split) out["idle_split"] = to_json(*r.idle_split, g);
    return out;
}

json to_json(const IdentificationReport& r, const ChainEventGraph& g) {
    json terms = json::array();
    for (const auto& t : r.terms)
        terms.push_back({{"z", t.z},
                         {"W_z", positions_json(g, t.wz)},
                         {"W_of_z", positions_json(g, t.w_of_z)},
                         {"p_z", to_string(t.p_z)},
                         {"conditional", to_json(t.conditional)}});
    return json{{"target", {{"W", positions_json(g, r.W)}, {"Y", r.y_name}, {"Z", r.z_name}}},
                {"conditions", to_json(r.conditions)},
                {"terms", terms},
                {"identified", r.identified},
                {"formula_value", to_json(r.formula)},
                {"oracle_value", to_json(r.oracle)},
                {"agree", r.agree}};
}

json document(const std::string& command, json body) {
    json out{{"schema", json_schema}, {"command", command}};
    for (auto& [k, v] : body.items()) out[k] = v;
    return out;
}

}  // namespace ceg

#pragma once

#include <sstream>
#include <string>

#include <json.hpp>

#include "scaleplan/pddl.hpp"

namespace scaleplan {

using nlohmann::json;

// Canonical PDDL form: 2-space indent, one literal per line inside (and ...).
// Display casing is used for every identifier so reparsing reproduces the
// same structures bit for bit.

namespace detail {

inline std::string fmt_literal(const Literal& lit, const Domain& d) {
    std::string s = "(" + d.display_of(lit.pred);
    for (const auto& t : lit.args) s += " " + t.name;
    return s + ")";
}

inline std::string fmt_atom(const GroundAtom& a, const Domain& d, const ProblemInstance& inst) {
    std::string s = "(" + d.display_of(a.pred);
    for (const auto& arg : a.args) s += " " + inst.display_of(arg);
    return s + ")";
}

inline void write_conjunction(std::ostringstream& out, const std::string& indent,
                              const std::vector<std::string>& lines) {
    if (lines.empty()) {
        out << "(and)";
        return;
    }
    out << "(and\n";
    for (size_t i = 0; i < lines.size(); ++i) {
        out << indent << "  " << lines[i];
        out << (i + 1 == lines.size() ? ")" : "\n");
    }
}

}  // namespace detail

inline std::string serialize_domain(const Domain& d) {
    std::ostringstream out;
    out << "(define (domain " << d.display_of(d.name) << ")\n";
    out << "  (:requirements :strips :typing)\n";

    // Skip the implicit root unless the source declared a hierarchy onto it.
    std::vector<std::string> type_lines;
    for (const auto& t : d.types.declared) {
        auto it = d.types.parent.find(t);
        if (t == "object" && it == d.types.parent.end()) continue;
        std::string line = d.display_of(t);
        if (it != d.types.parent.end()) line += " - " + d.display_of(it->second);
        type_lines.push_back(line);
    }
    if (!type_lines.empty()) {
        out << "  (:types\n";
        for (size_t i = 0; i < type_lines.size(); ++i)
            out << "    " << type_lines[i] << (i + 1 == type_lines.size() ? ")\n" : "\n");
    }

    if (!d.predicates.empty()) {
        out << "  (:predicates\n";
        for (size_t i = 0; i < d.predicates.size(); ++i) {
            const auto& p = d.predicates[i];
            out << "    (" << d.display_of(p.name);
            for (size_t j = 0; j < p.param_types.size(); ++j) {
                std::string var = j < p.param_names.size() ? p.param_names[j] : "?x" + std::to_string(j);
                out << " " << var << " - " << d.display_of(p.param_types[j]);
            }
            out << ")" << (i + 1 == d.predicates.size() ? ")\n" : "\n");
        }
    }

    for (const auto& a : d.actions) {
        out << "  (:action " << d.display_of(a.name) << "\n";
        out << "    :parameters (";
        for (size_t i = 0; i < a.params.size(); ++i) {
            if (i) out << " ";
            out << a.params[i].name << " - " << d.display_of(a.params[i].type);
        }
        out << ")\n";

        std::vector<std::string> pre_lines;
        for (const auto& l : a.preconditions) pre_lines.push_back(detail::fmt_literal(l, d));
        out << "    :precondition ";
        detail::write_conjunction(out, "    ", pre_lines);
        out << "\n";

        std::vector<std::string> eff_lines;
        for (const auto& l : a.add_effects) eff_lines.push_back(detail::fmt_literal(l, d));
        for (const auto& l : a.del_effects) eff_lines.push_back("(not " + detail::fmt_literal(l, d) + ")");
        out << "    :effect ";
        detail::write_conjunction(out, "    ", eff_lines);
        out << ")\n";
    }
    out << ")\n";
    return out.str();
}

inline std::string serialize_problem(const ProblemInstance& inst, const Domain& d) {
    std::ostringstream out;
    out << "(define (problem " << inst.display_of(inst.name) << ")\n";
    out << "  (:domain " << d.display_of(d.name) << ")\n";
    if (!inst.objects.empty()) {
        out << "  (:objects\n";
        for (size_t i = 0; i < inst.objects.size(); ++i) {
            out << "    " << inst.display_of(inst.objects[i].first) << " - "
                << d.display_of(inst.objects[i].second)
                << (i + 1 == inst.objects.size() ? ")\n" : "\n");
        }
    }
    out << "  (:init";
    if (inst.init.empty()) {
        out << ")\n";
    } else {
        out << "\n";
        for (size_t i = 0; i < inst.init.size(); ++i)
            out << "    " << detail::fmt_atom(inst.init[i], d, inst)
                << (i + 1 == inst.init.size() ? ")\n" : "\n");
    }
    out << "  (:goal ";
    std::vector<std::string> goal_lines;
    for (const auto& a : inst.goal) goal_lines.push_back(detail::fmt_atom(a, d, inst));
    detail::write_conjunction(out, "  ", goal_lines);
    out << ")\n)\n";
    return out.str();
}

// --- JSON mirrors -----------------------------------------------------------

inline json literal_to_json(const Literal& l) {
    json args = json::array();
    for (const auto& t : l.args) args.push_back({{"name", t.name}, {"type", t.type}});
    return {{"pred", l.pred}, {"args", args}};
}

inline json atom_to_json(const GroundAtom& a) {
    return {{"pred", a.pred}, {"args", a.args}};
}

inline GroundAtom atom_from_json(const json& j) {
    GroundAtom a;
    a.pred = j.at("pred").get<std::string>();
    for (const auto& arg : j.at("args")) a.args.push_back(arg.get<std::string>());
    return a;
}

inline json domain_to_json(const Domain& d) {
    json types = json::array();
    for (const auto& t : d.types.declared) {
        auto it = d.types.parent.find(t);
        types.push_back({{"name", t}, {"parent", it == d.types.parent.end() ? json() : json(it->second)}});
    }
    json preds = json::array();
    for (const auto& p : d.predicates) preds.push_back({{"name", p.name}, {"param_types", p.param_types}});
    json actions = json::array();
    for (const auto& a : d.actions) {
        json params = json::array();
        for (const auto& t : a.params) params.push_back({{"name", t.name}, {"type", t.type}});
        json pre = json::array(), add = json::array(), del = json::array();
        for (const auto& l : a.preconditions) pre.push_back(literal_to_json(l));
        for (const auto& l : a.add_effects) add.push_back(literal_to_json(l));
        for (const auto& l : a.del_effects) del.push_back(literal_to_json(l));
        actions.push_back({{"name", a.name},
                           {"params", params},
                           {"preconditions", pre},
                           {"add_effects", add},
                           {"del_effects", del}});
    }
    return {{"name", d.name}, {"types", types}, {"predicates", preds}, {"actions", actions}};
}

inline json problem_to_json(const ProblemInstance& inst) {
    json objects = json::object();
    for (const auto& [n, t] : inst.objects) objects[n] = t;
    json init = json::array(), goal = json::array();
    for (const auto& a : inst.init) init.push_back(atom_to_json(a));
    for (const auto& a : inst.goal) goal.push_back(atom_to_json(a));
    json j = {{"name", inst.name},
              {"domain", inst.domain_name},
              {"objects", objects},
              {"init", init},
              {"goal", goal}};
    if (inst.task_text) j["task"] = *inst.task_text;
    return j;
}

inline json plan_to_json(const Plan& plan) {
    json steps = json::array();
    for (const auto& s : plan.steps) steps.push_back({{"action", s.schema}, {"args", s.binding}});
    return {{"steps", steps}};
}

inline Plan plan_from_json(const json& j) {
    Plan p;
    for (const auto& s : j.at("steps")) {
        GroundAction ga;
        ga.schema = s.at("action").get<std::string>();
        for (const auto& a : s.at("args")) ga.binding.push_back(a.get<std::string>());
        p.steps.push_back(std::move(ga));
    }
    return p;
}

}  // namespace scaleplan

#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "scaleplan/errors.hpp"

namespace scaleplan {

// Typed STRIPS vocabulary. All identifiers are stored lower-cased; the
// Domain/ProblemInstance keep a display map with the casing first seen in
// the source so output can reproduce it.

inline std::string to_lower(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

class TypeHierarchy {
  public:
    // Declaration order of the types listed in (:types ...). Parents that
    // were never listed on their own are appended when first referenced.
    std::vector<std::string> declared;
    std::unordered_map<std::string, std::string> parent;  // declared edges only

    bool contains(const std::string& t) const {
        return std::find(declared.begin(), declared.end(), t) != declared.end();
    }

    void add(const std::string& t, const std::string& super = "") {
        if (!contains(t)) declared.push_back(t);
        if (!super.empty()) {
            if (!contains(super)) declared.push_back(super);
            parent[t] = super;
        }
    }

    // Reflexive-transitive closure over declared parent edges. Types listed
    // without a parent are roots of their own tree; they are conceptually
    // children of the universal "object" root but deliberately not
    // inter-assignable (a robot never satisfies an `object` parameter unless
    // the domain says `robot - object`).
    bool is_subtype(const std::string& sub, const std::string& super) const {
        std::string cur = sub;
        for (size_t hops = 0; hops <= parent.size(); ++hops) {
            if (cur == super) return true;
            auto it = parent.find(cur);
            if (it == parent.end()) return false;
            cur = it->second;
        }
        return false;
    }

    bool unifiable(const std::string& a, const std::string& b) const {
        return is_subtype(a, b) || is_subtype(b, a);
    }

    bool acyclic() const {
        for (const auto& t : declared) {
            std::string cur = t;
            size_t hops = 0;
            while (true) {
                auto it = parent.find(cur);
                if (it == parent.end()) break;
                cur = it->second;
                if (++hops > parent.size()) return false;
            }
        }
        return true;
    }

    bool operator==(const TypeHierarchy&) const = default;
};

struct PredicateSignature {
    std::string name;
    std::vector<std::string> param_types;
    std::vector<std::string> param_names;  // for serialization only

    size_t arity() const { return param_types.size(); }
    bool operator==(const PredicateSignature&) const = default;
};

// A variable (leading '?') or constant together with its resolved type.
struct Term {
    std::string name;
    std::string type;

    bool is_variable() const { return !name.empty() && name[0] == '?'; }
    bool operator==(const Term&) const = default;
};

struct Literal {
    std::string pred;
    std::vector<Term> args;

    bool operator==(const Literal&) const = default;

    std::string str() const {
        std::string s = pred + "(";
        for (size_t i = 0; i < args.size(); ++i) {
            if (i) s += ",";
            s += args[i].name;
        }
        return s + ")";
    }
};

struct ActionSchema {
    std::string name;
    std::vector<Term> params;
    std::vector<Literal> preconditions;  // positive conjunction
    std::vector<Literal> add_effects;
    std::vector<Literal> del_effects;

    size_t arity() const { return params.size(); }

    const Term* find_param(const std::string& var) const {
        for (const auto& p : params)
            if (p.name == var) return &p;
        return nullptr;
    }

    bool operator==(const ActionSchema&) const = default;
};

struct Domain {
    std::string name;
    TypeHierarchy types;
    std::vector<PredicateSignature> predicates;
    std::vector<ActionSchema> actions;
    std::unordered_map<std::string, std::string> display;  // canon -> original casing

    const PredicateSignature* find_predicate(const std::string& n) const {
        for (const auto& p : predicates)
            if (p.name == n) return &p;
        return nullptr;
    }

    const ActionSchema* find_action(const std::string& n) const {
        for (const auto& a : actions)
            if (a.name == n) return &a;
        return nullptr;
    }

    std::string display_of(const std::string& canon) const {
        auto it = display.find(canon);
        return it == display.end() ? canon : it->second;
    }

    // display casing is presentation metadata, not structure
    bool operator==(const Domain& o) const {
        return name == o.name && types == o.types && predicates == o.predicates &&
               actions == o.actions;
    }
};

struct GroundAtom {
    std::string pred;
    std::vector<std::string> args;

    auto operator<=>(const GroundAtom&) const = default;

    std::string str() const {
        std::string s = pred + "(";
        for (size_t i = 0; i < args.size(); ++i) {
            if (i) s += ",";
            s += args[i];
        }
        return s + ")";
    }
};

struct GroundAtomHash {
    size_t operator()(const GroundAtom& a) const {
        size_t h = std::hash<std::string>{}(a.pred);
        for (const auto& arg : a.args)
            h ^= std::hash<std::string>{}(arg) + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
        return h;
    }
};

struct ProblemInstance {
    std::string name;
    std::string domain_name;
    std::vector<std::pair<std::string, std::string>> objects;  // (name, type), declaration order
    std::vector<GroundAtom> init;
    std::vector<GroundAtom> goal;
    std::optional<std::string> task_text;
    std::unordered_map<std::string, std::string> display;

    const std::string* object_type(const std::string& obj) const {
        for (const auto& [n, t] : objects)
            if (n == obj) return &t;
        return nullptr;
    }

    bool has_object(const std::string& obj) const { return object_type(obj) != nullptr; }

    std::string display_of(const std::string& canon) const {
        auto it = display.find(canon);
        return it == display.end() ? canon : it->second;
    }

    bool operator==(const ProblemInstance& o) const {
        return name == o.name && domain_name == o.domain_name && objects == o.objects &&
               init == o.init && goal == o.goal && task_text == o.task_text;
    }
};

struct GroundAction {
    std::string schema;
    std::vector<std::string> binding;

    auto operator<=>(const GroundAction&) const = default;

    std::string str() const {
        std::string s = schema + "(";
        for (size_t i = 0; i < binding.size(); ++i) {
            if (i) s += ",";
            s += binding[i];
        }
        return s + ")";
    }
};

// Closed-world state: a sorted, duplicate-free vector of ground atoms.
class State {
  public:
    State() = default;
    explicit State(std::vector<GroundAtom> atoms) : atoms_(std::move(atoms)) { normalize(); }

    const std::vector<GroundAtom>& atoms() const { return atoms_; }

    bool contains(const GroundAtom& a) const {
        return std::binary_search(atoms_.begin(), atoms_.end(), a);
    }

    bool superset_of(const std::vector<GroundAtom>& atoms) const {
        for (const auto& a : atoms)
            if (!contains(a)) return false;
        return true;
    }

    void insert(const GroundAtom& a) {
        auto it = std::lower_bound(atoms_.begin(), atoms_.end(), a);
        if (it == atoms_.end() || *it != a) atoms_.insert(it, a);
    }

    void erase(const GroundAtom& a) {
        auto it = std::lower_bound(atoms_.begin(), atoms_.end(), a);
        if (it != atoms_.end() && *it == a) atoms_.erase(it);
    }

    size_t size() const { return atoms_.size(); }

    bool operator==(const State&) const = default;

  private:
    void normalize() {
        std::sort(atoms_.begin(), atoms_.end());
        atoms_.erase(std::unique(atoms_.begin(), atoms_.end()), atoms_.end());
    }

    std::vector<GroundAtom> atoms_;
};

struct Plan {
    std::vector<GroundAction> steps;

    size_t length() const { return steps.size(); }
    bool operator==(const Plan&) const = default;
};

// Substitute a schema literal's variables using the positional binding.
inline GroundAtom bind_literal(const Literal& lit, const ActionSchema& schema,
                               const std::vector<std::string>& binding) {
    GroundAtom out;
    out.pred = lit.pred;
    out.args.reserve(lit.args.size());
    for (const auto& term : lit.args) {
        if (!term.is_variable()) {
            out.args.push_back(term.name);
            continue;
        }
        bool found = false;
        for (size_t i = 0; i < schema.params.size(); ++i) {
            if (schema.params[i].name == term.name) {
                out.args.push_back(binding.at(i));
                found = true;
                break;
            }
        }
        if (!found) throw InternalError("unbound variable " + term.name + " in " + schema.name);
    }
    return out;
}

}  // namespace scaleplan

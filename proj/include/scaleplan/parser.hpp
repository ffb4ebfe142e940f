#pragma once

#include <cctype>
#include <string>
#include <string_view>
#include <vector>

#include "scaleplan/pddl.hpp"

namespace scaleplan {

// Minimal s-expression reader for the :strips + :typing PDDL fragment.
// `;` starts a comment running to end of line.

namespace detail {

struct Sexp {
    bool is_list = false;
    std::string atom;  // original casing
    std::vector<Sexp> items;
    SourcePos pos;

    const std::string lowered() const { return to_lower(atom); }
};

class Lexer {
  public:
    explicit Lexer(std::string_view text) : text_(text) {}

    struct Token {
        enum Kind { LParen, RParen, Symbol, End } kind;
        std::string text;
        SourcePos pos;
    };

    Token next() {
        skip_ws();
        Token t;
        t.pos = pos_;
        if (i_ >= text_.size()) {
            t.kind = Token::End;
            return t;
        }
        char c = text_[i_];
        if (c == '(') {
            advance();
            t.kind = Token::LParen;
            t.text = "(";
            return t;
        }
        if (c == ')') {
            advance();
            t.kind = Token::RParen;
            t.text = ")";
            return t;
        }
        t.kind = Token::Symbol;
        while (i_ < text_.size() && !std::isspace(static_cast<unsigned char>(text_[i_])) &&
               text_[i_] != '(' && text_[i_] != ')' && text_[i_] != ';') {
            t.text += text_[i_];
            advance();
        }
        return t;
    }

  private:
    void advance() {
        if (text_[i_] == '\n') {
            ++pos_.line;
            pos_.col = 1;
        } else {
            ++pos_.col;
        }
        ++i_;
    }

    void skip_ws() {
        while (i_ < text_.size()) {
            char c = text_[i_];
            if (c == ';') {
                while (i_ < text_.size() && text_[i_] != '\n') advance();
            } else if (std::isspace(static_cast<unsigned char>(c))) {
                advance();
            } else {
                break;
            }
        }
    }

    std::string_view text_;
    size_t i_ = 0;
    SourcePos pos_;
};

inline Sexp read_sexp_from(Lexer& lex, const Lexer::Token& tok);

inline Sexp read_sexp(Lexer& lex) {
    auto tok = lex.next();
    return read_sexp_from(lex, tok);
}

inline Sexp read_list(Lexer& lex, SourcePos open_pos) {
    Sexp s;
    s.is_list = true;
    s.pos = open_pos;
    while (true) {
        auto tok = lex.next();
        if (tok.kind == Lexer::Token::RParen) return s;
        if (tok.kind == Lexer::Token::End) throw SyntaxError(tok.pos, "')'", "end of input");
        s.items.push_back(read_sexp_from(lex, tok));
    }
}

inline Sexp read_sexp_from(Lexer& lex, const Lexer::Token& tok) {
    switch (tok.kind) {
        case Lexer::Token::LParen:
            return read_list(lex, tok.pos);
        case Lexer::Token::Symbol: {
            Sexp s;
            s.atom = tok.text;
            s.pos = tok.pos;
            return s;
        }
        case Lexer::Token::RParen:
            throw SyntaxError(tok.pos, "atom or '('", "')'");
        case Lexer::Token::End:
            throw SyntaxError(tok.pos, "expression", "end of input");
    }
    throw InternalError("unreachable token kind");
}

inline Sexp read_top(std::string_view text) {
    Lexer lex(text);
    Sexp top = read_sexp(lex);
    auto trailing = lex.next();
    if (trailing.kind != Lexer::Token::End)
        throw SyntaxError(trailing.pos, "end of input", trailing.text);
    if (!top.is_list) throw SyntaxError(top.pos, "'('", top.atom);
    return top;
}

// Typed list: name... [- type] name... [- type] ...; names without a trailing
// type marker get `fallback`.
struct TypedName {
    std::string name;     // lowercased
    std::string display;  // original casing
    std::string type;     // lowercased, may equal fallback
    SourcePos pos;
};

inline std::vector<TypedName> parse_typed_list(const std::vector<Sexp>& items, size_t begin,
                                               const std::string& fallback) {
    std::vector<TypedName> out;
    std::vector<size_t> pending;
    for (size_t i = begin; i < items.size(); ++i) {
        const auto& it = items[i];
        if (it.is_list) throw SyntaxError(it.pos, "name", "'('");
        if (it.atom == "-") {
            if (i + 1 >= items.size()) throw SyntaxError(it.pos, "type name", "end of list");
            const auto& ty = items[++i];
            if (ty.is_list) throw SyntaxError(ty.pos, "type name", "'('");
            for (size_t idx : pending) out[idx].type = ty.lowered();
            pending.clear();
        } else {
            TypedName tn;
            tn.name = it.lowered();
            tn.display = it.atom;
            tn.type = fallback;
            tn.pos = it.pos;
            pending.push_back(out.size());
            out.push_back(tn);
        }
    }
    return out;
}

inline void record_display(std::unordered_map<std::string, std::string>& map,
                           const std::string& canon, const std::string& original) {
    map.emplace(canon, original);
}

inline void check_section_keyword(const Sexp& s, const char* what) {
    if (!s.is_list || s.items.empty() || s.items[0].is_list)
        throw SyntaxError(s.pos, what, "malformed section");
}

// Reject anything outside positive conjunctive STRIPS, naming the construct.
inline void reject_formula_keyword(const Sexp& s, const std::string& head) {
    static const char* known[] = {"or",     "imply", "exists", "forall",
                                  "when",   "=",     ">=",     "<=",
                                  "increase", "decrease", "assign"};
    for (const char* k : known)
        if (head == k) throw UnsupportedFeature(head, s.pos);
}

}  // namespace detail

// --- domain parsing ---------------------------------------------------------

namespace detail {

inline Literal parse_literal(const Sexp& s, const Domain& domain, const ActionSchema& schema) {
    if (!s.is_list || s.items.empty() || s.items[0].is_list)
        throw SyntaxError(s.pos, "(predicate args...)", "malformed atom");
    const std::string head = s.items[0].lowered();
    reject_formula_keyword(s, head);
    const PredicateSignature* sig = domain.find_predicate(head);
    if (!sig) throw TypeCheckError("undeclared predicate '" + head + "'");
    if (s.items.size() - 1 != sig->arity())
        throw TypeCheckError("predicate '" + head + "' expects " + std::to_string(sig->arity()) +
                             " arguments, got " + std::to_string(s.items.size() - 1));
    Literal lit;
    lit.pred = head;
    for (size_t i = 1; i < s.items.size(); ++i) {
        const auto& arg = s.items[i];
        if (arg.is_list) throw SyntaxError(arg.pos, "term", "'('");
        std::string nm = arg.lowered();
        if (nm.empty() || nm[0] != '?')
            throw UnsupportedFeature("constants in action bodies (" + nm + ")", arg.pos);
        const Term* param = schema.find_param(nm);
        if (!param)
            throw TypeCheckError("variable " + nm + " in action '" + schema.name +
                                 "' does not appear in :parameters");
        if (!domain.types.unifiable(param->type, sig->param_types[i - 1]))
            throw TypeCheckError("argument " + std::to_string(i - 1) + " of '" + head + "' in action '" +
                                 schema.name + "': type " + param->type + " does not fit " +
                                 sig->param_types[i - 1]);
        lit.args.push_back(Term{nm, param->type});
    }
    return lit;
}

// A conjunction body: (and lit...) | lit | (and). `allow_not` routes negated
// literals to `neg` instead of erroring.
inline void parse_conjunction(const Sexp& s, const Domain& domain, const ActionSchema& schema,
                              bool allow_not, std::vector<Literal>& pos, std::vector<Literal>* neg) {
    if (!s.is_list || (!s.items.empty() && s.items[0].is_list))
        throw SyntaxError(s.pos, "(and ...) or atom", "malformed formula");
    if (s.items.empty()) return;  // () treated as empty conjunction
    const std::string head = s.items[0].lowered();
    if (head == "and") {
        for (size_t i = 1; i < s.items.size(); ++i)
            parse_conjunction(s.items[i], domain, schema, allow_not, pos, neg);
        return;
    }
    if (head == "not") {
        if (!allow_not) throw UnsupportedFeature("negative precondition", s.pos);
        if (s.items.size() != 2) throw SyntaxError(s.pos, "(not atom)", "malformed negation");
        neg->push_back(parse_literal(s.items[1], domain, schema));
        return;
    }
    reject_formula_keyword(s, head);
    pos.push_back(parse_literal(s, domain, schema));
}

inline ActionSchema parse_action(const Sexp& s, Domain& domain) {
    ActionSchema schema;
    if (s.items.size() < 2 || s.items[1].is_list)
        throw SyntaxError(s.pos, "action name", "malformed :action");
    schema.name = s.items[1].lowered();
    record_display(domain.display, schema.name, s.items[1].atom);

    size_t i = 2;
    const Sexp* pre = nullptr;
    const Sexp* eff = nullptr;
    while (i < s.items.size()) {
        if (s.items[i].is_list || s.items[i].lowered().empty() || s.items[i].atom[0] != ':')
            throw SyntaxError(s.items[i].pos, ":parameters/:precondition/:effect", "stray form");
        const std::string key = s.items[i].lowered();
        if (i + 1 >= s.items.size()) throw SyntaxError(s.items[i].pos, "value after " + key, "end of action");
        const Sexp& val = s.items[i + 1];
        if (key == ":parameters") {
            if (!val.is_list) throw SyntaxError(val.pos, "parameter list", val.atom);
            for (const auto& tn : parse_typed_list(val.items, 0, "object")) {
                if (tn.name.empty() || tn.name[0] != '?')
                    throw SyntaxError(tn.pos, "?variable", tn.name);
                if (!domain.types.contains(tn.type))
                    throw TypeCheckError("action '" + schema.name + "': undeclared type '" + tn.type + "'");
                if (schema.find_param(tn.name))
                    throw TypeCheckError("action '" + schema.name + "': duplicate parameter " + tn.name);
                schema.params.push_back(Term{tn.name, tn.type});
            }
        } else if (key == ":precondition") {
            pre = &val;
        } else if (key == ":effect") {
            eff = &val;
        } else {
            throw UnsupportedFeature(key, s.items[i].pos);
        }
        i += 2;
    }
    if (pre) parse_conjunction(*pre, domain, schema, false, schema.preconditions, nullptr);
    if (eff) parse_conjunction(*eff, domain, schema, true, schema.add_effects, &schema.del_effects);

    for (const auto& add : schema.add_effects)
        for (const auto& del : schema.del_effects)
            if (add == del)
                throw TypeCheckError("action '" + schema.name + "': literal " + add.str() +
                                     " is both an add- and a delete-effect");
    return schema;
}

}  // namespace detail

inline Domain parse_domain(std::string_view text) {
    using namespace detail;
    Sexp top = read_top(text);
    if (top.items.empty() || top.items[0].lowered() != "define")
        throw SyntaxError(top.pos, "(define ...)", top.items.empty() ? "()" : top.items[0].atom);
    if (top.items.size() < 2 || !top.items[1].is_list || top.items[1].items.size() != 2 ||
        top.items[1].items[0].lowered() != "domain")
        throw SyntaxError(top.pos, "(domain name)", "malformed header");

    Domain domain;
    domain.name = top.items[1].items[1].lowered();
    record_display(domain.display, domain.name, top.items[1].items[1].atom);
    domain.types.add("object");

    for (size_t i = 2; i < top.items.size(); ++i) {
        const Sexp& sec = top.items[i];
        check_section_keyword(sec, "domain section");
        const std::string key = sec.items[0].lowered();
        if (key == ":requirements") {
            for (size_t j = 1; j < sec.items.size(); ++j) {
                const std::string req = sec.items[j].lowered();
                if (req != ":strips" && req != ":typing") throw UnsupportedFeature(req, sec.items[j].pos);
            }
        } else if (key == ":types") {
            for (const auto& tn : parse_typed_list(sec.items, 1, "")) {
                domain.types.add(tn.name, tn.type);
                record_display(domain.display, tn.name, tn.display);
            }
            if (!domain.types.acyclic()) throw TypeCheckError("type hierarchy contains a cycle");
        } else if (key == ":predicates") {
            for (size_t j = 1; j < sec.items.size(); ++j) {
                const Sexp& p = sec.items[j];
                if (!p.is_list || p.items.empty() || p.items[0].is_list)
                    throw SyntaxError(p.pos, "(name ?v - type ...)", "malformed predicate");
                PredicateSignature sig;
                sig.name = p.items[0].lowered();
                record_display(domain.display, sig.name, p.items[0].atom);
                if (domain.find_predicate(sig.name))
                    throw TypeCheckError("predicate '" + sig.name + "' declared twice");
                for (const auto& tn : parse_typed_list(p.items, 1, "object")) {
                    if (tn.name.empty() || tn.name[0] != '?') throw SyntaxError(tn.pos, "?variable", tn.name);
                    if (!domain.types.contains(tn.type))
                        throw TypeCheckError("predicate '" + sig.name + "': undeclared type '" + tn.type + "'");
                    sig.param_types.push_back(tn.type);
                    sig.param_names.push_back(tn.name);
                }
                domain.predicates.push_back(std::move(sig));
            }
        } else if (key == ":action") {
            ActionSchema schema = parse_action(sec, domain);
            if (domain.find_action(schema.name))
                throw TypeCheckError("action '" + schema.name + "' declared twice");
            domain.actions.push_back(std::move(schema));
        } else if (key == ":constants" || key == ":functions" || key == ":axioms" ||
                   key == ":derived" || key == ":durative-action") {
            throw UnsupportedFeature(key, sec.items[0].pos);
        } else {
            throw UnsupportedFeature(key, sec.items[0].pos);
        }
    }
    return domain;
}

namespace detail {

inline GroundAtom parse_ground_atom(const Sexp& s, const Domain& domain, const ProblemInstance& inst) {
    if (!s.is_list || s.items.empty() || s.items[0].is_list)
        throw SyntaxError(s.pos, "(predicate objects...)", "malformed atom");
    const std::string head = s.items[0].lowered();
    if (head == "not") throw UnsupportedFeature("negative literal in init/goal", s.pos);
    reject_formula_keyword(s, head);
    const PredicateSignature* sig = domain.find_predicate(head);
    if (!sig) throw TypeCheckError("undeclared predicate '" + head + "'");
    if (s.items.size() - 1 != sig->arity())
        throw TypeCheckError("predicate '" + head + "' expects " + std::to_string(sig->arity()) +
                             " arguments, got " + std::to_string(s.items.size() - 1));
    GroundAtom atom;
    atom.pred = head;
    for (size_t i = 1; i < s.items.size(); ++i) {
        if (s.items[i].is_list) throw SyntaxError(s.items[i].pos, "object name", "'('");
        std::string obj = s.items[i].lowered();
        if (!obj.empty() && obj[0] == '?')
            throw TypeCheckError("variable " + obj + " not allowed in a ground atom");
        const std::string* ty = inst.object_type(obj);
        if (!ty) throw TypeCheckError("undeclared object '" + obj + "' in " + head);
        if (!domain.types.is_subtype(*ty, sig->param_types[i - 1]))
            throw TypeCheckError("object '" + obj + "' of type " + *ty + " is not a " +
                                 sig->param_types[i - 1] + " (argument " + std::to_string(i - 1) +
                                 " of " + head + ")");
        atom.args.push_back(obj);
    }
    return atom;
}

inline void parse_atom_conjunction(const Sexp& s, const Domain& domain, const ProblemInstance& inst,
                                   std::vector<GroundAtom>& out) {
    if (!s.is_list) throw SyntaxError(s.pos, "(and ...) or atom", s.atom);
    if (s.items.empty()) return;
    if (!s.items[0].is_list && s.items[0].lowered() == "and") {
        for (size_t i = 1; i < s.items.size(); ++i) parse_atom_conjunction(s.items[i], domain, inst, out);
        return;
    }
    out.push_back(parse_ground_atom(s, domain, inst));
}

}  // namespace detail

inline ProblemInstance parse_problem(std::string_view text, const Domain& domain) {
    using namespace detail;
    Sexp top = read_top(text);
    if (top.items.empty() || top.items[0].lowered() != "define")
        throw SyntaxError(top.pos, "(define ...)", top.items.empty() ? "()" : top.items[0].atom);
    if (top.items.size() < 2 || !top.items[1].is_list || top.items[1].items.size() != 2 ||
        top.items[1].items[0].lowered() != "problem")
        throw SyntaxError(top.pos, "(problem name)", "malformed header");

    ProblemInstance inst;
    inst.name = top.items[1].items[1].lowered();
    record_display(inst.display, inst.name, top.items[1].items[1].atom);

    const Sexp* init_sec = nullptr;
    const Sexp* goal_sec = nullptr;
    for (size_t i = 2; i < top.items.size(); ++i) {
        const Sexp& sec = top.items[i];
        check_section_keyword(sec, "problem section");
        const std::string key = sec.items[0].lowered();
        if (key == ":domain") {
            if (sec.items.size() != 2) throw SyntaxError(sec.pos, "(:domain name)", "malformed");
            inst.domain_name = sec.items[1].lowered();
            if (inst.domain_name != domain.name) throw DomainMismatch(domain.name, inst.domain_name);
        } else if (key == ":objects") {
            for (const auto& tn : parse_typed_list(sec.items, 1, "object")) {
                if (!domain.types.contains(tn.type))
                    throw TypeCheckError("object '" + tn.name + "': undeclared type '" + tn.type + "'");
                if (inst.has_object(tn.name)) throw TypeCheckError("object '" + tn.name + "' declared twice");
                inst.objects.emplace_back(tn.name, tn.type);
                record_display(inst.display, tn.name, tn.display);
            }
        } else if (key == ":init") {
            init_sec = &sec;
        } else if (key == ":goal") {
            if (sec.items.size() != 2) throw SyntaxError(sec.pos, "(:goal formula)", "malformed");
            goal_sec = &sec.items[1];
        } else {
            throw UnsupportedFeature(key, sec.items[0].pos);
        }
    }
    if (inst.domain_name.empty()) throw SyntaxError(top.pos, "(:domain name)", "missing section");

    if (init_sec)
        for (size_t j = 1; j < init_sec->items.size(); ++j)
            inst.init.push_back(detail::parse_ground_atom(init_sec->items[j], domain, inst));
    if (goal_sec) detail::parse_atom_conjunction(*goal_sec, domain, inst, inst.goal);

    // Init/goal are sets; keep them deduplicated but in stable order.
    auto dedupe = [](std::vector<GroundAtom>& v) {
        std::vector<GroundAtom> seen;
        std::vector<GroundAtom> out;
        for (auto& a : v) {
            if (std::find(seen.begin(), seen.end(), a) == seen.end()) {
                seen.push_back(a);
                out.push_back(a);
            }
        }
        v = std::move(out);
    };
    dedupe(inst.init);
    dedupe(inst.goal);
    return inst;
}

}  // namespace scaleplan

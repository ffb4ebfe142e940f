#pragma once

#include <cstdlib>
#include <map>
#include <set>
#include <string>
#include <vector>

#include <httplib.h>
#include <json.hpp>

#include "scaleplan/action_graph.hpp"
#include "scaleplan/relevance_filter.hpp"

namespace scaleplan {

enum class SeedSource { Lexical, Llm };

struct SeedProposal {
    std::vector<SeedAction> seeds;
    std::string rationale;
    SeedSource source = SeedSource::Lexical;
};

struct SeederConfig {
    std::string endpoint_url;  // empty: use SCALEPLAN_API_BASE
    std::string model_name = "local-planner-llm";
    int max_retries = 2;
    double timeout_s = 30.0;
    double temperature = 0.0;
};

struct SeedViolation {
    enum Code { UnknownAction, UnknownObject, Arity, Type } code;
    int seed_index;
    int position;  // argument position, -1 when not positional
    std::string detail;

    static const char* code_name(Code c) {
        switch (c) {
            case UnknownAction: return "UNKNOWN_ACTION";
            case UnknownObject: return "UNKNOWN_OBJECT";
            case Arity: return "ARITY";
            case Type: return "TYPE";
        }
        return "?";
    }
};

inline std::vector<SeedViolation> validate_proposal(const SeedProposal& proposal, const Domain& domain,
                                                    const ProblemInstance& instance) {
    std::vector<SeedViolation> out;
    for (size_t i = 0; i < proposal.seeds.size(); ++i) {
        const SeedAction& seed = proposal.seeds[i];
        const ActionSchema* schema = domain.find_action(seed.schema);
        if (!schema) {
            out.push_back({SeedViolation::UnknownAction, static_cast<int>(i), -1,
                           "unknown action '" + seed.schema + "'"});
            continue;
        }
        if (seed.binding.size() != schema->arity()) {
            out.push_back({SeedViolation::Arity, static_cast<int>(i), -1,
                           "'" + seed.schema + "' takes " + std::to_string(schema->arity()) +
                               " arguments, got " + std::to_string(seed.binding.size())});
            continue;
        }
        for (size_t p = 0; p < seed.binding.size(); ++p) {
            const std::string& obj = seed.binding[p];
            if (obj == kWildcard) continue;
            const std::string* ty = instance.object_type(obj);
            if (!ty) {
                out.push_back({SeedViolation::UnknownObject, static_cast<int>(i), static_cast<int>(p),
                               "unknown object '" + obj + "'"});
            } else if (!domain.types.is_subtype(*ty, schema->params[p].type)) {
                out.push_back({SeedViolation::Type, static_cast<int>(i), static_cast<int>(p),
                               "object '" + obj + "' of type " + *ty + " does not fit parameter " +
                                   std::to_string(p) + " (" + schema->params[p].type + ") of '" +
                                   seed.schema + "'"});
            }
        }
    }
    return out;
}

// --- lexical baseline -------------------------------------------------------

namespace detail {

inline std::vector<std::string> tokenize_task(const std::string& text) {
    std::vector<std::string> tokens;
    std::string cur;
    auto flush = [&] {
        if (cur.empty()) return;
        if (cur.size() > 1 && cur.back() == 's') cur.pop_back();  // crude singularization
        tokens.push_back(cur);
        cur.clear();
    };
    for (char raw : text) {
        unsigned char c = static_cast<unsigned char>(raw);
        if (std::isalnum(c) || raw == '-' || raw == '_' || raw == '?') {
            cur += static_cast<char>(std::tolower(c));
        } else {
            flush();
        }
    }
    flush();
    return tokens;
}

inline std::vector<std::string> name_parts(const std::string& name) {
    std::vector<std::string> parts;
    std::string cur;
    for (char c : name) {
        if (c == '-' || c == '_') {
            if (!cur.empty()) parts.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    if (!cur.empty()) parts.push_back(cur);
    return parts;
}

}  // namespace detail

// Deterministic stand-in for model-based seeding: token overlap between the
// task text and schema/object names, plus a goal-regression floor — every
// goal predicate gets at least one schema that can add it, so filtering never
// depends on how well the task was worded.
inline SeedProposal lexical_seed(const std::string& task_text, const Domain& domain,
                                 const ProblemInstance& instance) {
    SeedProposal proposal;
    proposal.source = SeedSource::Lexical;

    std::vector<std::string> tokens = detail::tokenize_task(task_text);
    std::set<std::string> token_set(tokens.begin(), tokens.end());

    std::set<std::string> matched_objects;
    for (const auto& [name, type] : instance.objects)
        if (token_set.count(name)) matched_objects.insert(name);

    std::vector<std::pair<int, std::string>> scored;  // (-score, name) for stable ordering
    for (const auto& schema : domain.actions) {
        int score = 0;
        for (const auto& part : detail::name_parts(schema.name))
            if (token_set.count(part)) ++score;
        if (score > 0) scored.push_back({-score, schema.name});
    }
    std::sort(scored.begin(), scored.end());

    std::set<std::string> seeded_schemas;
    std::string rationale;
    for (const auto& [neg_score, name] : scored) {
        const ActionSchema* schema = domain.find_action(name);
        SeedAction seed;
        seed.schema = name;
        std::set<std::string> used;
        for (const auto& param : schema->params) {
            std::string pick = kWildcard;
            for (const auto& obj : matched_objects) {
                if (used.count(obj)) continue;
                const std::string* ty = instance.object_type(obj);
                if (ty && domain.types.is_subtype(*ty, param.type)) {
                    pick = obj;
                    break;
                }
            }
            if (pick != kWildcard) used.insert(pick);
            seed.binding.push_back(pick);
        }
        proposal.seeds.push_back(seed);
        seeded_schemas.insert(name);
        rationale += "match " + seed.str() + " (score " + std::to_string(-neg_score) + "); ";
    }

    // goal regression: one all-wildcard seed per schema that can add a goal
    // predicate, unless the schema is already seeded
    for (const auto& goal_atom : instance.goal) {
        for (const auto& schema : domain.actions) {
            if (seeded_schemas.count(schema.name)) continue;
            bool adds_goal_pred = false;
            for (const auto& eff : schema.add_effects) {
                if (eff.pred != goal_atom.pred || eff.args.size() != goal_atom.args.size()) continue;
                bool fits = true;
                for (size_t i = 0; i < eff.args.size(); ++i) {
                    const std::string* ty = instance.object_type(goal_atom.args[i]);
                    if (!ty || !domain.types.unifiable(eff.args[i].type, *ty)) {
                        fits = false;
                        break;
                    }
                }
                if (fits) {
                    adds_goal_pred = true;
                    break;
                }
            }
            if (!adds_goal_pred) continue;
            SeedAction seed;
            seed.schema = schema.name;
            seed.binding.assign(schema.arity(), kWildcard);
            proposal.seeds.push_back(seed);
            seeded_schemas.insert(schema.name);
            rationale += "goal regression " + seed.str() + " for " + goal_atom.str() + "; ";
        }
    }

    if (proposal.seeds.empty()) throw NoSeedsFound();
    proposal.rationale = rationale;
    return proposal;
}

// --- LLM client -------------------------------------------------------------

struct LlmTranscript {
    nlohmann::json entries = nlohmann::json::array();

    void record(const nlohmann::json& request, int status, const std::string& body) {
        entries.push_back({{"request", request}, {"status", status}, {"response", body}});
    }
};

namespace detail {

struct SplitUrl {
    std::string host_port;  // scheme://host:port
    std::string path;       // leading path prefix, may be empty
};

inline SplitUrl split_url(const std::string& url) {
    auto scheme_end = url.find("://");
    if (scheme_end == std::string::npos) throw TransportError("endpoint url missing scheme: " + url);
    auto path_start = url.find('/', scheme_end + 3);
    if (path_start == std::string::npos) return {url, ""};
    std::string path = url.substr(path_start);
    while (!path.empty() && path.back() == '/') path.pop_back();
    return {url.substr(0, path_start), path};
}

inline std::string resolve_endpoint(const SeederConfig& config) {
    if (!config.endpoint_url.empty()) return config.endpoint_url;
    if (const char* env = std::getenv("SCALEPLAN_API_BASE")) return env;
    throw TransportError("no endpoint configured (set SCALEPLAN_API_BASE or pass endpoint_url)");
}

// One chat-completion round trip. Throws TransportError on connection/status
// problems and MalformedResponse when the envelope is not OpenAI-shaped.
inline std::string post_chat(const SeederConfig& config, const nlohmann::json& messages,
                             LlmTranscript* transcript) {
    SplitUrl url = split_url(resolve_endpoint(config));
    httplib::Client client(url.host_port);
    client.set_connection_timeout(static_cast<time_t>(config.timeout_s),
                                  static_cast<time_t>((config.timeout_s - static_cast<time_t>(config.timeout_s)) * 1e6));
    client.set_read_timeout(static_cast<time_t>(config.timeout_s), 0);

    nlohmann::json body = {{"model", config.model_name},
                           {"messages", messages},
                           {"temperature", config.temperature},
                           {"response_format", {{"type", "json_object"}}}};

    httplib::Headers headers;
    if (const char* key = std::getenv("SCALEPLAN_API_KEY"))
        headers.emplace("Authorization", std::string("Bearer ") + key);

    auto res = client.Post(url.path + "/chat/completions", headers, body.dump(), "application/json");
    if (!res) throw TransportError("cannot reach " + url.host_port + ": " + httplib::to_string(res.error()));
    if (transcript) transcript->record(body, res->status, res->body);
    if (res->status != 200)
        throw TransportError("endpoint returned HTTP " + std::to_string(res->status));

    nlohmann::json envelope;
    try {
        envelope = nlohmann::json::parse(res->body);
    } catch (const nlohmann::json::exception&) {
        throw MalformedResponse("response body is not JSON");
    }
    try {
        return envelope.at("choices").at(0).at("message").at("content").get<std::string>();
    } catch (const nlohmann::json::exception&) {
        throw MalformedResponse("response lacks choices[0].message.content");
    }
}

}  // namespace detail

// Validate-and-retry loop shared by every structured LLM call: parse the
// content as a JSON object, run the caller's validator, and on failure append
// the error to the conversation and try again, up to max_retries extra
// rounds. The validator returns an error string (empty = accept) and flags
// whether the failure names unknown entities, which decides the final error
// class.
struct LlmValidationResult {
    std::string error;           // empty means accepted
    bool hallucination = false;  // unknown action/object
};

template <typename ParseFn>
auto llm_json_call(const SeederConfig& config, nlohmann::json messages, ParseFn parse,
                   LlmTranscript* transcript) {
    std::string last_error = "no attempts made";
    bool last_was_hallucination = false;
    using Result = decltype(parse(nlohmann::json{}).first);

    for (int attempt = 0; attempt <= config.max_retries; ++attempt) {
        std::string content = detail::post_chat(config, messages, transcript);
        nlohmann::json parsed;
        bool json_ok = true;
        try {
            parsed = nlohmann::json::parse(content);
        } catch (const nlohmann::json::exception& e) {
            json_ok = false;
            last_error = std::string("reply is not valid JSON: ") + e.what();
            last_was_hallucination = false;
        }
        if (json_ok) {
            std::pair<Result, LlmValidationResult> out = parse(parsed);
            if (out.second.error.empty()) return out.first;
            last_error = out.second.error;
            last_was_hallucination = out.second.hallucination;
        }
        messages.push_back({{"role", "assistant"}, {"content", content}});
        messages.push_back({{"role", "user"},
                            {"content", "Your previous reply was rejected: " + last_error +
                                            ". Reply again with only the requested JSON object."}});
    }
    if (last_was_hallucination) throw HallucinationRejected(last_error);
    throw MalformedResponse("retries exhausted: " + last_error);
}

namespace detail {

inline std::string schema_listing(const Domain& domain) {
    std::string out;
    for (const auto& a : domain.actions) {
        out += "- " + a.name + "(";
        for (size_t i = 0; i < a.params.size(); ++i) {
            if (i) out += ", ";
            out += a.params[i].name + " - " + a.params[i].type;
        }
        out += ")\n";
    }
    return out;
}

inline std::string object_listing(const ProblemInstance& instance) {
    std::string out;
    for (const auto& [name, type] : instance.objects) out += "- " + name + " - " + type + "\n";
    return out;
}

}  // namespace detail

// Asks an OpenAI-compatible endpoint for terminal actions. The prompt lists
// the schema vocabulary and the typed objects but not the graph edges; edge
// expansion stays with the backward search.
inline SeedProposal llm_seed(const std::string& task_text, const Domain& domain,
                             const ProblemInstance& instance, const SeederConfig& config,
                             LlmTranscript* transcript = nullptr) {
    nlohmann::json messages = nlohmann::json::array();
    messages.push_back(
        {{"role", "system"},
         {"content",
          "You propose terminal actions for a robot task planner. Reply with a JSON object "
          "{\"seeds\": [{\"action\": <name>, \"args\": [<object or \"*\">, ...]}], \"rationale\": "
          "<string>}. Use only the listed actions and objects; use \"*\" for parameters you do not "
          "want to fix."}});
    messages.push_back({{"role", "user"},
                        {"content", "Task: " + task_text + "\n\nActions:\n" +
                                        detail::schema_listing(domain) + "\nObjects:\n" +
                                        detail::object_listing(instance)}});

    auto parse = [&](const nlohmann::json& j) -> std::pair<SeedProposal, LlmValidationResult> {
        SeedProposal p;
        p.source = SeedSource::Llm;
        if (!j.is_object() || !j.contains("seeds") || !j["seeds"].is_array())
            return {p, {"expected an object with a \"seeds\" array", false}};
        for (const auto& s : j["seeds"]) {
            SeedAction seed;
            if (!s.is_object() || !s.contains("action") || !s["action"].is_string())
                return {p, {"each seed needs an \"action\" string", false}};
            seed.schema = to_lower(s["action"].get<std::string>());
            if (s.contains("args"))
                for (const auto& a : s["args"]) {
                    if (!a.is_string()) return {p, {"seed args must be strings", false}};
                    seed.binding.push_back(to_lower(a.get<std::string>()));
                }
            p.seeds.push_back(std::move(seed));
        }
        if (j.contains("rationale") && j["rationale"].is_string())
            p.rationale = j["rationale"].get<std::string>();
        if (p.seeds.empty()) return {p, {"\"seeds\" must not be empty", false}};

        auto violations = validate_proposal(p, domain, instance);
        if (!violations.empty()) {
            std::string msg;
            bool hallucination = false;
            for (const auto& v : violations) {
                msg += std::string(SeedViolation::code_name(v.code)) + ": " + v.detail + "; ";
                if (v.code == SeedViolation::UnknownAction || v.code == SeedViolation::UnknownObject)
                    hallucination = true;
            }
            return {p, {msg, hallucination}};
        }
        return {p, {}};
    };
    return llm_json_call(config, std::move(messages), parse, transcript);
}

}  // namespace scaleplan

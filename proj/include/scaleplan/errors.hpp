#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace scaleplan {

// Coarse classification used by the CLI to pick an exit code.
enum class ErrorClass {
    Input,     // bad file content, type errors, invalid seeds, ...
    Io,        // missing/unreadable files
    External,  // LLM endpoint trouble
    Internal,  // invariant violations (bugs)
};

class Error : public std::runtime_error {
  public:
    Error(ErrorClass cls, std::string msg) : std::runtime_error(std::move(msg)), cls_(cls) {}
    ErrorClass error_class() const { return cls_; }

  private:
    ErrorClass cls_;
};

struct SourcePos {
    int line = 1;
    int col = 1;
};

class SyntaxError : public Error {
  public:
    SyntaxError(SourcePos pos, const std::string& expected, const std::string& got)
        : Error(ErrorClass::Input, std::to_string(pos.line) + ":" + std::to_string(pos.col) +
                                       ": expected " + expected + ", got " + got),
          pos(pos), expected(expected) {}
    SourcePos pos;
    std::string expected;
};

class UnsupportedFeature : public Error {
  public:
    explicit UnsupportedFeature(const std::string& feature, SourcePos pos = {})
        : Error(ErrorClass::Input, std::to_string(pos.line) + ":" + std::to_string(pos.col) +
                                       ": unsupported feature: " + feature),
          pos(pos), feature(feature) {}
    SourcePos pos;
    std::string feature;
};

class TypeCheckError : public Error {
  public:
    explicit TypeCheckError(const std::string& msg) : Error(ErrorClass::Input, msg) {}
};

class DomainMismatch : public Error {
  public:
    DomainMismatch(const std::string& want, const std::string& got)
        : Error(ErrorClass::Input, "problem requires domain '" + got + "', parsed domain is '" + want + "'") {}
};

class UnknownSchema : public Error {
  public:
    explicit UnknownSchema(const std::string& name)
        : Error(ErrorClass::Input, "unknown action schema: " + name) {}
};

class NotApplicable : public Error {
  public:
    NotApplicable(const std::string& action, const std::string& failed_precondition)
        : Error(ErrorClass::Input, action + " is not applicable, unsatisfied precondition " + failed_precondition),
          failed_precondition(failed_precondition) {}
    std::string failed_precondition;
};

class ArityMismatch : public Error {
  public:
    explicit ArityMismatch(const std::string& pred)
        : Error(ErrorClass::Input, "predicate '" + pred + "' used with inconsistent arity") {}
};

class UnknownTerminal : public Error {
  public:
    explicit UnknownTerminal(const std::string& name)
        : Error(ErrorClass::Input, "terminal schema not in graph: " + name), name(name) {}
    std::string name;
};

class EmptySeeds : public Error {
  public:
    EmptySeeds() : Error(ErrorClass::Input, "seed action set is empty") {}
};

class NoSeedsFound : public Error {
  public:
    NoSeedsFound() : Error(ErrorClass::Input, "no seed actions could be derived from the task text or goal") {}
};

class FilterTooAggressive : public Error {
  public:
    explicit FilterTooAggressive(const std::string& detail)
        : Error(ErrorClass::Input, "filtering excluded goal-relevant objects: " + detail) {}
};

class EmptyGoal : public Error {
  public:
    EmptyGoal() : Error(ErrorClass::Input, "cannot decompose an empty goal") {}
};

class NoCapableRobot : public Error {
  public:
    NoCapableRobot(const std::string& subtask, const std::vector<std::string>& uncovered)
        : Error(ErrorClass::Input, build_msg(subtask, uncovered)), subtask(subtask), uncovered(uncovered) {}
    std::string subtask;
    std::vector<std::string> uncovered;

  private:
    static std::string build_msg(const std::string& subtask, const std::vector<std::string>& uncovered) {
        std::string m = "no robot can execute subtask '" + subtask + "'";
        if (!uncovered.empty()) {
            m += "; uncovered schemas:";
            for (const auto& s : uncovered) m += " " + s;
        }
        return m;
    }
};

class TransportError : public Error {
  public:
    explicit TransportError(const std::string& msg) : Error(ErrorClass::External, msg) {}
};

class MalformedResponse : public Error {
  public:
    explicit MalformedResponse(const std::string& msg) : Error(ErrorClass::External, msg) {}
};

class HallucinationRejected : public Error {
  public:
    explicit HallucinationRejected(const std::string& msg) : Error(ErrorClass::External, msg) {}
};

class UnknownActionKind : public Error {
  public:
    explicit UnknownActionKind(const std::string& name)
        : Error(ErrorClass::Input, "no execution semantics for action: " + name) {}
};

class SchemaError : public Error {
  public:
    SchemaError(int record_index, const std::string& field_path, const std::string& detail)
        : Error(ErrorClass::Input, "record " + std::to_string(record_index) + ", field " + field_path + ": " + detail) {}
};

class ParseError : public Error {
  public:
    explicit ParseError(const std::string& msg) : Error(ErrorClass::Input, msg) {}
};

class LengthMismatch : public Error {
  public:
    LengthMismatch(size_t records, size_t traces)
        : Error(ErrorClass::Input, "got " + std::to_string(records) + " records but " +
                                       std::to_string(traces) + " traces") {}
};

class IoError : public Error {
  public:
    explicit IoError(const std::string& path) : Error(ErrorClass::Io, "cannot open " + path) {}
};

class InternalError : public Error {
  public:
    explicit InternalError(const std::string& msg) : Error(ErrorClass::Internal, msg) {}
};

}  // namespace scaleplan

#pragma once

#include <stdexcept>
#include <string>

namespace qforge {

/// Pipeline stage that raised an error. Used by the CLI to tag failures.
enum class Stage { Ingest, Qcf, Generate, Transpile, Recommend, Execute, Decode };

inline const char* stage_name(Stage s) {
  switch (s) {
    case Stage::Ingest: return "INGEST";
    case Stage::Qcf: return "QCF";
    case Stage::Generate: return "GENERATE";
    case Stage::Transpile: return "TRANSPILE";
    case Stage::Recommend: return "RECOMMEND";
    case Stage::Execute: return "EXECUTE";
    case Stage::Decode: return "DECODE";
  }
  return "UNKNOWN";
}

struct Error : std::runtime_error {
  Stage stage;
  std::string code;
  Error(Stage st, std::string c, const std::string& what)
      : std::runtime_error(c + ": " + what), stage(st), code(std::move(c)) {}
};

// Ingest
struct JsonSyntaxError : Error {
  explicit JsonSyntaxError(const std::string& w) : Error(Stage::Ingest, "JsonSyntaxError", w) {}
};
struct UnknownProblemType : Error {
  explicit UnknownProblemType(const std::string& w) : Error(Stage::Ingest, "UnknownProblemType", w) {}
};
struct MissingDataField : Error {
  explicit MissingDataField(const std::string& w) : Error(Stage::Ingest, "MissingDataField", w) {}
};
struct ExtractionFailed : Error {
  explicit ExtractionFailed(const std::string& w) : Error(Stage::Ingest, "ExtractionFailed", w) {}
};

// Problem model
struct TagDataMismatch : Error {
  explicit TagDataMismatch(const std::string& w) : Error(Stage::Ingest, "TagDataMismatch", w) {}
};
struct MalformedGraph : Error {
  explicit MalformedGraph(const std::string& w) : Error(Stage::Ingest, "MalformedGraph", w) {}
};
struct OperandOverflow : Error {
  explicit OperandOverflow(const std::string& w) : Error(Stage::Ingest, "OperandOverflow", w) {}
};

// QCF
struct UnsupportedTag : Error {
  explicit UnsupportedTag(const std::string& w) : Error(Stage::Qcf, "UnsupportedTag", w) {}
};
struct LengthMismatch : Error {
  explicit LengthMismatch(const std::string& w) : Error(Stage::Qcf, "LengthMismatch", w) {}
};
struct NonSpinValue : Error {
  explicit NonSpinValue(const std::string& w) : Error(Stage::Qcf, "NonSpinValue", w) {}
};

// Circuit / generator
struct UnboundParameter : Error {
  explicit UnboundParameter(const std::string& w) : Error(Stage::Generate, "UnboundParameter", w) {}
};
struct ContainsMeasurement : Error {
  explicit ContainsMeasurement(const std::string& w) : Error(Stage::Generate, "ContainsMeasurement", w) {}
};
struct TooManyVariables : Error {
  explicit TooManyVariables(const std::string& w) : Error(Stage::Generate, "TooManyVariables", w) {}
};
struct WidthMismatch : Error {
  explicit WidthMismatch(const std::string& w) : Error(Stage::Generate, "WidthMismatch", w) {}
};
struct SearchExhausted : Error {
  explicit SearchExhausted(const std::string& w) : Error(Stage::Execute, "SearchExhausted", w) {}
};

// Simulator
struct TooManyQubits : Error {
  explicit TooManyQubits(const std::string& w) : Error(Stage::Execute, "TooManyQubits", w) {}
};

// Transpiler
struct UnsupportedBasis : Error {
  explicit UnsupportedBasis(const std::string& w) : Error(Stage::Transpile, "UnsupportedBasis", w) {}
};
struct CircuitTooLarge : Error {
  explicit CircuitTooLarge(const std::string& w) : Error(Stage::Transpile, "CircuitTooLarge", w) {}
};

// Devices / recommender
struct SchemaError : Error {
  explicit SchemaError(const std::string& w) : Error(Stage::Recommend, "SchemaError", w) {}
};
struct NoCompatiblePair : Error {
  explicit NoCompatiblePair(const std::string& w) : Error(Stage::Recommend, "NoCompatiblePair", w) {}
};

// Decoder
struct NoFeasibleOutcome : Error {
  explicit NoFeasibleOutcome(const std::string& w) : Error(Stage::Decode, "NoFeasibleOutcome", w) {}
};
struct TooLarge : Error {
  explicit TooLarge(const std::string& w) : Error(Stage::Decode, "TooLarge", w) {}
};

}  // namespace qforge

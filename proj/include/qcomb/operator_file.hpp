#pragma once

// On-disk operators and result records.
//
// An operator file is a JSON document
//   {"format_version": 1,
//    "wires": [{"label": ..., "dim": ...}, ...],
//    "metadata": {"key": "value", ...},
//    "entries": [[re, im], ...]}
// with D*D entries in row-major order. The canonical writer prints every
// double as %.16e, so parse -> serialize reproduces a canonical file byte for
// byte.

#include <filesystem>
#include <map>
#include <optional>
#include <string>

#include "qcomb/comb.hpp"
#include "qcomb/tensor.hpp"

namespace qcomb {

inline constexpr int kOperatorFormatVersion = 1;

struct OperatorFile {
  int format_version = kOperatorFormatVersion;
  LabeledOperator op;
  std::map<std::string, std::string> metadata;
};

/// Throws InvalidArgument for non-finite entries.
std::string serialize(const OperatorFile& file);

/// Throws ParseError for malformed JSON, unknown versions, bad wires, or an
/// entry count other than D*D.
OperatorFile parse_operator_file(const std::string& text);

OperatorFile read_operator_file(const std::filesystem::path& path);

/// Refuses to replace an existing file unless `force` (InvalidArgument).
void write_text_file(const std::filesystem::path& path, const std::string& text, bool force);
void write_operator_file(const std::filesystem::path& path, const OperatorFile& file, bool force);

/// Comma-separated `in:out` pairs in causal order; `+` joins several labels
/// into one group and an empty side is a trivial system, e.g. ":1,2+psi:3".
/// Dimensions are looked up in `wires`. Throws ParseError or UnknownLabel.
CombStructure parse_teeth(const std::string& spec, const Wires& wires);

/// Inverse of parse_teeth (labels only).
std::string format_teeth(const CombStructure& s);

enum class ReferenceSource { ClosedForm, StoredConstant, None };
std::string to_string(ReferenceSource source);

struct ResultRecord {
  std::string task;  // "clone" or "learn"
  std::map<std::string, double> parameters;
  double value = 0.0;
  std::optional<double> reference_value;
  ReferenceSource reference_source = ReferenceSource::None;
  std::optional<double> estimation_reference;
  double feas_residual = 0.0;
  std::optional<double> upper_bound;
  std::optional<double> gap_bound;
  int iterations = 0;
  bool converged = false;
  double wall_time = 0.0;
  std::string backend;
  std::string operator_path;
};

/// Pretty-printed JSON, keys sorted.
std::string serialize(const ResultRecord& record);

}  // namespace qcomb

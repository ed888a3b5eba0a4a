#include "qcomb/operator_file.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace qcomb {

namespace {

using nlohmann::json;

std::string number(double x) {
  if (!std::isfinite(x)) throw Error(ErrorCode::InvalidArgument, "cannot serialize a non-finite value");
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.16e", x);
  return buf;
}

std::string quoted(const std::string& s) { return json(s).dump(); }

[[noreturn]] void parse_fail(const std::string& what) { throw Error(ErrorCode::ParseError, what); }

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> parts;
  std::string::size_type start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    parts.push_back(s.substr(start, pos - start));
    if (pos == std::string::npos) break;
    start = pos + 1;
  }
  return parts;
}

json optional_number(const std::optional<double>& x) { return x ? json(*x) : json(nullptr); }

}  // namespace

std::string serialize(const OperatorFile& file) {
  const LabeledOperator& op = file.op;
  std::ostringstream out;
  out << "{\n  \"format_version\": " << file.format_version << ",\n  \"wires\": [";
  const Wires& wires = op.wires();
  for (std::size_t k = 0; k < wires.size(); ++k)
    out << (k ? ",\n    " : "\n    ") << "{\"label\": " << quoted(wires[k].label) << ", \"dim\": " << wires[k].dim
        << "}";
  out << (wires.empty() ? "],\n" : "\n  ],\n");

  out << "  \"metadata\": {";
  bool first = true;
  for (const auto& [key, value] : file.metadata) {
    out << (first ? "\n    " : ",\n    ") << quoted(key) << ": " << quoted(value);
    first = false;
  }
  out << (file.metadata.empty() ? "},\n" : "\n  },\n");

  out << "  \"entries\": [";
  const Matrix& m = op.matrix();
  for (Index i = 0; i < m.rows(); ++i)
    for (Index j = 0; j < m.cols(); ++j)
      out << ((i || j) ? ",\n    " : "\n    ") << '[' << number(m(i, j).real()) << ", " << number(m(i, j).imag())
          << ']';
  out << "\n  ]\n}\n";
  return out.str();
}

OperatorFile parse_operator_file(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    parse_fail(std::string("malformed operator file: ") + e.what());
  }
  if (!doc.is_object()) parse_fail("operator file must be a JSON object");
  for (const char* key : {"format_version", "wires", "entries"})
    if (!doc.contains(key)) parse_fail(std::string("operator file lacks '") + key + "'");

  OperatorFile file;
  if (!doc["format_version"].is_number_integer()) parse_fail("format_version must be an integer");
  file.format_version = doc["format_version"].get<int>();
  if (file.format_version != kOperatorFormatVersion)
    parse_fail("unsupported format_version " + std::to_string(file.format_version));

  Wires wires;
  if (!doc["wires"].is_array()) parse_fail("wires must be an array");
  for (const auto& w : doc["wires"]) {
    if (!w.is_object() || !w.contains("label") || !w.contains("dim") || !w["label"].is_string() ||
        !w["dim"].is_number_integer())
      parse_fail("each wire needs a string label and an integer dim");
    const auto dim = w["dim"].get<long long>();
    if (dim < 1 || dim > kMaxDimension) parse_fail("wire dimension out of range");
    wires.push_back({w["label"].get<std::string>(), static_cast<int>(dim)});
  }

  if (doc.contains("metadata")) {
    if (!doc["metadata"].is_object()) parse_fail("metadata must be an object");
    for (const auto& [key, value] : doc["metadata"].items()) {
      if (!value.is_string()) parse_fail("metadata value for '" + key + "' must be a string");
      file.metadata[key] = value.get<std::string>();
    }
  }

  Index d = 1;
  for (const auto& w : wires) {
    d *= w.dim;
    if (d > kMaxDimension) throw Error(ErrorCode::DimOverflow, "operator dimension exceeds " + std::to_string(kMaxDimension));
  }
  const auto& entries = doc["entries"];
  if (!entries.is_array()) parse_fail("entries must be an array");
  if (entries.size() != static_cast<std::size_t>(d * d))
    parse_fail("expected " + std::to_string(d * d) + " entries, found " + std::to_string(entries.size()));
  Matrix m(d, d);
  for (Index k = 0; k < d * d; ++k) {
    const auto& e = entries[k];
    if (!e.is_array() || e.size() != 2 || !e[0].is_number() || !e[1].is_number())
      parse_fail("entry " + std::to_string(k) + " is not a [re, im] pair");
    m(k / d, k % d) = Complex(e[0].get<double>(), e[1].get<double>());
  }

  try {
    file.op = LabeledOperator(std::move(wires), std::move(m));
  } catch (const Error& e) {
    parse_fail(std::string("invalid wires: ") + e.what());
  }
  return file;
}

OperatorFile read_operator_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) parse_fail("cannot open " + path.string());
  std::ostringstream text;
  text << in.rdbuf();
  return parse_operator_file(text.str());
}

void write_text_file(const std::filesystem::path& path, const std::string& text, bool force) {
  if (!force && std::filesystem::exists(path))
    throw Error(ErrorCode::InvalidArgument, path.string() + " exists; pass --force to overwrite");
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::InvalidArgument, "cannot write " + path.string());
  out << text;
  if (!out) throw Error(ErrorCode::InvalidArgument, "write failed for " + path.string());
}

void write_operator_file(const std::filesystem::path& path, const OperatorFile& file, bool force) {
  write_text_file(path, serialize(file), force);
}

CombStructure parse_teeth(const std::string& spec, const Wires& wires) {
  auto group = [&](const std::string& side) {
    Wires out;
    if (side.empty()) return out;
    for (const auto& label : split(side, '+')) {
      if (label.empty()) parse_fail("empty label in teeth spec '" + spec + "'");
      const auto it = std::find_if(wires.begin(), wires.end(), [&](const Wire& w) { return w.label == label; });
      if (it == wires.end()) throw Error(ErrorCode::UnknownLabel, "teeth spec names unknown label '" + label + "'");
      out.push_back(*it);
    }
    return out;
  };
  if (spec.empty()) parse_fail("empty teeth spec");
  std::vector<Tooth> teeth;
  for (const auto& pair : split(spec, ',')) {
    const auto sides = split(pair, ':');
    if (sides.size() != 2) parse_fail("tooth '" + pair + "' is not of the form in:out");
    teeth.push_back({group(sides[0]), group(sides[1])});
  }
  return CombStructure(std::move(teeth));
}

std::string format_teeth(const CombStructure& s) {
  auto group = [](const Wires& ws) {
    std::string out;
    for (std::size_t k = 0; k < ws.size(); ++k) out += (k ? "+" : "") + ws[k].label;
    return out;
  };
  std::string out;
  for (std::size_t n = 0; n < s.teeth().size(); ++n)
    out += (n ? "," : "") + group(s.teeth()[n].inputs) + ":" + group(s.teeth()[n].outputs);
  return out;
}

std::string to_string(ReferenceSource source) {
  switch (source) {
    case ReferenceSource::ClosedForm: return "closed-form";
    case ReferenceSource::StoredConstant: return "stored-constant";
    case ReferenceSource::None: return "none";
  }
  return "none";
}

std::string serialize(const ResultRecord& r) {
  json doc;
  doc["task"] = r.task;
  doc["parameters"] = r.parameters;
  doc["value"] = r.value;
  doc["reference_value"] = r.reference_source == ReferenceSource::None ? json(nullptr) : optional_number(r.reference_value);
  doc["reference_source"] = to_string(r.reference_source);
  doc["estimation_reference"] = optional_number(r.estimation_reference);
  doc["feas_residual"] = r.feas_residual;
  doc["upper_bound"] = optional_number(r.upper_bound);
  doc["gap_bound"] = optional_number(r.gap_bound);
  doc["iterations"] = r.iterations;
  doc["converged"] = r.converged;
  doc["wall_time"] = r.wall_time;
  doc["backend"] = r.backend;
  doc["operator_path"] = r.operator_path;
  return doc.dump(2) + "\n";
}

}  // namespace qcomb

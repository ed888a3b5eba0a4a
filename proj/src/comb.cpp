#include "qcomb/comb.hpp"

#include <algorithm>
#include <map>

#include "qcomb/link.hpp"
#include "qcomb/random.hpp"

namespace qcomb {

namespace {

LabelSet labels_in(const Wires& w) { return label_set(w); }

void append(Wires& dst, const Wires& src) { dst.insert(dst.end(), src.begin(), src.end()); }

void require_structure_labels(const LabeledOperator& r, const CombStructure& s) {
  const Wires expected = s.wires();
  if (label_set(r.wires()) != label_set(expected))
    throw Error(ErrorCode::LabelMismatch, "operator wires do not match the comb structure");
  for (const auto& w : expected)
    if (r.wire(w.label).dim != w.dim)
      throw Error(ErrorCode::LabelMismatch, "wire '" + w.label + "' has the wrong dimension");
}

std::string fresh_label(const LabelSet& taken, const std::string& stem) {
  std::string label = stem;
  while (taken.contains(label)) label = "#" + label;
  return label;
}

}  // namespace

// ---------------------------------------------------------------------------
// Structure

CombStructure::CombStructure(std::vector<Tooth> teeth) : teeth_(std::move(teeth)) {
  if (teeth_.empty()) throw Error(ErrorCode::InvalidArgument, "a comb needs at least one tooth");
  LabelSet seen;
  for (const auto& t : teeth_)
    for (const Wires* group : {&t.inputs, &t.outputs})
      for (const auto& w : *group) {
        if (w.dim < 1) throw Error(ErrorCode::InvalidArgument, "wire '" + w.label + "' has dim < 1");
        if (!seen.insert(w.label).second)
          throw Error(ErrorCode::DuplicateLabel, "label '" + w.label + "' used twice in comb structure");
      }
}

CombStructure CombStructure::sequential(const std::vector<std::pair<int, int>>& dims) {
  std::vector<Tooth> teeth;
  for (std::size_t n = 0; n < dims.size(); ++n)
    teeth.push_back({{{std::to_string(2 * n), dims[n].first}}, {{std::to_string(2 * n + 1), dims[n].second}}});
  return CombStructure(std::move(teeth));
}

Wires CombStructure::wires() const {
  Wires out;
  for (const auto& t : teeth_) {
    append(out, t.inputs);
    append(out, t.outputs);
  }
  return out;
}

double CombStructure::trace_normalization() const {
  double c = 1.0;
  for (int n = 0; n <= slots(); ++n) c *= static_cast<double>(input_dimension(n));
  return c;
}

CombStructure residual_structure(const CombStructure& s, const std::vector<int>& filled_slots) {
  std::vector<bool> filled(s.slots(), false);
  for (int slot : filled_slots) {
    if (slot < 0 || slot >= s.slots() || filled[slot])
      throw Error(ErrorCode::SlotArityMismatch, "invalid or repeated slot " + std::to_string(slot));
    filled[slot] = true;
  }
  std::vector<Tooth> teeth;
  Tooth current{s.teeth()[0].inputs, {}};
  for (int n = 0; n <= s.slots(); ++n) {
    if (n < s.slots() && filled[n]) continue;  // merge with the next tooth
    current.outputs = s.teeth()[n].outputs;
    teeth.push_back(current);
    if (n < s.slots()) current = Tooth{s.teeth()[n + 1].inputs, {}};
  }
  return CombStructure(std::move(teeth));
}

QuantumComb::QuantumComb(const LabeledOperator& r, CombStructure structure)
    : structure_(std::move(structure)) {
  require_structure_labels(r, structure_);
  r_ = r.aligned_to(structure_.wires());
}

double CausalityReport::max_residual() const {
  return residuals.empty() ? 0.0 : *std::max_element(residuals.begin(), residuals.end());
}

// ---------------------------------------------------------------------------
// Verification

LabeledOperator reduced_comb(const LabeledOperator& r, const CombStructure& s, int n) {
  if (n < -1 || n > s.slots())
    throw Error(ErrorCode::IndexOutOfRange, "level " + std::to_string(n) + " outside [-1, " +
                                                std::to_string(s.slots()) + "]");
  require_structure_labels(r, s);
  LabeledOperator current = r.aligned_to(s.wires());
  for (int k = s.slots(); k > n; --k) {
    const Tooth& t = s.teeth()[k];
    LabelSet traced = labels_in(t.inputs);
    traced.merge(labels_in(t.outputs));
    current = partial_trace(current, traced) * Complex(1.0 / static_cast<double>(s.input_dimension(k)));
  }
  return current;
}

CausalityReport verify_causality(const LabeledOperator& r, const CombStructure& s, double tol) {
  require_structure_labels(r, s);
  CausalityReport report;
  report.tol = tol;
  report.residuals.assign(s.slots() + 1, 0.0);

  LabeledOperator level = r.aligned_to(s.wires());
  for (int n = s.slots(); n >= 0; --n) {
    const Tooth& t = s.teeth()[n];
    const LabeledOperator out_traced = partial_trace(level, labels_in(t.outputs));
    const LabeledOperator previous =
        n == 0 ? LabeledOperator::scalar(1.0)
               : partial_trace(out_traced, labels_in(t.inputs)) *
                     Complex(1.0 / static_cast<double>(s.input_dimension(n)));
    const LabeledOperator expected = tensor(LabeledOperator::identity(t.inputs), previous);
    report.residuals[n] = distance(out_traced, expected);
    level = previous;
  }

  report.min_eigenvalue = min_eigenvalue(r.hermitian_part());
  for (int n = 0; n <= s.slots(); ++n)
    if (report.residuals[n] > tol) {
      report.first_failing_level = n;
      break;
    }
  report.pass = report.first_failing_level < 0 && report.min_eigenvalue >= -tol &&
                r.hermiticity_defect() <= tol * std::max(1.0, r.norm());
  return report;
}

LabeledOperator maximally_mixed_comb(const CombStructure& s) {
  const Wires w = s.wires();
  return LabeledOperator::identity(w) * Complex(s.trace_normalization() / static_cast<double>(total_dimension(w)));
}

// ---------------------------------------------------------------------------
// Affine projection

CombProjector::CombProjector(CombStructure structure)
    : structure_(std::move(structure)), wires_(structure_.wires()) {
  const auto& teeth = structure_.teeth();
  for (int n = 0; n <= structure_.slots(); ++n) {
    Level level;
    level.without_input = labels_in(teeth[n].outputs);
    for (int k = n + 1; k <= structure_.slots(); ++k) {
      level.without_input.merge(labels_in(teeth[k].inputs));
      level.without_input.merge(labels_in(teeth[k].outputs));
    }
    level.with_input = level.without_input;
    level.with_input.merge(labels_in(teeth[n].inputs));
    level.trivial = structure_.input_dimension(n) == 1;
    levels_.push_back(std::move(level));
  }
}

Matrix CombProjector::trace_and_replace(const Matrix& w, const LabelSet& labels) const {
  if (labels.empty()) return w;
  Wires traced;
  for (const auto& wire : wires_)
    if (labels.contains(wire.label)) traced.push_back(wire);
  const double d = static_cast<double>(total_dimension(traced));
  const LabeledOperator reduced = partial_trace(LabeledOperator(wires_, w), labels);
  return tensor(LabeledOperator::identity(traced) * Complex(1.0 / d), reduced).aligned_to(wires_).matrix();
}

Matrix CombProjector::project_linear(const Matrix& w) const {
  Matrix out = w;
  for (const auto& level : levels_) {
    if (level.trivial) continue;
    out -= trace_and_replace(w, level.without_input) - trace_and_replace(w, level.with_input);
  }
  return out;
}

Matrix CombProjector::project(const Matrix& w) const {
  Matrix out = project_linear(w);
  const double d = static_cast<double>(out.rows());
  const Complex shift = (structure_.trace_normalization() - w.trace()) / d;
  out.diagonal().array() += shift;
  return out;
}

Matrix CombProjector::project_normal(const Matrix& w) const {
  Matrix out = w - project_linear(w);
  out.diagonal().array() += w.trace() / static_cast<double>(w.rows());
  return out;
}

FeasibleRestoration restore_feasibility(const CombProjector& projector, const Matrix& w) {
  Matrix r = projector.project(w);
  r = (r + r.adjoint()).eval() * 0.5;
  Eigen::SelfAdjointEigenSolver<Matrix> es(r, Eigen::EigenvaluesOnly);
  const double lambda_min = es.eigenvalues()(0);
  const double mixed = projector.structure().trace_normalization() / static_cast<double>(r.rows());
  FeasibleRestoration out;
  if (lambda_min < 0.0) {
    out.mixing = -lambda_min / (mixed - lambda_min);
    r *= (1.0 - out.mixing);
    r.diagonal().array() += out.mixing * mixed;
  }
  out.r = std::move(r);
  return out;
}

ProjectionResult project_to_comb(const LabeledOperator& x, const CombStructure& s, int iters, double tol) {
  require_structure_labels(x, s);
  const Wires wires = s.wires();
  const LabeledOperator aligned = x.aligned_to(wires);
  if (!aligned.is_hermitian()) throw Error(ErrorCode::NotHermitian, "project_to_comb needs a Hermitian input");
  const CombProjector projector(s);

  Matrix current = aligned.hermitian_part().matrix();
  Matrix p = Matrix::Zero(current.rows(), current.cols());
  Matrix q = p;
  double gap = 0.0;
  int it = 0;
  bool converged = false;
  for (; it < iters; ++it) {
    const Matrix y = projector.project(current + p);
    p = current + p - y;
    const Matrix next = psd_project(LabeledOperator(wires, y + q)).matrix();
    q = y + q - next;
    gap = (next - y).norm();
    current = next;
    if (gap <= tol) {
      converged = true;
      ++it;
      break;
    }
  }
  const FeasibleRestoration restored = restore_feasibility(projector, current);
  QuantumComb comb(LabeledOperator(wires, restored.r), s);
  CausalityReport report = verify_causality(comb.op(), s, 10.0 * tol);
  return {std::move(comb), converged, it, gap, std::move(report)};
}

// ---------------------------------------------------------------------------
// Generation and action

QuantumComb random_comb(const CombStructure& s, const std::vector<int>& memory_dims, std::uint64_t seed) {
  if (static_cast<int>(memory_dims.size()) != s.slots())
    throw Error(ErrorCode::InvalidArgument, "need one memory dimension per slot");
  if (s.dimension() > kMaxDimension)
    throw Error(ErrorCode::DimOverflow, "comb dimension " + std::to_string(s.dimension()) + " exceeds cap");
  for (int m : memory_dims)
    if (m < 1) throw Error(ErrorCode::InvalidArgument, "memory dimensions must be positive");

  Rng rng(seed);
  const LabelSet taken = label_set(s.wires());
  std::vector<LabeledOperator> parts;
  Wires previous_memory;
  for (int n = 0; n <= s.slots(); ++n) {
    const Tooth& t = s.teeth()[n];
    Wires in = t.inputs, out = t.outputs;
    append(in, previous_memory);
    Wires next_memory;
    if (n < s.slots()) next_memory = {{fresh_label(taken, "mem" + std::to_string(n)), memory_dims[n]}};
    append(out, next_memory);

    const Index din = total_dimension(in), dout = total_dimension(out);
    const Index env = din;
    const Matrix v = haar_isometry(dout * env, din, rng);
    std::vector<Matrix> kraus;
    for (Index e = 0; e < env; ++e) {
      Matrix k(dout, din);
      for (Index o = 0; o < dout; ++o) k.row(o) = v.row(o * env + e);
      kraus.push_back(std::move(k));
    }
    parts.push_back(kraus_to_choi(KrausMap(out, in, std::move(kraus))).op());
    previous_memory = next_memory;
  }
  const LabeledOperator r = assemble(Network(std::move(parts)));
  return QuantumComb(r.hermitian_part(), s);
}

ChoiOperator supermap_apply(const QuantumComb& comb, const std::vector<ChoiOperator>& inputs,
                            const std::vector<int>& slots) {
  const CombStructure& s = comb.structure();
  if (inputs.size() != slots.size())
    throw Error(ErrorCode::SlotArityMismatch, "each input needs exactly one slot");
  std::vector<bool> used(s.slots(), false);
  const LabelSet comb_labels = label_set(s.wires());
  LabelSet linked;
  for (std::size_t k = 0; k < inputs.size(); ++k) {
    const int slot = slots[k];
    if (slot < 0 || slot >= s.slots() || used[slot])
      throw Error(ErrorCode::SlotArityMismatch, "invalid or repeated slot " + std::to_string(slot));
    used[slot] = true;
    const ChoiOperator& c = inputs[k];
    const LabelSet in = label_set(c.in_wires()), out = label_set(c.out_wires());
    for (const auto& w : s.teeth()[slot].outputs)
      if (!in.contains(w.label) || c.op().wire(w.label).dim != w.dim)
        throw Error(ErrorCode::LabelMismatch, "slot " + std::to_string(slot) + " needs input wire '" + w.label + "'");
    for (const auto& w : s.teeth()[slot + 1].inputs)
      if (!out.contains(w.label) || c.op().wire(w.label).dim != w.dim)
        throw Error(ErrorCode::LabelMismatch, "slot " + std::to_string(slot) + " needs output wire '" + w.label + "'");
    for (const auto& w : c.op().wires()) {
      const bool belongs = label_set(s.teeth()[slot].outputs).contains(w.label) ||
                           label_set(s.teeth()[slot + 1].inputs).contains(w.label);
      if (!belongs && comb_labels.contains(w.label))
        throw Error(ErrorCode::LabelMismatch, "input wire '" + w.label + "' collides with the comb");
      if (!belongs && !linked.insert(w.label).second)
        throw Error(ErrorCode::LabelMismatch, "inputs share the extra wire '" + w.label + "'");
    }
  }

  std::vector<LabeledOperator> parts;
  for (const auto& c : inputs) parts.push_back(c.op());
  parts.push_back(comb.op());
  const LabeledOperator result = assemble(Network(std::move(parts)));

  // Open wires keep the direction they had in their owner.
  std::vector<std::string> out_labels, in_labels;
  const LabelSet open = label_set(result.wires());
  for (int n = 0; n <= s.slots(); ++n) {
    for (const auto& w : s.teeth()[n].inputs)
      if (open.contains(w.label)) in_labels.push_back(w.label);
    for (const auto& w : s.teeth()[n].outputs)
      if (open.contains(w.label)) out_labels.push_back(w.label);
  }
  for (const auto& c : inputs) {
    for (const auto& l : c.in_labels())
      if (open.contains(l) && !comb_labels.contains(l)) in_labels.push_back(l);
    for (const auto& l : c.out_labels())
      if (open.contains(l) && !comb_labels.contains(l)) out_labels.push_back(l);
  }
  return ChoiOperator(result, out_labels, in_labels);
}

// ---------------------------------------------------------------------------
// Probabilistic combs

ProbabilisticComb::ProbabilisticComb(std::vector<std::pair<std::string, LabeledOperator>> branches,
                                     CombStructure structure, double tol)
    : structure_(std::move(structure)) {
  if (branches.empty()) throw Error(ErrorCode::InvalidArgument, "probabilistic comb needs a branch");
  std::set<std::string> ids;
  const Wires wires = structure_.wires();
  for (auto& [id, op] : branches) {
    if (!ids.insert(id).second) throw Error(ErrorCode::InvalidArgument, "duplicate branch id '" + id + "'");
    require_structure_labels(op, structure_);
    LabeledOperator aligned = op.aligned_to(wires);
    if (!aligned.is_hermitian() || min_eigenvalue(aligned) < -tol * std::max(1.0, aligned.norm()))
      throw Error(ErrorCode::NotPSD, "branch '" + id + "' is not positive");
    branches_.emplace_back(id, std::move(aligned));
  }
}

LabeledOperator ProbabilisticComb::sum() const {
  LabeledOperator total = LabeledOperator::zero(structure_.wires());
  for (const auto& [id, op] : branches_) total += op;
  return total;
}

QuantumComb register_comb(const ProbabilisticComb& p, const std::string& register_label, double tol) {
  const CombStructure& s = p.structure();
  const CausalityReport report = verify_causality(p.sum(), s, tol);
  if (!report.pass)
    throw Error(ErrorCode::InvalidBranchSum,
                "branch sum fails causality (max residual " + std::to_string(report.max_residual()) +
                    ", min eigenvalue " + std::to_string(report.min_eigenvalue) + ")");
  if (label_set(s.wires()).contains(register_label))
    throw Error(ErrorCode::DuplicateLabel, "register label '" + register_label + "' already in use");

  const int k = static_cast<int>(p.branches().size());
  const Wire reg{register_label, k};
  std::vector<Tooth> teeth = s.teeth();
  teeth.back().outputs.push_back(reg);
  CombStructure enlarged(std::move(teeth));

  LabeledOperator total = LabeledOperator::zero(enlarged.wires());
  for (int i = 0; i < k; ++i) {
    Matrix proj = Matrix::Zero(k, k);
    proj(i, i) = 1.0;
    total += tensor(p.branches()[i].second, LabeledOperator({reg}, proj));
  }
  return QuantumComb(total, std::move(enlarged));
}

LabeledOperator postselect_branch(const LabeledOperator& register_comb_op, const std::string& register_label,
                                  int outcome) {
  const Wire& reg = register_comb_op.wire(register_label);
  if (outcome < 0 || outcome >= reg.dim)
    throw Error(ErrorCode::IndexOutOfRange, "register outcome " + std::to_string(outcome) + " out of range");
  Matrix proj = Matrix::Zero(reg.dim, reg.dim);
  proj(outcome, outcome) = 1.0;
  return link_product(register_comb_op, LabeledOperator({reg}, proj));
}

}  // namespace qcomb

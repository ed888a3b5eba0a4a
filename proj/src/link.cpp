#include "qcomb/link.hpp"

#include <limits>
#include <map>

namespace qcomb {

namespace {

struct Partition {
  Wires only_a, shared, only_b;
};

Partition partition(const LabeledOperator& a, const LabeledOperator& b) {
  Partition p;
  for (const auto& w : a.wires()) {
    if (b.has_label(w.label)) {
      if (b.wire(w.label).dim != w.dim)
        throw Error(ErrorCode::DimMismatch, "shared wire '" + w.label + "' has mismatched dimension");
      p.shared.push_back(w);
    } else {
      p.only_a.push_back(w);
    }
  }
  for (const auto& w : b.wires())
    if (!a.has_label(w.label)) p.only_b.push_back(w);
  return p;
}

std::vector<std::string> cat_labels(const Wires& x, const Wires& y) {
  auto out = labels_of(x);
  const auto tail = labels_of(y);
  out.insert(out.end(), tail.begin(), tail.end());
  return out;
}

}  // namespace

LabeledOperator link_product(const LabeledOperator& a, const LabeledOperator& b) {
  const Partition p = partition(a, b);
  const Matrix am = permute_wires(a, cat_labels(p.only_a, p.shared)).matrix();
  const Matrix bm = permute_wires(b, cat_labels(p.shared, p.only_b)).matrix();
  const Index da = total_dimension(p.only_a);
  const Index dj = total_dimension(p.shared);
  const Index db = total_dimension(p.only_b);

  // C[(a,b),(a',b')] = sum_{j,k} A[(a,k),(a',j)] B[(k,b),(j,b')], evaluated as a
  // single matrix product of the realigned operands.
  Matrix ar(da * da, dj * dj);
  for (Index x = 0; x < da; ++x)
    for (Index y = 0; y < da; ++y)
      for (Index k = 0; k < dj; ++k)
        for (Index j = 0; j < dj; ++j) ar(x * da + y, k * dj + j) = am(x * dj + k, y * dj + j);
  Matrix br(dj * dj, db * db);
  for (Index k = 0; k < dj; ++k)
    for (Index j = 0; j < dj; ++j)
      for (Index x = 0; x < db; ++x)
        for (Index y = 0; y < db; ++y) br(k * dj + j, x * db + y) = bm(k * db + x, j * db + y);
  const Matrix cr = ar * br;

  Matrix c(da * db, da * db);
  for (Index x = 0; x < da; ++x)
    for (Index y = 0; y < da; ++y)
      for (Index u = 0; u < db; ++u)
        for (Index v = 0; v < db; ++v) c(x * db + u, y * db + v) = cr(x * da + y, u * db + v);

  Wires wires = p.only_a;
  wires.insert(wires.end(), p.only_b.begin(), p.only_b.end());
  return {std::move(wires), std::move(c)};
}

LabeledOperator link_product_literal(const LabeledOperator& a, const LabeledOperator& b) {
  const Partition p = partition(a, b);
  const LabelSet joined = label_set(p.shared);
  const LabeledOperator a_t = partial_transpose(a, joined);
  const LabeledOperator product = multiply(a_t, b);
  return permute_wires(partial_trace(product, joined), cat_labels(p.only_a, p.only_b));
}

Network::Network(std::vector<LabeledOperator> parts) : parts_(std::move(parts)) {
  std::map<std::string, int> count;
  for (const auto& part : parts_)
    for (const auto& w : part.wires())
      if (++count[w.label] > 2)
        throw Error(ErrorCode::TripleLabel, "label '" + w.label + "' joins more than two parts");
}

LabelSet Network::connected_labels() const {
  std::map<std::string, int> count;
  for (const auto& part : parts_)
    for (const auto& w : part.wires()) ++count[w.label];
  LabelSet out;
  for (const auto& [label, n] : count)
    if (n == 2) out.insert(label);
  return out;
}

LabelSet Network::open_labels() const {
  std::map<std::string, int> count;
  for (const auto& part : parts_)
    for (const auto& w : part.wires()) ++count[w.label];
  LabelSet out;
  for (const auto& [label, n] : count)
    if (n == 1) out.insert(label);
  return out;
}

LabeledOperator assemble(const Network& net, AssembleOrder order) {
  const auto& parts = net.parts();
  if (parts.empty()) return LabeledOperator::scalar(1.0);
  if (order == AssembleOrder::Sequential) {
    LabeledOperator acc = parts.front();
    for (std::size_t k = 1; k < parts.size(); ++k) acc = link_product(acc, parts[k]);
    return acc;
  }

  std::vector<LabeledOperator> pool = parts;
  while (pool.size() > 1) {
    std::size_t best_i = 0, best_j = 1;
    Index best_dim = std::numeric_limits<Index>::max();
    for (std::size_t i = 0; i < pool.size(); ++i)
      for (std::size_t j = i + 1; j < pool.size(); ++j) {
        const Partition p = partition(pool[i], pool[j]);
        const Index dim = total_dimension(p.only_a) * total_dimension(p.only_b);
        if (dim < best_dim) {
          best_dim = dim;
          best_i = i;
          best_j = j;
        }
      }
    LabeledOperator merged = link_product(pool[best_i], pool[best_j]);
    pool.erase(pool.begin() + static_cast<std::ptrdiff_t>(best_j));
    pool[best_i] = std::move(merged);
  }
  return pool.front();
}

}  // namespace qcomb

#include "qcomb/objective.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <tuple>

#include "qcomb/choi.hpp"

namespace qcomb {

namespace {

using CacheKey = std::tuple<char, int, int, int, int>;

std::mutex cache_mutex;
std::map<CacheKey, PerformanceOperator>& cache() {
  static std::map<CacheKey, PerformanceOperator> instance;
  return instance;
}

template <typename Build>
PerformanceOperator cached(const CacheKey& key, Build build) {
  {
    std::lock_guard lock(cache_mutex);
    const auto it = cache().find(key);
    if (it != cache().end()) return it->second;
  }
  PerformanceOperator built = build();
  std::lock_guard lock(cache_mutex);
  return cache().emplace(key, std::move(built)).first->second;
}

void check_size(const CombStructure& s) {
  if (s.dimension() > kMaxDimension)
    throw Error(ErrorCode::DimOverflow, "performance operator dimension " + std::to_string(s.dimension()) +
                                            " exceeds " + std::to_string(kMaxDimension));
}

std::string sub_label(const std::string& stem, int k, int count) {
  return count == 1 ? stem : stem + "." + std::to_string(k);
}

LabeledOperator omega_pair(const Wire& out, const Wire& in) {
  return LabeledOperator::projector(max_entangled(Wires{out}, Wires{in}));
}

}  // namespace

CombStructure cloning_structure(int n, int m, int d) {
  if (n < 1 || m < 1 || d < 2) throw Error(ErrorCode::InvalidArgument, "cloning needs N, M >= 1 and d >= 2");
  std::vector<Tooth> teeth(n + 1);
  for (int k = 0; k < m; ++k) teeth[0].inputs.push_back({sub_label("0", k, m), d});
  for (int slot = 1; slot <= n; ++slot) {
    teeth[slot - 1].outputs.push_back({std::to_string(2 * slot - 1), d});
    teeth[slot].inputs.push_back({std::to_string(2 * slot), d});
  }
  for (int k = 0; k < m; ++k) teeth[n].outputs.push_back({sub_label(std::to_string(2 * n + 1), k, m), d});
  return CombStructure(std::move(teeth));
}

CombStructure learning_structure(int n, int d) {
  if (n < 1 || d < 2) throw Error(ErrorCode::InvalidArgument, "learning needs N >= 1 and d >= 2");
  std::vector<Tooth> teeth(n + 1);
  for (int slot = 1; slot <= n; ++slot) {
    teeth[slot - 1].outputs.push_back({std::to_string(2 * slot - 1), d});
    teeth[slot].inputs.push_back({std::to_string(2 * slot), d});
  }
  teeth[n].inputs.push_back({"psi", d});
  teeth[n].outputs.push_back({std::to_string(2 * n + 1), d});
  return CombStructure(std::move(teeth));
}

PerformanceOperator cloning_objective(int n, int m, int d, AveragingScheme scheme) {
  const CombStructure s = cloning_structure(n, m, d);
  check_size(s);
  return cached({'c', n, m, d, static_cast<int>(scheme)}, [&] {
    TwirlSpec twirl{d, {}, scheme};
    LabeledOperator base;
    for (int k = 0; k < m; ++k) {
      const Wire out{sub_label(std::to_string(2 * n + 1), k, m), d};
      const Wire in{sub_label("0", k, m), d};
      base = tensor(base, omega_pair(out, in));
      twirl.pattern[out.label] = TwirlTag::U;
    }
    for (int slot = 1; slot <= n; ++slot) {
      const Wire out{std::to_string(2 * slot), d};
      const Wire in{std::to_string(2 * slot - 1), d};
      base = tensor(base, omega_pair(out, in));
      twirl.pattern[out.label] = TwirlTag::UConj;
    }
    LabeledOperator omega = haar_average(twirl, base.aligned_to(s.wires()));
    omega *= Complex(std::pow(static_cast<double>(d), -2.0 * m));
    return PerformanceOperator{std::move(omega), twirl,
                               "cloning " + std::to_string(n) + "->" + std::to_string(m) + ", d=" + std::to_string(d)};
  });
}

PerformanceOperator learning_objective(int n, int d, AveragingScheme scheme) {
  const CombStructure s = learning_structure(n, d);
  check_size(s);
  return cached({'l', n, 0, d, static_cast<int>(scheme)}, [&] {
    TwirlSpec twirl{d, {}, scheme};
    LabeledOperator base;
    for (int slot = 1; slot <= n; ++slot) {
      const Wire out{std::to_string(2 * slot), d};
      const Wire in{std::to_string(2 * slot - 1), d};
      base = tensor(base, omega_pair(out, in));
      twirl.pattern[out.label] = TwirlTag::UConj;
    }
    const Wire target_out{std::to_string(2 * n + 1), d};
    base = tensor(base, omega_pair(target_out, Wire{"psi", d}));
    twirl.pattern[target_out.label] = TwirlTag::U;
    LabeledOperator omega = haar_average(twirl, base.aligned_to(s.wires()));
    omega *= Complex(1.0 / (static_cast<double>(d) * d));
    return PerformanceOperator{std::move(omega), twirl,
                               "learning from " + std::to_string(n) + " uses, d=" + std::to_string(d)};
  });
}

double cloning_closed_form(int d) {
  const double dd = d;
  return (dd + std::sqrt(dd * dd - 1.0)) / (dd * dd * dd);
}

std::optional<double> learning_reference(int n, int d) {
  const double dd = static_cast<double>(d) * d;
  if (n == 1) return 2.0 / dd;
  if (n == 2) return 3.0 / dd;
  return std::nullopt;
}

double estimation_reference(int n, int m, int d) {
  if (n != 1 || m != 2)
    throw Error(ErrorCode::Unsupported, "estimation reference is stored only for 1 -> 2 cloning");
  if (d < 2) throw Error(ErrorCode::InvalidArgument, "dimension must be at least 2");
  if (d == 2) return 5.0 / 16.0;
  return 6.0 / std::pow(static_cast<double>(d), 4);
}

}  // namespace qcomb

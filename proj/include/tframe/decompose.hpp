#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

#include "tframe/errors.hpp"
#include "tframe/report.hpp"
#include "tframe/rng.hpp"

namespace tframe {

// v written as a convex combination of k-sparse atoms that all share its l1
// mass and respect the per-coordinate cap C/k.
struct SparseDecomposition {
  int k = 0;
  double cap = 0.0;
  std::vector<Vector> atoms;
  std::vector<double> weights;
};

namespace detail {

constexpr double kZeroSnap = 1e-14;

// One mass-shifting split. The two branches move mass between the same pair
// of slots in opposite directions, so they produce the same child value
// multiset; map_plus / map_minus record where each parent slot's value lives
// in the sorted child.
struct ShiftStep {
  double x_plus = 1.0;
  double x_minus = 0.0;
  std::vector<int> map_plus;
  std::vector<int> map_minus;
};

inline std::vector<int> sorted_slot_map(const std::vector<double>& parent_values,
                                        std::vector<double>* child_values) {
  const int m = static_cast<int>(parent_values.size());
  std::vector<int> order(static_cast<std::size_t>(m));
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    return parent_values[static_cast<std::size_t>(a)] < parent_values[static_cast<std::size_t>(b)];
  });
  std::vector<int> map(static_cast<std::size_t>(m));
  for (int pos = 0; pos < m; ++pos) {
    map[static_cast<std::size_t>(order[static_cast<std::size_t>(pos)])] = pos;
    if (child_values) (*child_values)[static_cast<std::size_t>(pos)] = parent_values[static_cast<std::size_t>(order[static_cast<std::size_t>(pos)])];
  }
  return map;
}

}  // namespace detail

// Decompose v into a convex combination of k-sparse atoms by repeatedly
// shifting mass between the two smallest-magnitude unpinned coordinates until
// at most k remain nonzero. Each shift runs to the first pin in both
// directions (a coordinate reaching C/k or reaching 0) and v splits as the
// convex combination of the two endpoints.
//
// Both endpoints of a shift carry the same magnitude multiset, so the
// distinct states form a single chain; the atoms are recovered by folding the
// per-step slot permutations back up the chain, accumulating weights of
// coinciding atoms as they merge.
inline SparseDecomposition convex_k_sparse_decompose(const Vector& v, int k, double c,
                                                     std::uint64_t atom_budget = 1u << 20) {
  const int n = static_cast<int>(v.size());
  if (n > 64) throw invalid_input("convex_k_sparse_decompose: n must be at most 64");
  if (k < 1) throw invalid_input("convex_k_sparse_decompose: k must be at least 1");
  if (!(c >= 0.0)) throw invalid_input("convex_k_sparse_decompose: C must be nonnegative");
  if (!v.allFinite()) throw invalid_input("convex_k_sparse_decompose: v has non-finite entries");
  if (atom_budget < 1) throw invalid_input("convex_k_sparse_decompose: atom budget must be positive");
  const double cap = c / k;
  const double l1 = v.lpNorm<1>();
  const double linf = n > 0 ? v.lpNorm<Eigen::Infinity>() : 0.0;
  if (l1 > c + 1e-12)
    throw invalid_input("convex_k_sparse_decompose: ||v||_1 = " + std::to_string(l1) +
                        " exceeds C = " + std::to_string(c));
  if (linf > cap + 1e-12)
    throw invalid_input("convex_k_sparse_decompose: ||v||_inf = " + std::to_string(linf) +
                        " exceeds C/k = " + std::to_string(cap));

  SparseDecomposition dec;
  dec.k = k;
  dec.cap = cap;

  // Slots: the nonzero coordinates, sorted ascending by magnitude.
  std::vector<int> orig;
  for (int i = 0; i < n; ++i)
    if (std::abs(v(i)) > detail::kZeroSnap) orig.push_back(i);
  if (static_cast<int>(orig.size()) <= k) {
    dec.atoms.push_back(v);
    dec.weights.push_back(1.0);
    return dec;
  }
  std::sort(orig.begin(), orig.end(), [&](int a, int b) {
    const double ma = std::abs(v(a)), mb = std::abs(v(b));
    if (ma != mb) return ma < mb;
    return a < b;
  });
  const int m = static_cast<int>(orig.size());
  std::vector<double> state(static_cast<std::size_t>(m));
  for (int s = 0; s < m; ++s) state[static_cast<std::size_t>(s)] = std::abs(v(orig[static_cast<std::size_t>(s)]));

  std::vector<detail::ShiftStep> chain;
  auto nonzero_count = [](const std::vector<double>& vals) {
    return static_cast<int>(std::count_if(vals.begin(), vals.end(), [](double x) { return x > 0.0; }));
  };

  while (nonzero_count(state) > k) {
    std::vector<int> eligible;
    for (int s = 0; s < m && static_cast<int>(eligible.size()) < 2; ++s)
      if (state[static_cast<std::size_t>(s)] > 0.0 && state[static_cast<std::size_t>(s)] < cap)
        eligible.push_back(s);

    detail::ShiftStep step;
    std::vector<double> parent_plus = state;
    std::vector<double> parent_minus = state;
    if (eligible.size() < 2) {
      // Too much mass is already pinned at the cap; only tolerance-sized
      // slack (the preconditions allow 1e-12 of it) can be left over, so the
      // smallest nonzero slot is noise and gets zeroed with full weight.
      int smallest = -1;
      for (int s = 0; s < m; ++s)
        if (state[static_cast<std::size_t>(s)] > 0.0) { smallest = s; break; }
      if (smallest < 0 || state[static_cast<std::size_t>(smallest)] > 1e-9)
        throw std::runtime_error("convex_k_sparse_decompose: shift invariant violated");
      parent_plus[static_cast<std::size_t>(smallest)] = 0.0;
      parent_minus = parent_plus;
      step.x_plus = 1.0;
      step.x_minus = 0.0;
    } else {
      const int a = eligible[0], b = eligible[1];
      const double mi = state[static_cast<std::size_t>(a)];
      const double mj = state[static_cast<std::size_t>(b)];
      const double t_plus = std::min(cap - mi, mj);
      const double t_minus = std::min(cap - mj, mi);
      const double sum = mi + mj;
      const double val_big = std::min(cap, sum);
      double val_rem = sum - val_big;
      if (val_rem <= detail::kZeroSnap) val_rem = 0.0;
      step.x_plus = t_minus / (t_plus + t_minus);
      step.x_minus = t_plus / (t_plus + t_minus);
      parent_plus[static_cast<std::size_t>(a)] = val_big;
      parent_plus[static_cast<std::size_t>(b)] = val_rem;
      parent_minus[static_cast<std::size_t>(a)] = val_rem;
      parent_minus[static_cast<std::size_t>(b)] = val_big;
    }
    std::vector<double> child(static_cast<std::size_t>(m));
    step.map_plus = detail::sorted_slot_map(parent_plus, &child);
    step.map_minus = detail::sorted_slot_map(parent_minus, nullptr);
    chain.push_back(std::move(step));
    state = std::move(child);
  }

  // Fold the chain back up: start from the terminal state's single atom and
  // pull it through each step's two branches, merging coinciding atoms.
  std::map<std::vector<double>, double> atoms;
  atoms.emplace(state, 1.0);
  std::vector<double> pulled(static_cast<std::size_t>(m));
  for (auto it = chain.rbegin(); it != chain.rend(); ++it) {
    std::map<std::vector<double>, double> parents;
    for (const auto& [profile, w] : atoms) {
      for (int s = 0; s < m; ++s)
        pulled[static_cast<std::size_t>(s)] = profile[static_cast<std::size_t>(it->map_plus[static_cast<std::size_t>(s)])];
      parents[pulled] += it->x_plus * w;
      if (it->x_minus > 0.0) {
        for (int s = 0; s < m; ++s)
          pulled[static_cast<std::size_t>(s)] = profile[static_cast<std::size_t>(it->map_minus[static_cast<std::size_t>(s)])];
        parents[pulled] += it->x_minus * w;
      }
      if (parents.size() > atom_budget)
        throw budget_exceeded("convex_k_sparse_decompose: more than " +
                              std::to_string(atom_budget) + " distinct atoms");
    }
    atoms = std::move(parents);
  }

  // Back to original coordinates and signs, then canonical order.
  std::vector<std::pair<Vector, double>> out;
  out.reserve(atoms.size());
  for (const auto& [profile, w] : atoms) {
    Vector atom = Vector::Zero(n);
    for (int s = 0; s < m; ++s) {
      const int i = orig[static_cast<std::size_t>(s)];
      atom(i) = (v(i) < 0.0 ? -1.0 : 1.0) * profile[static_cast<std::size_t>(s)];
    }
    out.emplace_back(std::move(atom), w);
  }
  auto support_of = [n](const Vector& a) {
    std::vector<int> s;
    for (int i = 0; i < n; ++i)
      if (a(i) != 0.0) s.push_back(i);
    return s;
  };
  auto lex_less = [&](const std::pair<Vector, double>& lhs, const std::pair<Vector, double>& rhs) {
    const auto sl = support_of(lhs.first);
    const auto sr = support_of(rhs.first);
    if (sl != sr) return sl < sr;
    for (int i = 0; i < n; ++i)
      if (lhs.first(i) != rhs.first(i)) return lhs.first(i) < rhs.first(i);
    return false;
  };
  std::sort(out.begin(), out.end(), lex_less);
  for (auto& [atom, w] : out) {
    if (!dec.atoms.empty() &&
        (dec.atoms.back() - atom).cwiseAbs().maxCoeff() <= 1e-12) {
      dec.weights.back() += w;
    } else {
      dec.atoms.push_back(std::move(atom));
      dec.weights.push_back(w);
    }
  }
  return dec;
}

// Independent audit of a decomposition against the vector it claims to
// represent: reconstruction, per-atom sparsity, l1 equality, the linf cap,
// and convexity of the weights.
inline std::vector<CheckLine> validate_decomposition(const Vector& v, const SparseDecomposition& dec,
                                                     double tol = 1e-10) {
  if (!(tol > 0.0)) throw invalid_input("validate_decomposition: tol must be positive");
  if (dec.atoms.size() != dec.weights.size())
    throw invalid_input("validate_decomposition: atom/weight count mismatch");
  const int n = static_cast<int>(v.size());
  for (const auto& atom : dec.atoms)
    if (atom.size() != n) throw invalid_input("validate_decomposition: atom dimension mismatch");

  std::vector<CheckLine> checks;
  const double l1 = v.lpNorm<1>();

  Vector recon = Vector::Zero(n);
  for (std::size_t t = 0; t < dec.atoms.size(); ++t) recon += dec.weights[t] * dec.atoms[t];
  const double recon_resid = dec.atoms.empty() ? v.lpNorm<Eigen::Infinity>()
                                               : (recon - v).cwiseAbs().maxCoeff();
  checks.push_back({"reconstruction", recon_resid, tol, recon_resid <= tol});

  double excess_nnz = 0.0;
  double l1_resid = 0.0;
  double cap_resid = 0.0;
  for (const auto& atom : dec.atoms) {
    int nnz = 0;
    for (int i = 0; i < n; ++i)
      if (std::abs(atom(i)) > detail::kZeroSnap) ++nnz;
    excess_nnz = std::max(excess_nnz, static_cast<double>(nnz - dec.k));
    l1_resid = std::max(l1_resid, std::abs(atom.lpNorm<1>() - l1));
    const double linf = n > 0 ? atom.lpNorm<Eigen::Infinity>() : 0.0;
    cap_resid = std::max(cap_resid, linf - dec.cap);
  }
  excess_nnz = std::max(excess_nnz, 0.0);
  cap_resid = std::max(cap_resid, 0.0);
  const bool have_atoms = !dec.atoms.empty();
  checks.push_back({"sparsity", excess_nnz, 0.0, have_atoms && excess_nnz == 0.0});
  checks.push_back({"l1_equality", l1_resid, tol, have_atoms && l1_resid <= tol});
  checks.push_back({"linf_cap", cap_resid, tol, have_atoms && cap_resid <= tol});

  double wsum = 0.0, wmin = have_atoms ? std::numeric_limits<double>::infinity() : 0.0;
  for (double w : dec.weights) {
    wsum += w;
    wmin = std::min(wmin, w);
  }
  const double convex_resid = std::max(std::abs(wsum - 1.0), std::max(0.0, -wmin));
  checks.push_back({"convex_weights", convex_resid, tol, convex_resid <= tol});
  return checks;
}

}  // namespace tframe

#pragma once

#include <optional>
#include <string>

#include "ecrm/common.hpp"
#include "ecrm/hierarchy.hpp"
#include "ecrm/output_space.hpp"

namespace ecrm {

enum class LossKind { zero_one, hamming, hierarchical, footrule, absolute, square };

std::string to_string(LossKind kind);
LossKind parse_loss_kind(const std::string& name);

/// A loss l(y, y') over encoded outputs. The hierarchical loss carries its
/// arborescence and per-node penalties c.
struct LossSpec {
  LossKind kind = LossKind::hamming;
  std::optional<HierarchyDag> hierarchy;
  Vector node_weights;

  static LossSpec zero_one() { return {LossKind::zero_one, {}, {}}; }
  static LossSpec hamming() { return {LossKind::hamming, {}, {}}; }
  static LossSpec footrule() { return {LossKind::footrule, {}, {}}; }
  static LossSpec absolute() { return {LossKind::absolute, {}, {}}; }
  static LossSpec square() { return {LossKind::square, {}, {}}; }
  /// Sibling-weighted hierarchical loss.
  static LossSpec hierarchical(const HierarchyDag& dag);
  static LossSpec hierarchical(const HierarchyDag& dag, Vector c);

  /// l(y, yp).
  double operator()(const Vector& y, const Vector& yp) const;

  /// Decomposes over coordinates of a binary encoding (hamming, hierarchical,
  /// footrule via the d*d assignment indicator).
  bool is_additive() const {
    return kind == LossKind::hamming || kind == LossKind::hierarchical ||
           kind == LossKind::footrule;
  }
};

double zero_one(const Vector& y, const Vector& yp);
double hamming(const Vector& y, const Vector& yp);

/// Root weight 1; every other node gets its parent's weight divided by the
/// number of children of that parent. Requires an arborescence.
Vector sibling_weights(const HierarchyDag& dag);

/// sum_j c_j * 1(y_j != y'_j and y_k == y'_k for every ancestor k of j).
double hierarchical_loss(const HierarchyDag& dag, const Vector& c, const Vector& y,
                         const Vector& yp);

/// Closed form linear in y for fixed y' (and vice versa):
///   c_s (y_s + y'_s - 2 y'_s y_s)
///     + sum_{(j,k) parent->child} c_k (y'_k y_j + (y'_j - y'_j y'_k - y'_k) y_k).
double hierarchical_loss_closed(const HierarchyDag& dag, const Vector& c, const Vector& y,
                                const Vector& yp);

/// Spearman's footrule between two rank vectors (entries 1..d).
double footrule(const Vector& sigma, const Vector& sigmap);

double vector_loss(LossKind kind, const Vector& y, const Vector& yp);

/// Smallest L with l(y, y') <= L over the space (exact where cheap,
/// otherwise a valid upper bound).
double loss_bound(const LossSpec& loss, const OutputSpace& space);

/// sum_i w_i l(y, labels.row(i)).
double weighted_risk(const LossSpec& loss, const Vector& y, const Matrix& labels,
                     const Vector& weights);

/// Linear objective c^T z + offset over the binary encoding z of an output
/// that reproduces sum_i w_i l(y, y_i). For hamming and hierarchical z = y;
/// for footrule z is the row-major d*d assignment indicator.
struct AdditiveCoefficients {
  Vector coefficients;
  double offset = 0.0;
};

AdditiveCoefficients additive_coefficients(const LossSpec& loss, const Matrix& labels,
                                           const Vector& weights);

}  // namespace ecrm

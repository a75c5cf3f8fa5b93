/*!
 * Copyright (c) 2026 the lipi authors. All rights reserved.
 * Licensed under the Apache License, Version 2.0. See LICENSE in the project root.
 */
#pragma once

#include <cmath>
#include <span>
#include <string>

#include <Eigen/Core>

#include "json.hpp"
#include "lipi/error.hpp"

namespace lipi {

enum class LossKind { cross_entropy, weighted_cross_entropy, focal };

inline std::string_view to_string(LossKind kind) {
  switch (kind) {
    case LossKind::cross_entropy:
      return "ce";
    case LossKind::weighted_cross_entropy:
      return "weighted_ce";
    case LossKind::focal:
      return "focal";
  }
  return "?";
}

inline LossKind loss_kind_from_string(std::string_view s) {
  if (s == "ce") return LossKind::cross_entropy;
  if (s == "weighted_ce") return LossKind::weighted_cross_entropy;
  if (s == "focal") return LossKind::focal;
  throw InputError("unknown loss kind '" + std::string(s) +
                   "' (expected ce, weighted_ce, or focal)");
}

// Probabilities below this are clamped before taking logs; a clamp is
// reported through LossValue::clamped instead of silently.
inline constexpr double kMinTargetProb = 1e-12;

/// Which loss to compute and its parameters.
///   cross_entropy:           -log p_t
///   weighted_cross_entropy:  -w_t log p_t         (class_weights, one per class)
///   focal:                   -a_t (1-p_t)^gamma log p_t
/// For focal, a_t is the scalar `alpha` unless `alpha_per_class` is set.
struct LossSpec {
  LossKind kind = LossKind::cross_entropy;
  Eigen::VectorXd class_weights;    // weighted_cross_entropy only
  double alpha = 1.0;               // focal balancing factor, in (0, 1]
  double gamma = 0.0;               // focal focusing parameter, >= 0
  Eigen::VectorXd alpha_per_class;  // optional focal per-class balancing

  void validate(Eigen::Index num_classes) const;
};

inline void LossSpec::validate(Eigen::Index num_classes) const {
  switch (kind) {
    case LossKind::cross_entropy:
      break;
    case LossKind::weighted_cross_entropy:
      if (class_weights.size() != num_classes) {
        throw InputError("weighted_ce needs one weight per class (" +
                         std::to_string(num_classes) + "), got " +
                         std::to_string(class_weights.size()));
      }
      if ((class_weights.array() <= 0.0).any()) {
        throw InputError("weighted_ce weights must be positive");
      }
      break;
    case LossKind::focal:
      if (!(alpha > 0.0) || alpha > 1.0) {
        throw InputError("focal alpha must be in (0, 1]");
      }
      if (!(gamma >= 0.0)) {
        throw InputError("focal gamma must be >= 0");
      }
      if (alpha_per_class.size() > 0) {
        if (alpha_per_class.size() != num_classes) {
          throw InputError("focal alpha_per_class needs one entry per class");
        }
        if ((alpha_per_class.array() <= 0.0).any() ||
            (alpha_per_class.array() > 1.0).any()) {
          throw InputError("focal alpha_per_class entries must be in (0, 1]");
        }
      }
      // Focal carries its own balancing; it never stacks with class weights.
      if (class_weights.size() > 0) {
        throw InputError("focal loss does not combine with class weights");
      }
      break;
  }
}

inline void to_json(nlohmann::json& j, const LossSpec& spec) {
  j = nlohmann::json{{"kind", std::string(to_string(spec.kind))}};
  if (spec.kind == LossKind::weighted_cross_entropy &&
      spec.class_weights.size() > 0) {
    j["weights"] = std::vector<double>(
        spec.class_weights.data(),
        spec.class_weights.data() + spec.class_weights.size());
  }
  if (spec.kind == LossKind::focal) {
    j["alpha"] = spec.alpha;
    j["gamma"] = spec.gamma;
    if (spec.alpha_per_class.size() > 0) {
      j["alpha_per_class"] = std::vector<double>(
          spec.alpha_per_class.data(),
          spec.alpha_per_class.data() + spec.alpha_per_class.size());
    }
  }
}

inline void from_json(const nlohmann::json& j, LossSpec& spec) {
  spec = LossSpec{};
  spec.kind = loss_kind_from_string(j.at("kind").get<std::string>());
  if (spec.kind == LossKind::weighted_cross_entropy && j.contains("weights") &&
      j["weights"].is_array()) {
    const auto w = j["weights"].get<std::vector<double>>();
    spec.class_weights =
        Eigen::Map<const Eigen::VectorXd>(w.data(), static_cast<Eigen::Index>(w.size()));
  }
  if (spec.kind == LossKind::focal) {
    if (!j.contains("alpha") || !j.contains("gamma")) {
      throw InputError("focal loss requires both alpha and gamma");
    }
    spec.alpha = j.at("alpha").get<double>();
    spec.gamma = j.at("gamma").get<double>();
    if (j.contains("alpha_per_class")) {
      const auto a = j["alpha_per_class"].get<std::vector<double>>();
      spec.alpha_per_class =
          Eigen::Map<const Eigen::VectorXd>(a.data(), static_cast<Eigen::Index>(a.size()));
    }
  }
}

template <typename Scalar>
struct LossValueT {
  Scalar value = Scalar(0);
  Eigen::VectorX<Scalar> grad_logits;
  bool clamped = false;
};
using LossValue = LossValueT<double>;

template <typename Scalar>
struct BatchLossT {
  Scalar value = Scalar(0);
  Eigen::MatrixX<Scalar> grad_rows;  // one gradient row per example
  bool clamped = false;
};
using BatchLoss = BatchLossT<double>;

/// Numerically stable softmax (max-subtraction). Throws on non-finite input.
template <typename Derived>
Eigen::VectorX<typename Derived::Scalar> softmax(
    const Eigen::MatrixBase<Derived>& logits) {
  using Scalar = typename Derived::Scalar;
  Eigen::VectorX<Scalar> z = logits;
  if (z.size() == 0 || !z.allFinite()) {
    throw InputError("softmax requires a non-empty finite logit vector");
  }
  const Scalar shift = z.maxCoeff();
  Eigen::VectorX<Scalar> p = (z.array() - shift).exp();
  p /= p.sum();
  return p;
}

/// Loss value and exact analytic gradient with respect to the logits.
template <typename Derived>
LossValueT<typename Derived::Scalar> loss(const LossSpec& spec,
                                          const Eigen::MatrixBase<Derived>& logits,
                                          int target) {
  using Scalar = typename Derived::Scalar;
  const Eigen::Index num_classes = logits.size();
  spec.validate(num_classes);
  if (target < 0 || target >= num_classes) {
    throw InputError("loss target " + std::to_string(target) +
                     " out of range for " + std::to_string(num_classes) +
                     " classes");
  }

  LossValueT<Scalar> out;
  const Eigen::VectorX<Scalar> p = softmax(logits);
  const Scalar raw_pt = p(target);
  out.clamped = raw_pt < Scalar(kMinTargetProb);
  const Scalar pt = out.clamped ? Scalar(kMinTargetProb) : raw_pt;
  const Scalar log_pt = std::log(pt);

  switch (spec.kind) {
    case LossKind::cross_entropy: {
      out.value = -log_pt;
      out.grad_logits = p;
      out.grad_logits(target) -= Scalar(1);
      break;
    }
    case LossKind::weighted_cross_entropy: {
      const auto w = static_cast<Scalar>(spec.class_weights(target));
      out.value = -w * log_pt;
      out.grad_logits = w * p;
      out.grad_logits(target) -= w;
      break;
    }
    case LossKind::focal: {
      const auto a = static_cast<Scalar>(spec.alpha_per_class.size() > 0
                                             ? spec.alpha_per_class(target)
                                             : spec.alpha);
      const auto g = static_cast<Scalar>(spec.gamma);
      const Scalar one_minus = Scalar(1) - pt;
      // pow(0, 0) == 1, so gamma == 0 reduces exactly to a * cross-entropy.
      const Scalar mod = std::pow(one_minus, g);
      out.value = -a * mod * log_pt;
      // dL/dp_t; the (1-p_t)^(gamma-1) term vanishes in the limit p_t -> 1.
      const Scalar focus_term =
          (g > Scalar(0) && one_minus > Scalar(0))
              ? g * std::pow(one_minus, g - Scalar(1)) * log_pt
              : Scalar(0);
      const Scalar dloss_dpt = a * focus_term - a * mod / pt;
      // Chain rule through the softmax: dp_t/dz_j = p_t (delta_tj - p_j).
      out.grad_logits = (-dloss_dpt * pt) * p;
      out.grad_logits(target) = dloss_dpt * pt * (Scalar(1) - p(target));
      break;
    }
  }
  return out;
}

/// Mean loss over a batch; gradient rows stacked per example.
template <typename Derived>
BatchLossT<typename Derived::Scalar> batch_loss(
    const LossSpec& spec, const Eigen::MatrixBase<Derived>& logit_rows,
    std::span<const int> targets) {
  using Scalar = typename Derived::Scalar;
  const Eigen::Index rows = logit_rows.rows();
  if (rows == 0) {
    throw InputError("batch_loss requires a non-empty batch");
  }
  if (static_cast<std::size_t>(rows) != targets.size()) {
    throw InputError("batch_loss: " + std::to_string(rows) + " logit rows vs " +
                     std::to_string(targets.size()) + " targets");
  }
  BatchLossT<Scalar> out;
  out.grad_rows.resize(rows, logit_rows.cols());
  const Scalar inv_n = Scalar(1) / static_cast<Scalar>(rows);
  for (Eigen::Index i = 0; i < rows; ++i) {
    const auto per_example =
        loss(spec, logit_rows.row(i).transpose(), targets[static_cast<std::size_t>(i)]);
    out.value += per_example.value * inv_n;
    out.grad_rows.row(i) = per_example.grad_logits.transpose() * inv_n;
    out.clamped = out.clamped || per_example.clamped;
  }
  return out;
}

}  // namespace lipi

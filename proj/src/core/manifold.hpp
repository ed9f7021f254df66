#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "core/constraints.hpp"
#include "core/network.hpp"
#include "core/relaxation.hpp"

namespace logikon {

struct RetractionConfig {
  std::size_t max_newton_steps = 20;
  // A Newton correction shorter than this counts as stagnation.
  double inner_tolerance = 1e-15;
};

struct OptimizerConfig {
  double learning_rate = 0.5;
  double epsilon = 1e-8;  // bound on ||G(W)||_2 for accepted iterates
  std::size_t max_iterations = 5000;
  RetractionConfig retraction;
  double beta = 8.0;                 // used when no schedule is given
  std::optional<AnnealSpec> schedule; // beta_end is held after the last step
  double penalty_weight = 100.0;     // penalty baseline only
  std::uint64_t seed = 0;
  double stationarity_tolerance = 1e-6;
  std::size_t max_backoff = 20;
  double descent_slack = 1e-12;

  void validate() const;
  double beta_at(std::size_t iteration) const;
};

struct TraceRecord {
  std::size_t iteration = 0;
  double loss = 0.0;
  double constraint_norm = 0.0;
  double projected_gradient_norm = 0.0;
  double beta = 0.0;
  bool accepted = true;
};

struct BetaChange {
  std::size_t iteration = 0;
  double beta = 0.0;
  double correction_norm = 0.0;
};

struct TrainTrace {
  std::vector<TraceRecord> records;
  std::vector<BetaChange> beta_changes;

  // iteration,loss,constraint_norm,proj_grad_norm,beta,accepted
  std::string to_csv() const;
};

struct Sample {
  std::vector<double> input;
  std::vector<double> target;
};

using Dataset = std::vector<Sample>;

// Headerless CSV: the first `inputs` columns are inputs, the rest targets.
// Targets must lie in [0, 1].
Dataset parse_dataset(std::string_view csv, std::size_t inputs);

// Mean over samples of the summed squared output error. A single target
// column is compared against every output.
double loss(const NetworkGraph& g, const ParameterStore& params, const Dataset& data,
            Temperature beta);
std::pair<double, std::vector<double>> loss_and_gradient(const NetworkGraph& g,
                                                         const ParameterStore& params,
                                                         const Dataset& data, Temperature beta);

// v - J^+ J v: removes the component of v in the row space of J, using an
// SVD with relative cutoff 1e-10 on the singular values.
std::vector<double> project_tangent(std::span<const double> v, const ConstraintJacobian& jac);

struct RetractionResult {
  ParameterStore params;
  double residual_norm = 0.0;
  std::size_t newton_steps = 0;
  double correction_norm = 0.0;  // ||W' - (W + step)||
};

// Gauss-Newton projection of W + step onto G = 0. Throws retraction_failure
// when ||G|| stays above epsilon.
RetractionResult retract(const ParameterStore& params, std::span<const double> step,
                         const ConstraintSet& gset, Temperature beta, const OptimizerConfig& cfg);

struct TrainResult {
  ParameterStore params;
  TrainTrace trace;
  bool converged = false;  // stationarity tolerance reached
};

// Riemannian gradient descent on {W : G(W) = 0}: project the Euclidean loss
// gradient onto the tangent space, step, retract. Steps that fail to
// retract or that increase the loss are retried with half the step size.
TrainResult train(const NetworkGraph& g, const ConstraintSet& gset, const Dataset& data,
                  const ParameterStore& initial, const OptimizerConfig& cfg);

// Plain gradient descent on loss + lambda ||G||^2.
TrainResult penalty_train(const NetworkGraph& g, const ConstraintSet& gset, const Dataset& data,
                          const ParameterStore& initial, const OptimizerConfig& cfg);

struct ManifoldInit {
  enum class Kind { canonical, random_then_retract };
  Kind kind = Kind::canonical;
  std::uint64_t seed = 0;
  double scale = 0.1;  // uniform perturbation of the canonical point

  static ManifoldInit canonical() { return {}; }
  static ManifoldInit random(std::uint64_t seed, double scale = 0.1) {
    return {Kind::random_then_retract, seed, scale};
  }
};

RetractionResult initialize_on_manifold(const ConstraintSet& gset, Temperature beta,
                                        const ManifoldInit& mode, const OptimizerConfig& cfg);

}  // namespace logikon

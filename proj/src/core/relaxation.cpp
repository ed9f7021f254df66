#include "core/relaxation.hpp"

#include <cmath>

#include "core/error.hpp"

namespace logikon {

Temperature::Temperature(double beta) : beta_(beta) {
  if (!std::isfinite(beta) || beta <= 0.0) {
    throw Error(ErrorCode::invalid_argument, "temperature must be positive and finite");
  }
}

GateKernel canonical_kernel(std::string_view connective, std::size_t arity) {
  GateKernel k{std::string(connective), arity, std::vector<double>(arity + 1, 1.0)};
  k.params[arity] = 0.0;
  if (connective == "and" && arity == 2) {
    k.params = {1.0, 1.0, -1.5};
  } else if (connective == "or" && arity == 2) {
    k.params = {1.0, 1.0, -0.5};
  } else if (connective == "not" && arity == 1) {
    k.params = {-2.0, 1.0};
  }
  return k;
}

double sigmoid(double z) noexcept {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

namespace {

double preactivation(std::span<const double> params, std::span<const double> inputs) {
  if (params.size() != inputs.size() + 1) {
    throw Error(ErrorCode::arity_mismatch, "gate parameter count does not match its inputs");
  }
  double z = params[inputs.size()];
  for (std::size_t i = 0; i < inputs.size(); ++i) {
    if (!std::isfinite(inputs[i])) throw Error(ErrorCode::non_finite, "non-finite gate input");
    z += params[i] * inputs[i];
  }
  return z;
}

}  // namespace

double gate_eval(std::span<const double> params, std::span<const double> inputs,
                 Temperature beta) {
  return sigmoid(beta.value() * preactivation(params, inputs));
}

double gate_grad(std::span<const double> params, std::span<const double> inputs,
                 Temperature beta, std::span<double> d_params, std::span<double> d_inputs) {
  const double z = beta.value() * preactivation(params, inputs);
  const double s = sigmoid(z);
  // 1 - s comes from the mirrored branch so it stays accurate near s = 1.
  const double slope = beta.value() * s * sigmoid(-z);
  const std::size_t k = inputs.size();
  for (std::size_t i = 0; i < k; ++i) {
    d_params[i] = slope * inputs[i];
    d_inputs[i] = slope * params[i];
  }
  d_params[k] = slope;
  return s;
}

GateGradient gate_grad(std::span<const double> params, std::span<const double> inputs,
                       Temperature beta) {
  GateGradient g;
  g.params.resize(params.size());
  g.inputs.resize(inputs.size());
  g.value = gate_grad(params, inputs, beta, g.params, g.inputs);
  return g;
}

double error_bound(std::string_view connective, Temperature beta) {
  if (connective == "and" || connective == "or") {
    return 1.0 / (1.0 + std::exp(0.5 * beta.value()));
  }
  if (connective == "not") return 1.0 / (1.0 + std::exp(beta.value()));
  throw Error(ErrorCode::invalid_argument,
              "no error bound for connective '" + std::string(connective) + "'");
}

double lipschitz_bound(std::size_t depth, Temperature beta) {
  return std::pow(beta.value() * std::sqrt(2.0) / 4.0, static_cast<double>(depth));
}

std::vector<double> anneal_schedule(const AnnealSpec& spec) {
  if (!(spec.beta_start > 0.0) || !(spec.beta_end >= spec.beta_start) ||
      !std::isfinite(spec.beta_end) || spec.steps == 0 ||
      (spec.steps == 1 && spec.beta_start != spec.beta_end)) {
    throw Error(ErrorCode::invalid_argument, "invalid annealing range");
  }
  std::vector<double> out(spec.steps);
  if (spec.steps == 1) {
    out[0] = spec.beta_start;
    return out;
  }
  const double last = static_cast<double>(spec.steps - 1);
  for (std::size_t i = 0; i < spec.steps; ++i) {
    const double t = static_cast<double>(i) / last;
    out[i] = spec.shape == ScheduleShape::linear
                 ? spec.beta_start + (spec.beta_end - spec.beta_start) * t
                 : spec.beta_start * std::pow(spec.beta_end / spec.beta_start, t);
  }
  out.front() = spec.beta_start;
  out.back() = spec.beta_end;
  return out;
}

}  // namespace logikon

#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace logikon {

// Sharpness of the relaxed gates; positive and finite.
class Temperature {
 public:
  explicit Temperature(double beta);
  double value() const noexcept { return beta_; }
  friend bool operator==(Temperature, Temperature) = default;

 private:
  double beta_;
};

// sigma(beta (w . x + b)). Parameters are laid out as [w_0 .. w_{k-1}, b].
struct GateKernel {
  std::string connective;
  std::size_t arity = 0;
  std::vector<double> params;

  std::size_t parameter_count() const noexcept { return arity + 1; }
  std::span<const double> weights() const { return {params.data(), arity}; }
  double bias() const { return params[arity]; }
};

// Max-margin constants for and/or/not; unit weights and zero bias for any
// other connective.
GateKernel canonical_kernel(std::string_view connective, std::size_t arity);

// Logistic function, evaluated branch-wise so large |z| never overflows.
double sigmoid(double z) noexcept;

double gate_eval(std::span<const double> params, std::span<const double> inputs,
                 Temperature beta);

// Writes d out / d params (k + 1 entries) and d out / d inputs (k entries)
// and returns the gate output.
double gate_grad(std::span<const double> params, std::span<const double> inputs,
                 Temperature beta, std::span<double> d_params, std::span<double> d_inputs);

struct GateGradient {
  double value = 0.0;
  std::vector<double> params;
  std::vector<double> inputs;
};

GateGradient gate_grad(std::span<const double> params, std::span<const double> inputs,
                       Temperature beta);

// Worst-case deviation of a canonical gate from its truth table on boolean
// inputs: 1/(1+e^{beta/2}) for and/or, 1/(1+e^{beta}) for not.
double error_bound(std::string_view connective, Temperature beta);

// (beta sqrt(2) / 4)^depth.
double lipschitz_bound(std::size_t depth, Temperature beta);

enum class ScheduleShape { linear, exponential };

struct AnnealSpec {
  double beta_start = 1.0;
  double beta_end = 1.0;
  std::size_t steps = 1;
  ScheduleShape shape = ScheduleShape::linear;
};

std::vector<double> anneal_schedule(const AnnealSpec& spec);

}  // namespace logikon

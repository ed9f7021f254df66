#include "core/manifold.hpp"

#include <charconv>
#include <cmath>
#include <random>

#include <Eigen/Dense>

#include "core/error.hpp"

namespace logikon {

void OptimizerConfig::validate() const {
  const bool ok = learning_rate > 0.0 && epsilon > 0.0 && epsilon < 1.0 && max_iterations > 0 &&
                  retraction.max_newton_steps > 0 && beta > 0.0 && std::isfinite(beta) &&
                  penalty_weight >= 0.0 && stationarity_tolerance > 0.0 && descent_slack >= 0.0;
  if (!ok) throw Error(ErrorCode::invalid_argument, "invalid optimizer configuration");
  if (schedule) anneal_schedule(*schedule);
}

double OptimizerConfig::beta_at(std::size_t iteration) const {
  if (!schedule) return beta;
  const std::vector<double> betas = anneal_schedule(*schedule);
  return betas[std::min(iteration, betas.size() - 1)];
}

namespace {

std::string shortest(double v) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, end);
}

double norm2(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

struct Pseudoinverse {
  Eigen::MatrixXd u;
  Eigen::VectorXd inv_sigma;
  Eigen::MatrixXd v;
};

Pseudoinverse pseudoinverse(const ConstraintJacobian& jac) {
  Eigen::Map<const RowMatrix> j(jac.entries.data(), static_cast<Eigen::Index>(jac.rows),
                                static_cast<Eigen::Index>(jac.cols));
  for (double x : jac.entries) {
    if (!std::isfinite(x)) throw Error(ErrorCode::non_finite, "non-finite Jacobian entry");
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(Eigen::MatrixXd(j),
                                        Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Eigen::VectorXd& s = svd.singularValues();
  const double cutoff = s.size() > 0 ? 1e-10 * s(0) : 0.0;
  Eigen::Index rank = 0;
  while (rank < s.size() && s(rank) > cutoff) ++rank;
  return {svd.matrixU().leftCols(rank), s.head(rank).cwiseInverse(),
          svd.matrixV().leftCols(rank)};
}

}  // namespace

std::string TrainTrace::to_csv() const {
  std::string out = "iteration,loss,constraint_norm,proj_grad_norm,beta,accepted\n";
  for (const TraceRecord& r : records) {
    out += std::to_string(r.iteration) + "," + shortest(r.loss) + "," +
           shortest(r.constraint_norm) + "," + shortest(r.projected_gradient_norm) + "," +
           shortest(r.beta) + "," + (r.accepted ? "1" : "0") + "\n";
  }
  return out;
}

Dataset parse_dataset(std::string_view csv, std::size_t inputs) {
  Dataset data;
  std::size_t line_no = 0;
  std::size_t width = 0;
  while (!csv.empty()) {
    const std::size_t nl = csv.find('\n');
    std::string_view line = csv.substr(0, nl);
    csv = nl == std::string_view::npos ? std::string_view{} : csv.substr(nl + 1);
    ++line_no;
    while (!line.empty() && (line.back() == '\r' || line.back() == ' ')) line.remove_suffix(1);
    if (line.empty()) continue;
    std::vector<double> row;
    std::size_t col = 0;
    while (true) {
      const std::size_t comma = line.find(',');
      std::string_view cell = line.substr(0, comma);
      while (!cell.empty() && cell.front() == ' ') cell.remove_prefix(1);
      while (!cell.empty() && cell.back() == ' ') cell.remove_suffix(1);
      double v = 0.0;
      auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
      if (ec != std::errc() || ptr != cell.data() + cell.size() || !std::isfinite(v)) {
        throw Error(ErrorCode::invalid_argument, "line " + std::to_string(line_no) + ", column " +
                                                     std::to_string(col + 1) +
                                                     ": not a number");
      }
      row.push_back(v);
      ++col;
      if (comma == std::string_view::npos) break;
      line = line.substr(comma + 1);
    }
    if (width == 0) width = row.size();
    if (row.size() != width || row.size() <= inputs) {
      throw Error(ErrorCode::invalid_argument,
                  "line " + std::to_string(line_no) + ": expected " + std::to_string(inputs) +
                      " input column(s) followed by targets");
    }
    Sample s{{row.begin(), row.begin() + static_cast<std::ptrdiff_t>(inputs)},
             {row.begin() + static_cast<std::ptrdiff_t>(inputs), row.end()}};
    for (double t : s.target) {
      if (t < 0.0 || t > 1.0) {
        throw Error(ErrorCode::invalid_argument,
                    "line " + std::to_string(line_no) + ": target outside [0, 1]");
      }
    }
    data.push_back(std::move(s));
  }
  if (data.empty()) throw Error(ErrorCode::invalid_argument, "dataset is empty");
  return data;
}

namespace {

void check_sample(const NetworkGraph& g, const Sample& s) {
  if (s.input.size() != g.input_count() ||
      (s.target.size() != g.outputs().size() && s.target.size() != 1)) {
    throw Error(ErrorCode::arity_mismatch, "sample shape does not match the network");
  }
}

double target_at(const Sample& s, std::size_t o) {
  return s.target.size() == 1 ? s.target[0] : s.target[o];
}

}  // namespace

double loss(const NetworkGraph& g, const ParameterStore& params, const Dataset& data,
            Temperature beta) {
  double total = 0.0;
  for (const Sample& s : data) {
    check_sample(g, s);
    const auto out = evaluate(g, params, s.input, beta);
    for (std::size_t o = 0; o < out.size(); ++o) {
      const double e = out[o] - target_at(s, o);
      total += e * e;
    }
  }
  const double value = total / static_cast<double>(data.size());
  if (!std::isfinite(value)) throw Error(ErrorCode::non_finite, "non-finite loss");
  return value;
}

std::pair<double, std::vector<double>> loss_and_gradient(const NetworkGraph& g,
                                                         const ParameterStore& params,
                                                         const Dataset& data, Temperature beta) {
  const double scale = 1.0 / static_cast<double>(data.size());
  double total = 0.0;
  std::vector<double> grad(params.size(), 0.0);
  std::vector<double> upstream;
  for (const Sample& s : data) {
    check_sample(g, s);
    ForwardResult fwd = forward(g, params, s.input, beta);
    upstream.resize(fwd.outputs.size());
    for (std::size_t o = 0; o < fwd.outputs.size(); ++o) {
      const double e = fwd.outputs[o] - target_at(s, o);
      total += e * e;
      upstream[o] = 2.0 * e * scale;
    }
    const Gradients gr = backward(g, params, std::move(fwd.tape), upstream);
    for (std::size_t i = 0; i < grad.size(); ++i) grad[i] += gr.params[i];
  }
  const double value = total * scale;
  if (!std::isfinite(value)) throw Error(ErrorCode::non_finite, "non-finite loss");
  return {value, std::move(grad)};
}

std::vector<double> project_tangent(std::span<const double> v, const ConstraintJacobian& jac) {
  for (double x : v) {
    if (!std::isfinite(x)) throw Error(ErrorCode::non_finite, "non-finite vector");
  }
  std::vector<double> out(v.begin(), v.end());
  if (jac.rows == 0) return out;
  if (jac.cols != v.size()) {
    throw Error(ErrorCode::arity_mismatch, "vector length does not match Jacobian columns");
  }
  const Pseudoinverse pinv = pseudoinverse(jac);
  Eigen::Map<Eigen::VectorXd> x(out.data(), static_cast<Eigen::Index>(out.size()));
  const Eigen::VectorXd coeff = pinv.v.transpose() * x;
  x -= pinv.v * coeff;
  return out;
}

RetractionResult retract(const ParameterStore& params, std::span<const double> step,
                         const ConstraintSet& gset, Temperature beta,
                         const OptimizerConfig& cfg) {
  if (step.size() != params.size()) {
    throw Error(ErrorCode::arity_mismatch, "step length does not match parameters");
  }
  RetractionResult r{params, 0.0, 0, 0.0};
  for (std::size_t i = 0; i < step.size(); ++i) r.params.values[i] += step[i];
  const std::vector<double> start = r.params.values;

  std::vector<double> g = evaluate_constraints(gset, r.params, beta);
  r.residual_norm = norm2(g);
  while (r.residual_norm > cfg.epsilon && r.newton_steps < cfg.retraction.max_newton_steps) {
    const Pseudoinverse pinv = pseudoinverse(constraint_jacobian(gset, r.params, beta));
    Eigen::Map<const Eigen::VectorXd> gv(g.data(), static_cast<Eigen::Index>(g.size()));
    const Eigen::VectorXd delta =
        pinv.v * (pinv.inv_sigma.asDiagonal() * (pinv.u.transpose() * gv));
    for (std::size_t i = 0; i < r.params.size(); ++i) {
      r.params.values[i] -= delta(static_cast<Eigen::Index>(i));
    }
    ++r.newton_steps;
    g = evaluate_constraints(gset, r.params, beta);
    r.residual_norm = norm2(g);
    if (!std::isfinite(r.residual_norm)) break;
    if (delta.norm() < cfg.retraction.inner_tolerance) break;
  }
  if (!(r.residual_norm <= cfg.epsilon)) {
    throw Error(ErrorCode::retraction_failure,
                "retraction left ||G|| = " + shortest(r.residual_norm) + " after " +
                    std::to_string(r.newton_steps) + " Newton step(s)");
  }
  double moved = 0.0;
  for (std::size_t i = 0; i < start.size(); ++i) {
    const double d = r.params.values[i] - start[i];
    moved += d * d;
  }
  r.correction_norm = std::sqrt(moved);
  return r;
}

namespace {

void check_training_inputs(const NetworkGraph& g, const ConstraintSet& gset,
                           const ParameterStore& params, const Dataset& data) {
  if (!g.compatible_with(params) || params.size() != gset.parameter_count()) {
    throw Error(ErrorCode::layout_mismatch, "network, constraints and parameters disagree");
  }
  if (data.empty()) throw Error(ErrorCode::invalid_argument, "empty dataset");
  for (const Sample& s : data) check_sample(g, s);
}

}  // namespace

TrainResult train(const NetworkGraph& g, const ConstraintSet& gset, const Dataset& data,
                  const ParameterStore& initial, const OptimizerConfig& cfg) {
  cfg.validate();
  check_training_inputs(g, gset, initial, data);
  TrainResult result{initial, {}, false};
  ParameterStore& w = result.params;

  double beta_value = cfg.beta_at(0);
  if (constraint_norm(gset, w, Temperature(beta_value)) > cfg.epsilon) {
    throw Error(ErrorCode::precondition, "initial parameters are not on the constraint manifold");
  }
  bool accepted = true;
  for (std::size_t t = 0;; ++t) {
    const double next_beta = cfg.beta_at(t);
    if (next_beta != beta_value) {
      // The manifold moves with beta; pull the iterate back onto it.
      beta_value = next_beta;
      const std::vector<double> zero(w.size(), 0.0);
      RetractionResult rr = retract(w, zero, gset, Temperature(beta_value), cfg);
      result.trace.beta_changes.push_back({t, beta_value, rr.correction_norm});
      w = std::move(rr.params);
    }
    const Temperature beta(beta_value);
    auto [current_loss, grad] = loss_and_gradient(g, w, data, beta);
    const ConstraintJacobian jac = constraint_jacobian(gset, w, beta);
    const std::vector<double> xi = project_tangent(grad, jac);
    const double xi_norm = norm2(xi);
    result.trace.records.push_back(
        {t, current_loss, constraint_norm(gset, w, beta), xi_norm, beta_value, accepted});
    if (xi_norm <= cfg.stationarity_tolerance) {
      result.converged = true;
      break;
    }
    if (t >= cfg.max_iterations) break;

    double eta = cfg.learning_rate;
    bool retracted_any = false;
    accepted = false;
    std::vector<double> step(xi.size());
    for (std::size_t attempt = 0; attempt <= cfg.max_backoff; ++attempt, eta *= 0.5) {
      for (std::size_t i = 0; i < xi.size(); ++i) step[i] = -eta * xi[i];
      RetractionResult candidate;
      try {
        candidate = retract(w, step, gset, beta, cfg);
      } catch (const Error& e) {
        if (e.code() != ErrorCode::retraction_failure) throw;
        continue;
      }
      retracted_any = true;
      if (loss(g, candidate.params, data, beta) <= current_loss + cfg.descent_slack) {
        w = std::move(candidate.params);
        accepted = true;
        break;
      }
    }
    if (!accepted) {
      if (!retracted_any) {
        throw Error(ErrorCode::retraction_failure,
                    "no step size retracted onto the manifold at iteration " +
                        std::to_string(t));
      }
      // No descent step left at this resolution.
      break;
    }
  }
  return result;
}

TrainResult penalty_train(const NetworkGraph& g, const ConstraintSet& gset, const Dataset& data,
                          const ParameterStore& initial, const OptimizerConfig& cfg) {
  cfg.validate();
  check_training_inputs(g, gset, initial, data);
  TrainResult result{initial, {}, false};
  ParameterStore& w = result.params;
  const double lambda = cfg.penalty_weight;

  auto objective = [&](const ParameterStore& p, Temperature beta) {
    const double c = constraint_norm(gset, p, beta);
    return loss(g, p, data, beta) + lambda * c * c;
  };

  bool accepted = true;
  for (std::size_t t = 0;; ++t) {
    const Temperature beta(cfg.beta_at(t));
    auto [current_loss, grad] = loss_and_gradient(g, w, data, beta);
    const std::vector<double> res = evaluate_constraints(gset, w, beta);
    if (lambda > 0.0) {
      const ConstraintJacobian jac = constraint_jacobian(gset, w, beta);
      for (std::size_t r = 0; r < jac.rows; ++r) {
        for (std::size_t c = 0; c < jac.cols; ++c) grad[c] += 2.0 * lambda * res[r] * jac.at(r, c);
      }
    }
    const double grad_norm = norm2(grad);
    result.trace.records.push_back(
        {t, current_loss, norm2(res), grad_norm, beta.value(), accepted});
    if (grad_norm <= cfg.stationarity_tolerance) {
      result.converged = true;
      break;
    }
    if (t >= cfg.max_iterations) break;

    const double current = objective(w, beta);
    double eta = cfg.learning_rate;
    accepted = false;
    ParameterStore candidate = w;
    for (std::size_t attempt = 0; attempt <= cfg.max_backoff; ++attempt, eta *= 0.5) {
      for (std::size_t i = 0; i < grad.size(); ++i) candidate.values[i] = w.values[i] - eta * grad[i];
      if (objective(candidate, beta) <= current + cfg.descent_slack) {
        w = candidate;
        accepted = true;
        break;
      }
    }
    if (!accepted) break;
  }
  return result;
}

RetractionResult initialize_on_manifold(const ConstraintSet& gset, Temperature beta,
                                        const ManifoldInit& mode, const OptimizerConfig& cfg) {
  ParameterStore w = ParameterStore::with_layout(gset.layout);
  for (std::size_t s = 0; s < gset.layout.size(); ++s) {
    const GateKernel k = canonical_kernel(gset.layout[s].connective, gset.layout[s].arity);
    std::copy(k.params.begin(), k.params.end(), w.slot_params(s).begin());
  }
  if (mode.kind == ManifoldInit::Kind::random_then_retract) {
    std::mt19937_64 rng(mode.seed);
    std::uniform_real_distribution<double> uniform(-mode.scale, mode.scale);
    for (double& v : w.values) v += uniform(rng);
  }
  const std::vector<double> zero(w.size(), 0.0);
  return retract(w, zero, gset, beta, cfg);
}

}  // namespace logikon

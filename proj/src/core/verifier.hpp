#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "core/network.hpp"
#include "core/network_io.hpp"
#include "core/relaxation.hpp"
#include "core/term.hpp"
#include "core/theory.hpp"

namespace logikon {

struct Witness {
  std::vector<double> input;
  double measured = 0.0;
  double expected = 0.0;
  std::string note;
};

struct CheckEntry {
  std::string name;
  bool passed = false;
  double measured = 0.0;
  double tolerance = 0.0;
  std::vector<Witness> witnesses;  // non-empty whenever passed is false
  nlohmann::ordered_json details = nlohmann::ordered_json::object();
};

struct VerificationReport {
  std::vector<CheckEntry> entries;

  bool all_passed() const;
  nlohmann::ordered_json to_json() const;
  std::string to_table() const;
};

// Boolean vertex for mask m: coordinate i is bit i.
std::vector<double> vertex(std::uint64_t mask, std::size_t n);

// Output `output` of g against the discrete truth table of expr at all 2^n
// vertices.
CheckEntry truth_table_check(const NetworkGraph& g, const Term& expr, std::size_t n,
                             const ParameterStore& params, Temperature beta, double tolerance,
                             std::size_t output = 0);

struct SweepResult {
  std::size_t terms = 0;
  double max_deviation = 0.0;        // raw outputs at beta
  std::size_t threshold_mismatches = 0;  // 0.5-thresholded outputs at beta_threshold
  std::optional<Term> worst;
  std::optional<Term> first_mismatch;
};

// Every term of depth <= max_depth over n variables, compiled with
// canonical parameters in batches and compared with its truth table.
SweepResult truth_sweep(const Theory& theory, std::size_t n, std::size_t max_depth,
                        Temperature beta, Temperature beta_threshold);
CheckEntry truth_sweep_check(const Theory& theory, std::size_t n, std::size_t max_depth,
                             Temperature beta, Temperature beta_threshold, double tolerance);

struct ArmCheckOptions {
  double tolerance = 1e-6;
  std::size_t interior_samples = 0;
  std::uint64_t seed = 0;
};

// Max |left - right| over all vertices plus interior samples, together with
// a weight-sharing audit: every connective must read identical parameters in
// every slot of both graphs.
CheckEntry arm_equivalence_check(const NetworkGraph& left, const ParameterStore& left_params,
                                 const NetworkGraph& right, const ParameterStore& right_params,
                                 Temperature beta, const ArmCheckOptions& options = {});

// Same check on one graph whose outputs are (left, right).
CheckEntry arm_equivalence_check(const NetworkGraph& arms, const ParameterStore& params,
                                 Temperature beta, const ArmCheckOptions& options = {});

// Gate errors of the canonical and/or/not kernels at every vertex for each
// beta: all within the bound, the worst-case vertices equal to it.
CheckEntry bound_check_lemma32(std::span<const double> betas,
                               std::span<const std::string> connectives = {});

struct EnvelopeFit {
  std::vector<double> betas;
  std::vector<double> deviations;
  std::size_t depth = 0;
  std::optional<double> alpha;
  std::optional<double> c;
};

// Max vertex deviation |lhs - rhs| of an axiom at each beta, fitted to
// C (beta sqrt(2)/4)^d e^{-alpha beta}.
EnvelopeFit measure_envelope(const Theory& theory, const Axiom& axiom,
                             const ParameterStore& params, std::span<const double> betas);
CheckEntry bound_check_thm42(const Theory& theory, const Axiom& axiom,
                             const ParameterStore& params, std::span<const double> betas,
                             double alpha_floor = 0.5);

// Bit-exact forward comparison of two networks on vertices and samples.
CheckEntry forward_identity_check(std::string name, const NetworkGraph& a,
                                  const ParameterStore& pa, const NetworkGraph& b,
                                  const ParameterStore& pb, Temperature beta,
                                  std::size_t samples, std::uint64_t seed);

// extract_model then recompile exprs, then forward_identity_check.
CheckEntry roundtrip_check(const NetworkGraph& g, const ParameterStore& params,
                           std::span<const Term> exprs, std::size_t n, Temperature beta,
                           std::size_t samples, std::uint64_t seed);

// Uniform choice among variables and connectives at each position; leaves
// are variables or constants.
Term random_term(const Theory& theory, std::size_t n, std::size_t max_depth,
                 std::mt19937_64& rng);

struct FunctorOptions {
  std::size_t pairs = 100;
  std::size_t max_depth = 2;
  std::size_t samples = 16;
  std::uint64_t seed = 0;
  double tolerance = 1e-12;
};

// compile(g . f) against compile(g) after compile(f), and identity tuples on
// either side, with canonical parameters.
CheckEntry functoriality_check(const Theory& theory, Temperature beta,
                               const FunctorOptions& options = {});

struct Census {
  std::size_t classes = 0;
  std::size_t terms = 0;
  std::vector<std::uint64_t> reachable;   // thresholded functions, sorted
  std::vector<std::uint64_t> class_tables;  // one per class, sorted
  bool members_agree = true;
  bool classes_distinct = true;
  std::optional<Term> witness;
};

Census census(const Theory& theory, std::size_t n, std::size_t max_depth, Temperature beta,
              std::size_t term_cap);
CheckEntry expressivity_census(const Theory& theory, std::size_t n, std::size_t max_depth,
                               Temperature beta, std::size_t term_cap = 10000);

struct VerifyOptions {
  std::vector<std::string> suites{"all"};
  std::vector<double> beta_grid;  // empty: per-suite defaults
  std::uint64_t seed = 0;
  std::size_t samples = 16;
  std::size_t census_depth = 2;
};

inline const std::vector<std::string> kSuites{"bounds",  "envelope", "truth", "arms",
                                               "roundtrip", "census", "functor"};

// Runs the selected suites over the theory's axioms at canonical parameters.
VerificationReport verify_theory(const Theory& theory, const VerifyOptions& options);

// Network-level suites (truth, arms, roundtrip) use the bundle's own
// parameters; the others run on its theory.
VerificationReport verify_bundle(const NetworkBundle& bundle, const VerifyOptions& options);

}  // namespace logikon

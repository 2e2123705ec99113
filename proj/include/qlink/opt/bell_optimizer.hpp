#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "qlink/opt/gaussian_process.hpp"
#include "qlink/opt/minimize.hpp"
#include "qlink/protocols/bell.hpp"
#include "qlink/tomo/readout.hpp"

namespace qlink::opt {

/// Search box; the optimiser works on its unit-cube image.
struct ParameterBox {
  RVector lower, upper;
  std::vector<std::string> names;

  void validate() const;
  Eigen::Index dim() const { return lower.size(); }
  RVector to_unit(const RVector& x) const;
  RVector from_unit(const RVector& u) const;
};

enum class CandidateSource { Initial, SurrogateArgmax, FilteredRandom, PureRandom };
std::string to_string(CandidateSource s);
CandidateSource candidate_source(const std::string& s);

struct Candidate {
  RVector x;  ///< box coordinates
  CandidateSource source = CandidateSource::PureRandom;
};

struct ProposalOptions {
  int pool = 256;     ///< uniform draws screened by the posterior mean
  int filtered = 7;   ///< best of the pool kept
  int random = 2;     ///< unscreened uniform draws
  int starts = 8;     ///< quasi-Newton starts for the posterior-mean maximum
};

/// One posterior-mean maximiser, `filtered` screened draws and `random`
/// uniform draws, in that order. The surrogate must be fitted on unit-cube
/// inputs of `box`. Deterministic for a fixed seed.
std::vector<Candidate> propose_candidates(const GaussianProcess& gp, const ParameterBox& box, std::uint64_t seed,
                                          const ProposalOptions& options = {});

/// Objective to maximise; may throw, in which case the candidate is skipped.
using Experiment = std::function<double(const RVector& x, std::uint64_t seed)>;

struct Evaluation {
  RVector x;
  CandidateSource source = CandidateSource::PureRandom;
  std::uint64_t seed = 0;
  std::optional<double> objective;
  std::string error;
};

struct OptimizationRecord {
  int iteration = 0;
  std::vector<Evaluation> evaluations;
  double best = 0;  ///< running best objective after this iteration
  RVector best_x;
};

std::string to_json_line(const OptimizationRecord& r);
OptimizationRecord record_from_json(const std::string& line);

struct OptimizerOptions {
  int iterations = 40;  ///< including the initial random batch
  int batch = 10;
  ProposalOptions proposal;
  std::uint64_t seed = 1;
  int workers = 1;
  std::string trace_path;  ///< JSON lines, one record per iteration; empty = none
  bool resume = false;     ///< replay `trace_path` and continue after its last record
  std::function<void(const std::string&)> log;
};

struct OptimizationResult {
  RVector best_x;
  double best_objective = 0;
  std::vector<OptimizationRecord> records;
  int resumed = 0;  ///< iterations read back from the trace
};

/// Online surrogate loop: an initial uniform batch, then per iteration a GP
/// fit on all successful evaluations and `batch` proposals.
OptimizationResult optimize(const Experiment& experiment, const ParameterBox& box, const OptimizerOptions& options);

// Bell-pair tuning over (eps1, eps2, len1, len2).

struct BellExperimentOptions {
  long shots = 2000;
  double readout_sigma = 0.304;  ///< per-qubit misassignment about 5 %
  bool tomography = true;        ///< false scores the exact simulated state
  bool clip = true;              ///< clipped objective; otherwise phase-optimised fidelity
};

protocols::BellParams bell_params(const RVector& x);
RVector bell_vector(const protocols::BellParams& p);

/// Amplitudes 0.5 to 1.5 times the working value (capped by the calibration),
/// sender 20 to 150 ns, receiver 60 to 300 ns.
ParameterBox default_bell_box(const protocols::Link& link);

/// bell_protocol without phase correction, then simulated tomography of the
/// result and the objective chosen by `options`.
Experiment make_bell_experiment(const protocols::Link& link, const BellExperimentOptions& options);

struct BellOptimization {
  OptimizationResult search;
  protocols::BellParams best;
  protocols::BellResult exact;     ///< exact state at the best point, optimal phase
  double tomography_fidelity = 0;  ///< MLE reconstruction with optimal phase
  double sender_population = 0;    ///< P_eg of the exact state
};

BellOptimization optimize_bell(const protocols::Link& link, const ParameterBox& box, const OptimizerOptions& options,
                               const BellExperimentOptions& experiment = {});

}  // namespace qlink::opt

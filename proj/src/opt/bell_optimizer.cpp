#include "qlink/opt/bell_optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <numeric>
#include <random>

#include <json.hpp>

#include "qlink/core/error.hpp"
#include "qlink/core/parallel.hpp"
#include "qlink/tomo/tomography.hpp"

namespace qlink::opt {

using nlohmann::json;

void ParameterBox::validate() const {
  if (lower.size() == 0 || lower.size() != upper.size()) throw InvalidArgument("ParameterBox: bad dimensions");
  if (!names.empty() && static_cast<Eigen::Index>(names.size()) != lower.size())
    throw InvalidArgument("ParameterBox: names do not match the dimension");
  for (Eigen::Index i = 0; i < lower.size(); ++i)
    if (!(lower(i) < upper(i)) || !std::isfinite(lower(i)) || !std::isfinite(upper(i)))
      throw InvalidArgument("ParameterBox: lower must be below upper in every dimension");
}

RVector ParameterBox::to_unit(const RVector& x) const {
  return (x - lower).cwiseQuotient(upper - lower);
}

RVector ParameterBox::from_unit(const RVector& u) const {
  return lower + u.cwiseProduct(upper - lower);
}

std::string to_string(CandidateSource s) {
  switch (s) {
    case CandidateSource::Initial: return "initial";
    case CandidateSource::SurrogateArgmax: return "surrogate-argmax";
    case CandidateSource::FilteredRandom: return "filtered-random";
    case CandidateSource::PureRandom: return "pure-random";
  }
  return "?";
}

CandidateSource candidate_source(const std::string& s) {
  for (auto c : {CandidateSource::Initial, CandidateSource::SurrogateArgmax, CandidateSource::FilteredRandom,
                 CandidateSource::PureRandom})
    if (to_string(c) == s) return c;
  throw InvalidArgument("unknown candidate source '" + s + "'");
}

namespace {

RVector uniform_point(std::mt19937_64& rng, Eigen::Index d) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  RVector x(d);
  for (Eigen::Index i = 0; i < d; ++i) x(i) = u(rng);
  return x;
}

}  // namespace

std::vector<Candidate> propose_candidates(const GaussianProcess& gp, const ParameterBox& box, std::uint64_t seed,
                                          const ProposalOptions& options) {
  box.validate();
  const Eigen::Index d = box.dim();
  if (gp.size() == 0 || gp.inputs().cols() != d) throw InvalidArgument("propose_candidates: surrogate does not match box");
  std::mt19937_64 rng(seed);
  std::vector<Candidate> out;

  // Posterior-mean maximum from the best training input and random starts.
  {
    const auto& X = gp.inputs();
    Eigen::Index best_i = 0;
    double best_m = -INFINITY;
    for (Eigen::Index i = 0; i < X.rows(); ++i) {
      const double m = gp.mean(X.row(i).transpose());
      if (m > best_m) {
        best_m = m;
        best_i = i;
      }
    }
    std::vector<RVector> starts{X.row(best_i).transpose()};
    for (int k = 1; k < options.starts; ++k) starts.push_back(uniform_point(rng, d));
    Objective neg = [&](const RVector& u, RVector& g) {
      g = -gp.mean_gradient(u);
      return -gp.mean(u);
    };
    MinimizeOptions mo;
    mo.max_iter = 200;
    mo.ftol = 1e-12;
    mo.gtol = 1e-9;
    const RVector lo = RVector::Zero(d), hi = RVector::Ones(d);
    RVector arg = starts.front();
    double val = -gp.mean(arg);
    for (const auto& s : starts) {
      const auto r = minimize(neg, s, mo, lo, hi);
      if (r.f < val) {
        val = r.f;
        arg = r.x;
      }
    }
    out.push_back({box.from_unit(arg), CandidateSource::SurrogateArgmax});
  }

  // Screened uniform pool.
  std::vector<RVector> pool;
  std::vector<double> score;
  for (int k = 0; k < options.pool; ++k) {
    pool.push_back(uniform_point(rng, d));
    score.push_back(gp.mean(pool.back()));
  }
  std::vector<std::size_t> order(pool.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return score[a] > score[b]; });
  for (int k = 0; k < std::min<int>(options.filtered, static_cast<int>(order.size())); ++k)
    out.push_back({box.from_unit(pool[order[k]]), CandidateSource::FilteredRandom});

  for (int k = 0; k < options.random; ++k) out.push_back({box.from_unit(uniform_point(rng, d)), CandidateSource::PureRandom});
  return out;
}

std::string to_json_line(const OptimizationRecord& r) {
  json j;
  j["iteration"] = r.iteration;
  j["best"] = r.best;
  j["best_x"] = std::vector<double>(r.best_x.data(), r.best_x.data() + r.best_x.size());
  json ev = json::array();
  for (const auto& e : r.evaluations) {
    json k;
    k["x"] = std::vector<double>(e.x.data(), e.x.data() + e.x.size());
    k["source"] = to_string(e.source);
    k["seed"] = e.seed;
    if (e.objective) k["objective"] = *e.objective;
    else k["objective"] = nullptr;
    if (!e.error.empty()) k["error"] = e.error;
    ev.push_back(k);
  }
  j["evaluations"] = ev;
  return j.dump();
}

OptimizationRecord record_from_json(const std::string& line) {
  try {
    const json j = json::parse(line);
    OptimizationRecord r;
    r.iteration = j.at("iteration").get<int>();
    r.best = j.at("best").get<double>();
    const auto bx = j.at("best_x").get<std::vector<double>>();
    r.best_x = Eigen::Map<const RVector>(bx.data(), static_cast<Eigen::Index>(bx.size()));
    for (const auto& k : j.at("evaluations")) {
      Evaluation e;
      const auto x = k.at("x").get<std::vector<double>>();
      e.x = Eigen::Map<const RVector>(x.data(), static_cast<Eigen::Index>(x.size()));
      e.source = candidate_source(k.at("source").get<std::string>());
      e.seed = k.at("seed").get<std::uint64_t>();
      if (!k.at("objective").is_null()) e.objective = k.at("objective").get<double>();
      if (k.contains("error")) e.error = k.at("error").get<std::string>();
      r.evaluations.push_back(std::move(e));
    }
    return r;
  } catch (const json::exception& ex) {
    throw InvalidArgument(std::string("optimization trace: ") + ex.what());
  }
}

OptimizationResult optimize(const Experiment& experiment, const ParameterBox& box, const OptimizerOptions& options) {
  box.validate();
  if (options.iterations < 1 || options.batch < 1) throw InvalidArgument("optimize: need at least one iteration");
  auto log = [&](const std::string& m) {
    if (options.log) options.log(m);
    else std::clog << m << '\n';
  };

  OptimizationResult res;
  res.best_objective = -INFINITY;
  if (options.resume && !options.trace_path.empty() && std::filesystem::exists(options.trace_path)) {
    std::ifstream in(options.trace_path);
    std::string line;
    while (std::getline(in, line))
      if (!line.empty()) res.records.push_back(record_from_json(line));
    for (std::size_t k = 0; k < res.records.size(); ++k)
      if (res.records[k].iteration != static_cast<int>(k)) throw InvalidArgument("optimization trace: iterations out of order");
    res.resumed = static_cast<int>(res.records.size());
    if (!res.records.empty()) {
      res.best_objective = res.records.back().best;
      res.best_x = res.records.back().best_x;
    }
  }
  std::ofstream trace;
  if (!options.trace_path.empty()) trace.open(options.trace_path, options.resume ? std::ios::app : std::ios::trunc);

  std::vector<RVector> xs;
  std::vector<double> ys;
  for (const auto& r : res.records)
    for (const auto& e : r.evaluations)
      if (e.objective) {
        xs.push_back(box.to_unit(e.x));
        ys.push_back(*e.objective);
      }

  for (int it = res.resumed; it < options.iterations; ++it) {
    const std::uint64_t it_seed = derive_seed(options.seed, static_cast<std::uint64_t>(it));
    std::vector<Candidate> cands;
    bool model = false;
    if (xs.size() >= 2) {
      GaussianProcess gp;
      gp.log = log;
      Eigen::MatrixXd X(static_cast<Eigen::Index>(xs.size()), box.dim());
      for (std::size_t k = 0; k < xs.size(); ++k) X.row(static_cast<Eigen::Index>(k)) = xs[k].transpose();
      try {
        gp.fit(X, Eigen::Map<const Eigen::VectorXd>(ys.data(), static_cast<Eigen::Index>(ys.size())));
        cands = propose_candidates(gp, box, derive_seed(it_seed, 1u << 20), options.proposal);
        model = true;
      } catch (const Error& e) {
        log("iteration " + std::to_string(it) + ": surrogate unavailable (" + e.what() + "), sampling uniformly");
      }
    }
    if (!model) {
      std::mt19937_64 rng(derive_seed(it_seed, 1u << 20));
      for (int k = 0; k < options.batch; ++k)
        cands.push_back({box.from_unit(uniform_point(rng, box.dim())), CandidateSource::Initial});
    }

    OptimizationRecord rec;
    rec.iteration = it;
    rec.evaluations.resize(cands.size());
    parallel_for(cands.size(), options.workers, [&](std::size_t k) {
      Evaluation& e = rec.evaluations[k];
      e.x = cands[k].x;
      e.source = cands[k].source;
      e.seed = derive_seed(it_seed, k);
      try {
        const double v = experiment(e.x, e.seed);
        if (!std::isfinite(v)) throw InvalidArgument("objective is not finite");
        e.objective = v;
      } catch (const std::exception& ex) {
        e.error = ex.what();
      }
    });
    for (const auto& e : rec.evaluations) {
      if (!e.objective) {
        log("iteration " + std::to_string(it) + ": candidate skipped: " + e.error);
        continue;
      }
      xs.push_back(box.to_unit(e.x));
      ys.push_back(*e.objective);
      if (*e.objective > res.best_objective) {
        res.best_objective = *e.objective;
        res.best_x = e.x;
      }
    }
    rec.best = res.best_objective;
    rec.best_x = res.best_x;
    if (trace.is_open()) trace << to_json_line(rec) << '\n' << std::flush;
    res.records.push_back(std::move(rec));
  }
  if (res.best_x.size() == 0) throw FitError("optimize: every evaluation failed");
  return res;
}

protocols::BellParams bell_params(const RVector& x) {
  if (x.size() != 4) throw DimensionError("bell_params: expects (eps1, eps2, len1, len2)");
  protocols::BellParams p;
  p.eps1 = x(0);
  p.eps2 = x(1);
  p.len1 = x(2);
  p.len2 = x(3);
  return p;
}

RVector bell_vector(const protocols::BellParams& p) {
  RVector x(4);
  x << p.eps1, p.eps2, p.len1, p.len2;
  return x;
}

ParameterBox default_bell_box(const protocols::Link& link) {
  ParameterBox b;
  b.lower.resize(4);
  b.upper.resize(4);
  for (int q = 0; q < 2; ++q) {
    const double w = link.working_amplitude(q);
    b.lower(q) = 0.5 * w;
    b.upper(q) = std::min(1.5 * w, link.params().dc_maps[q].max_eps());
  }
  b.lower(2) = 20e-9;
  b.upper(2) = 150e-9;
  b.lower(3) = 60e-9;
  b.upper(3) = 300e-9;
  b.names = {"eps1", "eps2", "len1", "len2"};
  b.validate();
  return b;
}

Experiment make_bell_experiment(const protocols::Link& link, const BellExperimentOptions& options) {
  auto shared = std::make_shared<const protocols::Link>(link);
  const auto model = tomo::ReadoutModel::separated(options.readout_sigma, options.shots);
  // Calibration run of the readout, fixed so every evaluation sees the same C.
  const auto confusion = std::make_shared<const tomo::ConfusionMatrix>(
      tomo::empirical_confusion(tomo::ReadoutModel::separated(options.readout_sigma, 100000), 0x5eed));
  return [shared, model, confusion, options](const RVector& x, std::uint64_t seed) {
    const auto raw = protocols::bell_protocol(*shared, bell_params(x), 0.0).raw;
    Matrix est = raw.matrix();
    if (options.tomography)
      est = tomo::linear_estimate(tomo::estimate_paulis(tomo::measure_all(raw, model, *confusion, seed)));
    if (options.clip) return tomo::clipped_bell_objective(est);
    // Phase-optimised fidelity: <Psi+|rho|Psi+> with the coherence rotated real.
    return 0.5 * (est(1, 1).real() + est(2, 2).real()) + std::abs(est(1, 2));
  };
}

BellOptimization optimize_bell(const protocols::Link& link, const ParameterBox& box, const OptimizerOptions& options,
                               const BellExperimentOptions& experiment) {
  if (box.dim() != 4) throw DimensionError("optimize_bell: box must span (eps1, eps2, len1, len2)");
  auto search = optimize(make_bell_experiment(link, experiment), box, options);
  const auto best = bell_params(search.best_x);
  auto exact = protocols::bell_protocol(link, best);
  const double sender = exact.raw.matrix()(2, 2).real();

  const auto model = tomo::ReadoutModel::separated(experiment.readout_sigma, std::max(experiment.shots, 10000L));
  const auto c = tomo::empirical_confusion(tomo::ReadoutModel::separated(experiment.readout_sigma, 100000), 0x5eed);
  const auto data = tomo::measure_all(exact.raw, model, c, derive_seed(options.seed, 1u << 30));
  DensityMatrix rho = tomo::mle_reconstruct(data).rho;
  rho = protocols::apply_phase(rho, protocols::optimal_phase(rho));
  BellOptimization out{std::move(search), best, std::move(exact), state_fidelity(rho, protocols::psi_plus()), sender};
  return out;
}

}  // namespace qlink::opt

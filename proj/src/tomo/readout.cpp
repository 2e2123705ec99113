#include "qlink/tomo/readout.hpp"

#include <cmath>
#include <random>

#include "qlink/core/error.hpp"

namespace qlink::tomo {

ReadoutModel ReadoutModel::separated(double sigma, long shots) {
  ReadoutModel m;
  for (int s = 0; s < 4; ++s) m.centroids[s] = Voltage(s >> 1, 0.0, s & 1, 0.0);
  m.sigma = sigma;
  m.shots = shots;
  m.validate();
  return m;
}

void ReadoutModel::validate() const {
  if (!(sigma > 0) || !std::isfinite(sigma)) throw InvalidArgument("ReadoutModel: sigma must be positive");
  if (shots < 1) throw InvalidArgument("ReadoutModel: shots must be positive");
  for (const auto& c : centroids)
    if (!c.allFinite()) throw InvalidArgument("ReadoutModel: non-finite centroid");
}

int ReadoutModel::classify(const Voltage& v) const {
  int best = 0;
  double dmin = (v - centroids[0]).squaredNorm();
  for (int s = 1; s < 4; ++s) {
    const double d = (v - centroids[s]).squaredNorm();
    if (d < dmin) {
      dmin = d;
      best = s;
    }
  }
  return best;
}

ConfusionMatrix empirical_confusion(const ReadoutModel& model, std::uint64_t seed) {
  model.validate();
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> noise(0.0, model.sigma);
  ConfusionMatrix c = ConfusionMatrix::Zero();
  for (int i = 0; i < 4; ++i) {
    for (long k = 0; k < model.shots; ++k) {
      Voltage v = model.centroids[i];
      for (int a = 0; a < 4; ++a) v(a) += noise(rng);
      c(i, model.classify(v)) += 1.0;
    }
  }
  return c / static_cast<double>(model.shots);
}

double condition_number(const ConfusionMatrix& c) {
  Eigen::JacobiSVD<ConfusionMatrix> svd(c);
  const auto& s = svd.singularValues();
  return s(3) > 0 ? s(0) / s(3) : INFINITY;
}

void validate_confusion(const ConfusionMatrix& c, double tol) {
  for (int i = 0; i < 4; ++i) {
    if (std::abs(c.row(i).sum() - 1.0) > tol) throw InvalidArgument("confusion matrix rows must sum to 1");
    for (int j = 0; j < 4; ++j)
      if (c(i, j) < -tol || c(i, j) > 1 + tol) throw InvalidArgument("confusion matrix entries must lie in [0, 1]");
  }
}

Eigen::Vector4d correct_populations(const Counts& counts, const ConfusionMatrix& c) {
  long total = 0;
  for (long n : counts) {
    if (n < 0) throw InvalidArgument("correct_populations: negative count");
    total += n;
  }
  if (total == 0) throw InvalidArgument("correct_populations: no shots");
  if (condition_number(c) > 1e12) throw InvalidArgument("correct_populations: confusion matrix is singular");
  Eigen::Vector4d f;
  for (int j = 0; j < 4; ++j) f(j) = static_cast<double>(counts[j]) / static_cast<double>(total);
  return c.transpose().fullPivLu().solve(f);
}

}  // namespace qlink::tomo

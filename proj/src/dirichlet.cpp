#include "evr/dirichlet.hpp"

#include <cmath>
#include <random>
#include <string>

#include "evr/error.hpp"
#include "evr/special_functions.hpp"

namespace evr {
namespace detail {

namespace {
void require_finite(const Vector& v, const char* what) {
  for (Eigen::Index k = 0; k < v.size(); ++k) {
    if (!std::isfinite(v[k])) {
      throw InvalidInput(std::string(what) + ": component " + std::to_string(k) +
                         " is not finite");
    }
  }
}

void require_classes(const Vector& v, const char* what) {
  if (v.size() < 2) {
    throw InvalidInput(std::string(what) + ": need at least 2 classes, got " +
                       std::to_string(v.size()));
  }
}
}  // namespace

void validate_evidence(const Vector& e) {
  require_classes(e, "evidence");
  require_finite(e, "evidence");
  for (Eigen::Index k = 0; k < e.size(); ++k) {
    if (e[k] < 0.0) {
      throw InvalidInput("evidence: component " + std::to_string(k) + " is negative");
    }
  }
}

void validate_alpha(const Vector& alpha) {
  require_classes(alpha, "alpha");
  require_finite(alpha, "alpha");
  for (Eigen::Index k = 0; k < alpha.size(); ++k) {
    if (!(alpha[k] > 0.0)) {
      throw InvalidInput("alpha: component " + std::to_string(k) + " is not positive");
    }
  }
  if (!std::isfinite(alpha.sum())) {
    throw InvalidInput("alpha: strength overflows");
  }
}

void validate_simplex(const Vector& p) {
  require_classes(p, "probabilities");
  require_finite(p, "probabilities");
  if ((p.array() < 0.0).any() || (p.array() > 1.0).any()) {
    throw InvalidInput("probabilities: component outside [0, 1]");
  }
  if (std::abs(p.sum() - 1.0) > 1e-9) {
    throw InvalidInput("probabilities: do not sum to 1");
  }
}

}  // namespace detail

DirichletParams evidence_to_alpha(const EvidenceVector& e) {
  return DirichletParams(e.values().array() + 1.0);
}

BeliefState belief_and_uncertainty(const EvidenceVector& e) {
  const auto k = static_cast<double>(e.size());
  const double strength = e.total() + k;
  return BeliefState{e.values() / strength, k / strength};
}

ProbabilityVector expected_probs(const DirichletParams& alpha) {
  return ProbabilityVector(alpha.values() / alpha.strength());
}

Vector variance_probs(const DirichletParams& alpha) {
  const double s = alpha.strength();
  const auto& a = alpha.values().array();
  return (a * (s - a) / (s * s * (s + 1.0))).matrix();
}

double log_beta(const DirichletParams& alpha) {
  double acc = 0.0;
  for (Eigen::Index k = 0; k < alpha.size(); ++k) {
    acc += special::lgamma(alpha[k]);
  }
  return acc - special::lgamma(alpha.strength());
}

double log_pdf(const DirichletParams& alpha, const ProbabilityVector& p) {
  if (alpha.size() != p.size()) {
    throw DimensionError("log_pdf: alpha has " + std::to_string(alpha.size()) +
                         " classes, p has " + std::to_string(p.size()));
  }
  double acc = -log_beta(alpha);
  for (Eigen::Index k = 0; k < alpha.size(); ++k) {
    if (alpha[k] != 1.0) {
      acc += (alpha[k] - 1.0) * std::log(p[k]);
    }
  }
  return acc;
}

double bhattacharyya_distance(const DirichletParams& a, const DirichletParams& b) {
  if (a.size() != b.size()) {
    throw DimensionError("bhattacharyya_distance: " + std::to_string(a.size()) +
                         " vs " + std::to_string(b.size()) + " classes");
  }
  const DirichletParams mid(0.5 * (a.values() + b.values()));
  const double d = 0.5 * (log_beta(a) + log_beta(b)) - log_beta(mid);
  // log-Beta is log-convex, so d >= 0 up to rounding.
  return d > 0.0 ? d : 0.0;
}

Eigen::MatrixXd sample_dirichlet(const DirichletParams& alpha, std::size_t n,
                                 std::uint64_t seed) {
  if (n == 0) {
    throw InvalidInput("sample_dirichlet: n must be at least 1");
  }
  const Eigen::Index k = alpha.size();
  std::mt19937_64 rng(seed);
  std::vector<std::gamma_distribution<double>> gammas;
  gammas.reserve(static_cast<std::size_t>(k));
  for (Eigen::Index j = 0; j < k; ++j) {
    gammas.emplace_back(alpha[j], 1.0);
  }

  Eigen::MatrixXd draws(static_cast<Eigen::Index>(n), k);
  for (Eigen::Index i = 0; i < draws.rows(); ++i) {
    double total = 0.0;
    while (total <= 0.0) {
      for (Eigen::Index j = 0; j < k; ++j) {
        draws(i, j) = gammas[static_cast<std::size_t>(j)](rng);
      }
      total = draws.row(i).sum();
    }
    draws.row(i) /= total;
  }
  return draws;
}

}  // namespace evr

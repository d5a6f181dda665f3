#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <cstdint>

namespace evr {

using Vector = Eigen::VectorXd;

namespace detail {
void validate_evidence(const Vector& e);
void validate_alpha(const Vector& alpha);
void validate_simplex(const Vector& p);
}  // namespace detail

/// Non-negative per-class evidence e_k, K >= 2.
class EvidenceVector {
 public:
  template <typename Derived>
  explicit EvidenceVector(const Eigen::DenseBase<Derived>& e)
      : e_(e.derived().template cast<double>().matrix()) {
    detail::validate_evidence(e_);
  }

  const Vector& values() const { return e_; }
  Eigen::Index size() const { return e_.size(); }
  double operator[](Eigen::Index k) const { return e_[k]; }
  double total() const { return e_.sum(); }

 private:
  Vector e_;
};

/// Dirichlet concentration vector. Standalone construction needs every
/// alpha_k > 0; parameters built from evidence satisfy alpha_k >= 1.
class DirichletParams {
 public:
  template <typename Derived>
  explicit DirichletParams(const Eigen::DenseBase<Derived>& alpha)
      : alpha_(alpha.derived().template cast<double>().matrix()) {
    detail::validate_alpha(alpha_);
  }

  static DirichletParams uniform(Eigen::Index k) {
    return DirichletParams(Vector::Ones(k));
  }

  const Vector& values() const { return alpha_; }
  Eigen::Index size() const { return alpha_.size(); }
  double operator[](Eigen::Index k) const { return alpha_[k]; }
  /// S = sum_k alpha_k
  double strength() const { return alpha_.sum(); }

 private:
  Vector alpha_;
};

/// Subjective-logic opinion: sum(belief) + uncertainty == 1.
struct BeliefState {
  Vector belief;
  double uncertainty = 1.0;
};

/// A point on the probability simplex.
class ProbabilityVector {
 public:
  template <typename Derived>
  explicit ProbabilityVector(const Eigen::DenseBase<Derived>& p)
      : p_(p.derived().template cast<double>().matrix()) {
    detail::validate_simplex(p_);
  }

  const Vector& values() const { return p_; }
  Eigen::Index size() const { return p_.size(); }
  double operator[](Eigen::Index k) const { return p_[k]; }

 private:
  Vector p_;
};

DirichletParams evidence_to_alpha(const EvidenceVector& e);

/// b_k = e_k / S, u = K / S with S = sum_k (e_k + 1).
BeliefState belief_and_uncertainty(const EvidenceVector& e);

/// Dirichlet mean alpha_j / S.
ProbabilityVector expected_probs(const DirichletParams& alpha);

/// Var[p_j] = alpha_j (S - alpha_j) / (S^2 (S + 1)).
Vector variance_probs(const DirichletParams& alpha);

/// ln B(alpha) = sum ln Gamma(alpha_i) - ln Gamma(S).
double log_beta(const DirichletParams& alpha);

/// Log density of Dir(alpha) at p.
double log_pdf(const DirichletParams& alpha, const ProbabilityVector& p);

/// -ln BC with BC = B((a + b) / 2) / sqrt(B(a) B(b)), evaluated in log space.
double bhattacharyya_distance(const DirichletParams& a, const DirichletParams& b);

/// n draws (one per row) via normalised Gamma(alpha_k, 1) variates.
/// Deterministic for a given seed.
Eigen::MatrixXd sample_dirichlet(const DirichletParams& alpha, std::size_t n,
                                 std::uint64_t seed);

}  // namespace evr

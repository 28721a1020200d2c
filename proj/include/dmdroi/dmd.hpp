#pragma once

#include <vector>

#include <Eigen/Dense>

#include "dmdroi/image.hpp"

namespace dmdroi {

inline constexpr double kDefaultSvdTolerance = 1e-10;
inline constexpr double kConjugateTolerance = 1e-9;

/// P1 = frames 1..N-1 and P2 = frames 2..N, as columns.
struct SnapshotPair {
  Eigen::MatrixXd first;
  Eigen::MatrixXd second;
};

/// Truncated economy SVD of P1: P1 ~= U * diag(S) * V^T with r columns kept.
struct SvdFactors {
  Eigen::MatrixXd U;
  Eigen::VectorXd S;
  Eigen::MatrixXd V;

  Eigen::Index rank() const noexcept { return S.size(); }
};

/// Projection of the unknown pixel-space propagator onto span(U), r x r.
struct ReducedOperator {
  Eigen::MatrixXd matrix;
};

struct Eigenpairs {
  Eigen::MatrixXcd vectors;  // unit-norm columns
  Eigen::VectorXcd values;
};

/// Ordered, conjugate-deduplicated dynamic modes.
///
/// Column k of `modes` is mode k+1; mode 1 has the smallest |phase|.
/// `order[k]` is the index of that mode in the pre-deduplication
/// eigenvalue list, and `retained_from` is the length of that list (the
/// effective SVD rank).
struct DmdResult {
  Eigen::MatrixXcd modes;
  Eigen::VectorXcd eigenvalues;
  Eigen::VectorXd phase_angles;
  std::vector<Eigen::Index> order;
  Eigen::Index retained_from = 0;

  Eigen::Index mode_count() const noexcept { return eigenvalues.size(); }
};

/// Companion (shift) matrix formulation: last frame as a combination of the
/// previous ones.
struct CompanionResult {
  Eigen::VectorXd coefficients;
  Eigen::MatrixXd H;
  Eigen::VectorXcd eigenvalues;
};

SnapshotPair split_snapshots(const Eigen::MatrixXd& data);

/// Singular values below rel_tol * max(S) are dropped.
SvdFactors economy_svd(const Eigen::MatrixXd& p1, double rel_tol = kDefaultSvdTolerance);

/// U^T * P2 * V * diag(S)^-1.
ReducedOperator reduced_operator(const SvdFactors& svd, const Eigen::MatrixXd& p2);

Eigenpairs eigendecompose(const ReducedOperator& op);

/// P2 * V * diag(S)^-1 * omega with each column scaled to unit norm.
Eigen::MatrixXcd dynamic_modes(const Eigen::MatrixXd& p2, const SvdFactors& svd,
                               const Eigen::MatrixXcd& omega);

/// Drops the negative-imaginary member of each conjugate pair and sorts the
/// rest by ascending |arg|, ties broken by descending modulus.
DmdResult order_modes(const Eigen::VectorXcd& eigenvalues, const Eigen::MatrixXcd& modes);

/// Minimum-norm least-squares fit of the last frame against the previous
/// ones, assembled into the companion matrix.
CompanionResult companion_dmd(const SnapshotPair& pair);

DmdResult run_dmd(const Eigen::MatrixXd& data, double rel_tol = kDefaultSvdTolerance);
DmdResult run_dmd(const ImageStack& stack, double rel_tol = kDefaultSvdTolerance);

}  // namespace dmdroi

#include "dmdroi/dmd.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numeric>
#include <string>

#include <Eigen/Eigenvalues>
#include <Eigen/QR>
#include <Eigen/SVD>

#include "dmdroi/error.hpp"
#include "dmdroi/stack_io.hpp"

namespace dmdroi {

using Eigen::Index;
using Eigen::MatrixXcd;
using Eigen::MatrixXd;
using Eigen::VectorXcd;
using Eigen::VectorXd;

namespace {

std::string shape(const MatrixXd& m) {
  return std::to_string(m.rows()) + "x" + std::to_string(m.cols());
}

void normalize_columns(MatrixXcd& m) {
  for (Index k = 0; k < m.cols(); ++k) {
    const double norm = m.col(k).norm();
    if (norm > 0.0) m.col(k) /= norm;
  }
}

}  // namespace

SnapshotPair split_snapshots(const MatrixXd& data) {
  if (data.cols() < 2) {
    throw Error(ErrorCode::TooFewFrames,
                "need at least 2 snapshots, got " + std::to_string(data.cols()));
  }
  const Index n = data.cols() - 1;
  return SnapshotPair{data.leftCols(n), data.rightCols(n)};
}

SvdFactors economy_svd(const MatrixXd& p1, double rel_tol) {
  if (!(rel_tol >= 0.0 && rel_tol < 1.0)) {
    throw Error(ErrorCode::InvalidArgument, "SVD tolerance must lie in [0, 1)");
  }
  if (p1.size() == 0 || p1.cwiseAbs().maxCoeff() == 0.0) {
    throw Error(ErrorCode::DegenerateInput, "cannot decompose an all-zero snapshot matrix");
  }
  Eigen::BDCSVD<MatrixXd> svd(p1, Eigen::ComputeThinU | Eigen::ComputeThinV);
  if (svd.info() != Eigen::Success) {
    throw Error(ErrorCode::NumericalFailure, "SVD did not converge");
  }
  const VectorXd& s = svd.singularValues();
  const double cutoff = rel_tol * s(0);
  Index r = 0;
  while (r < s.size() && s(r) > 0.0 && s(r) >= cutoff) ++r;

  return SvdFactors{svd.matrixU().leftCols(r), s.head(r), svd.matrixV().leftCols(r)};
}

ReducedOperator reduced_operator(const SvdFactors& svd, const MatrixXd& p2) {
  if (svd.U.rows() != p2.rows() || svd.V.rows() != p2.cols()) {
    throw Error(ErrorCode::DimensionMismatch, "P2 is " + shape(p2) + " but U is " + shape(svd.U) +
                                                  " and V is " + shape(svd.V));
  }
  const MatrixXd projected = svd.U.transpose() * p2;
  return ReducedOperator{projected * svd.V * svd.S.cwiseInverse().asDiagonal()};
}

Eigenpairs eigendecompose(const ReducedOperator& op) {
  if (!op.matrix.allFinite()) {
    throw Error(ErrorCode::NumericalFailure, "reduced operator has non-finite entries");
  }
  if (op.matrix.rows() != op.matrix.cols()) {
    throw Error(ErrorCode::DimensionMismatch, "reduced operator is not square");
  }
  Eigen::EigenSolver<MatrixXd> solver(op.matrix, true);
  if (solver.info() != Eigen::Success) {
    throw Error(ErrorCode::NumericalFailure, "eigensolver did not converge");
  }
  MatrixXcd vectors = solver.eigenvectors();
  normalize_columns(vectors);
  return Eigenpairs{std::move(vectors), solver.eigenvalues()};
}

MatrixXcd dynamic_modes(const MatrixXd& p2, const SvdFactors& svd, const MatrixXcd& omega) {
  if (svd.V.rows() != p2.cols() || svd.U.rows() != p2.rows() || omega.rows() != svd.rank()) {
    throw Error(ErrorCode::DimensionMismatch, "dynamic mode factors are not conformant");
  }
  const MatrixXd basis = p2 * (svd.V * svd.S.cwiseInverse().asDiagonal());
  MatrixXcd modes = basis.cast<std::complex<double>>() * omega;
  for (Index k = 0; k < modes.cols(); ++k) {
    // A zero-eigenvalue mode can vanish exactly; fall back to its projection U*omega.
    if (!(modes.col(k).norm() > 0.0)) modes.col(k) = svd.U.cast<std::complex<double>>() * omega.col(k);
  }
  normalize_columns(modes);
  return modes;
}

DmdResult order_modes(const VectorXcd& eigenvalues, const MatrixXcd& modes) {
  const Index count = eigenvalues.size();
  if (modes.cols() != count) {
    throw Error(ErrorCode::DimensionMismatch, "eigenvalue count does not match mode count");
  }
  VectorXd phase(count);
  VectorXd modulus(count);
  for (Index k = 0; k < count; ++k) {
    phase(k) = std::abs(std::arg(eigenvalues(k)));
    modulus(k) = std::abs(eigenvalues(k));
  }

  // Pair every Im < 0 eigenvalue with the closest unpaired Im > 0 partner.
  std::vector<bool> paired(static_cast<std::size_t>(count), false);
  std::vector<bool> discarded(static_cast<std::size_t>(count), false);
  for (Index k = 0; k < count; ++k) {
    if (!(eigenvalues(k).imag() < 0.0)) continue;
    Index best = -1;
    double best_distance = 0.0;
    for (Index j = 0; j < count; ++j) {
      if (j == k || paired[j] || !(eigenvalues(j).imag() > 0.0)) continue;
      if (std::abs(phase(j) - phase(k)) > kConjugateTolerance ||
          std::abs(modulus(j) - modulus(k)) > kConjugateTolerance) {
        continue;
      }
      const double distance = std::abs(eigenvalues(j) - std::conj(eigenvalues(k)));
      if (best < 0 || distance < best_distance) {
        best = j;
        best_distance = distance;
      }
    }
    if (best >= 0) {
      paired[best] = true;
      discarded[k] = true;
    }
  }

  std::vector<Index> order;
  for (Index k = 0; k < count; ++k) {
    if (!discarded[k]) order.push_back(k);
  }
  std::sort(order.begin(), order.end(), [&](Index a, Index b) {
    if (phase(a) != phase(b)) return phase(a) < phase(b);
    if (modulus(a) != modulus(b)) return modulus(a) > modulus(b);
    if (eigenvalues(a).imag() != eigenvalues(b).imag()) return eigenvalues(a).imag() > eigenvalues(b).imag();
    if (eigenvalues(a).real() != eigenvalues(b).real()) return eigenvalues(a).real() > eigenvalues(b).real();
    return a < b;
  });

  DmdResult result;
  const auto kept = static_cast<Index>(order.size());
  result.modes.resize(modes.rows(), kept);
  result.eigenvalues.resize(kept);
  result.phase_angles.resize(kept);
  for (Index i = 0; i < kept; ++i) {
    result.modes.col(i) = modes.col(order[i]);
    result.eigenvalues(i) = eigenvalues(order[i]);
    result.phase_angles(i) = phase(order[i]);
  }
  result.order = std::move(order);
  result.retained_from = count;
  return result;
}

CompanionResult companion_dmd(const SnapshotPair& pair) {
  const MatrixXd& p1 = pair.first;
  if (p1.cols() < 1 || pair.second.cols() != p1.cols() || pair.second.rows() != p1.rows()) {
    throw Error(ErrorCode::DimensionMismatch, "snapshot pair shapes differ");
  }
  const Index n = p1.cols();
  const VectorXd last = pair.second.col(n - 1);

  Eigen::CompleteOrthogonalDecomposition<MatrixXd> cod;
  cod.setThreshold(kDefaultSvdTolerance);
  cod.compute(p1);
  CompanionResult out;
  out.coefficients = cod.solve(last);

  out.H = MatrixXd::Zero(n, n);
  for (Index i = 0; i + 1 < n; ++i) out.H(i + 1, i) = 1.0;
  out.H.col(n - 1) = out.coefficients;

  Eigen::EigenSolver<MatrixXd> solver(out.H, false);
  if (solver.info() != Eigen::Success) {
    throw Error(ErrorCode::NumericalFailure, "companion eigensolver did not converge");
  }
  out.eigenvalues = solver.eigenvalues();
  return out;
}

DmdResult run_dmd(const MatrixXd& data, double rel_tol) {
  const SnapshotPair pair = split_snapshots(data);
  const SvdFactors svd = economy_svd(pair.first, rel_tol);
  const ReducedOperator op = reduced_operator(svd, pair.second);
  const Eigenpairs eig = eigendecompose(op);
  return order_modes(eig.values, dynamic_modes(pair.second, svd, eig.vectors));
}

DmdResult run_dmd(const ImageStack& stack, double rel_tol) {
  return run_dmd(build_data_matrix(stack), rel_tol);
}

}  // namespace dmdroi

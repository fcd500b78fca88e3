#pragma once

#include <Eigen/Dense>

namespace lcrip {

struct SingularTriplet {
  double value = 0.0;
  Eigen::VectorXd left;   ///< unit vector in the row space dimension
  Eigen::VectorXd right;  ///< unit vector in the column space dimension
  int iterations = 0;
};

/// Largest eigenpair of a symmetric positive semidefinite matrix by power
/// iteration, accelerated by repeated squaring for small dimensions and
/// certified by the Rayleigh residual |G v - lambda v| <= tol * lambda.
/// Deterministic: restarts use a fixed internal seed.
/// Throws NonConvergence at the iteration cap.
double top_eigenpair_psd(const Eigen::Ref<const Eigen::MatrixXd>& gram, double tol,
                         Eigen::VectorXd& vector, int* iterations = nullptr);

/// Top singular triplet, iterating on the smaller of M^T M and M M^T.
SingularTriplet top_singular_triplet(const Eigen::Ref<const Eigen::MatrixXd>& m,
                                     double tol = 1e-13);

/// Largest singular value ||M||_{2->2}.
double operator_norm(const Eigen::Ref<const Eigen::MatrixXd>& m, double tol = 1e-13);

}  // namespace lcrip

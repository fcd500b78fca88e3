#include "lcrip/operator_norm.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "lcrip/errors.hpp"
#include "lcrip/rng.hpp"

namespace lcrip {
namespace {

constexpr Eigen::Index kSquaringMaxDim = 48;
constexpr int kIterationCap = 20000;
constexpr int kStallWindow = 200;

template <typename Vec>
Vec restart_vector(Eigen::Index dim, int restart) {
  auto eng = RngStream{0x5EEDC0DEULL, static_cast<std::uint64_t>(restart)}.engine();
  Vec v(dim);
  for (Eigen::Index i = 0; i < dim; ++i) v(i) = standard_normal(eng);
  return v.normalized();
}

// Approximate top eigenvector from the limit of (G / tr G)^(2^j).
template <typename Mat, typename Vec>
Vec squaring_start(const Mat& gram) {
  Mat p = gram / gram.trace();
  for (int j = 0; j < 64; ++j) {
    Mat sq = p * p;
    const double tr = sq.trace();
    if (!(tr > 0.0)) break;
    sq /= tr;
    const double change = (sq - p).template lpNorm<Eigen::Infinity>();
    p = sq;
    if (change < 1e-15) break;
  }
  Eigen::Index best = 0;
  p.colwise().squaredNorm().maxCoeff(&best);
  Vec v = p.col(best);
  const double norm = v.norm();
  if (!(norm > 0.0)) return restart_vector<Vec>(gram.rows(), 0);
  return v / norm;
}

template <typename Mat, typename Vec>
double power_iteration(const Mat& gram, double tol, Vec& v, int& iterations) {
  const Eigen::Index dim = gram.rows();
  v = dim <= kSquaringMaxDim ? squaring_start<Mat, Vec>(gram)
                             : restart_vector<Vec>(dim, 0);
  double best_residual = std::numeric_limits<double>::infinity();
  int since_progress = 0;
  int restarts = 0;
  for (int iter = 1; iter <= kIterationCap; ++iter) {
    const Vec w = gram * v;
    const double lambda = v.dot(w);
    const double residual = (w - lambda * v).norm();
    if (residual <= tol * lambda || lambda <= 0.0) {
      iterations = iter;
      return std::max(lambda, 0.0);
    }
    if (residual < 0.999 * best_residual) {
      best_residual = residual;
      since_progress = 0;
    } else if (++since_progress >= kStallWindow) {
      v = restart_vector<Vec>(dim, ++restarts);
      best_residual = std::numeric_limits<double>::infinity();
      since_progress = 0;
      continue;
    }
    v = w / w.norm();
  }
  throw NonConvergence("power iteration did not converge within " +
                       std::to_string(kIterationCap) + " iterations");
}

}  // namespace

double top_eigenpair_psd(const Eigen::Ref<const Eigen::MatrixXd>& gram, double tol,
                         Eigen::VectorXd& vector, int* iterations) {
  if (gram.rows() != gram.cols() || gram.rows() == 0) {
    throw std::invalid_argument("top eigenpair needs a nonempty square matrix");
  }
  if (!(tol > 0.0)) throw std::invalid_argument("tolerance must be positive");
  const Eigen::Index dim = gram.rows();
  int iters = 0;
  double lambda = 0.0;
  if (!(gram.trace() > 0.0)) {
    vector = Eigen::VectorXd::Unit(dim, 0);
  } else if (dim == 1) {
    vector = Eigen::VectorXd::Ones(1);
    lambda = gram(0, 0);
  } else if (dim == 2) {
    Eigen::Vector2d v;
    lambda = power_iteration<Eigen::Matrix2d, Eigen::Vector2d>(gram, tol, v, iters);
    vector = v;
  } else if (dim == 3) {
    Eigen::Vector3d v;
    lambda = power_iteration<Eigen::Matrix3d, Eigen::Vector3d>(gram, tol, v, iters);
    vector = v;
  } else {
    const Eigen::MatrixXd g = gram;
    lambda = power_iteration<Eigen::MatrixXd, Eigen::VectorXd>(g, tol, vector, iters);
  }
  if (iterations) *iterations = iters;
  return lambda;
}

SingularTriplet top_singular_triplet(const Eigen::Ref<const Eigen::MatrixXd>& m,
                                     double tol) {
  if (m.rows() == 0 || m.cols() == 0) {
    throw std::invalid_argument("operator norm of an empty matrix");
  }
  SingularTriplet out;
  Eigen::VectorXd vec;
  if (m.rows() >= m.cols()) {
    const Eigen::MatrixXd gram = m.transpose() * m;
    top_eigenpair_psd(gram, tol, vec, &out.iterations);
    out.right = vec;
    const Eigen::VectorXd image = m * vec;
    out.value = image.norm();
    out.left = out.value > 0.0 ? Eigen::VectorXd(image / out.value)
                               : Eigen::VectorXd::Unit(m.rows(), 0);
  } else {
    const Eigen::MatrixXd gram = m * m.transpose();
    top_eigenpair_psd(gram, tol, vec, &out.iterations);
    out.left = vec;
    const Eigen::VectorXd image = m.transpose() * vec;
    out.value = image.norm();
    out.right = out.value > 0.0 ? Eigen::VectorXd(image / out.value)
                                : Eigen::VectorXd::Unit(m.cols(), 0);
  }
  return out;
}

double operator_norm(const Eigen::Ref<const Eigen::MatrixXd>& m, double tol) {
  return top_singular_triplet(m, tol).value;
}

}  // namespace lcrip

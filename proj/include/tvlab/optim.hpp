#ifndef TVLAB_OPTIM_HPP
#define TVLAB_OPTIM_HPP

#include <Eigen/Core>
#include <functional>

namespace tvlab {

struct NelderMeadOptions {
  int max_iters = 600;
  double f_tol = 1e-15;
  double initial_step = 0.1;
};

struct MinimizeResult {
  Eigen::VectorXd x;
  double value = 0.0;
  int iterations = 0;
  bool converged = false;
};

/// Derivative-free simplex minimization; deterministic for a fixed start.
MinimizeResult nelder_mead(const std::function<double(const Eigen::VectorXd&)>& f,
                           const Eigen::VectorXd& x0,
                           const NelderMeadOptions& opts = NelderMeadOptions());

/// Newton polish on finite-difference derivatives; sharpens a minimizer
/// found by a coarse method. Exact in one step for quadratics.
Eigen::VectorXd fd_newton_polish(const std::function<double(const Eigen::VectorXd&)>& f,
                                 Eigen::VectorXd x, int iters = 8, double step = 1e-5);

struct BoxClamp {
  Eigen::VectorXd lo;
  Eigen::VectorXd hi;
  Eigen::VectorXd apply(const Eigen::VectorXd& x) const {
    return x.cwiseMax(lo).cwiseMin(hi);
  }
};

}  // namespace tvlab

#endif

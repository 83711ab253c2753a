#include "tvlab/optim.hpp"

#include <Eigen/LU>
#include <algorithm>
#include <cmath>
#include <vector>

namespace tvlab {

MinimizeResult nelder_mead(const std::function<double(const Eigen::VectorXd&)>& f,
                           const Eigen::VectorXd& x0, const NelderMeadOptions& opts) {
  const int n = static_cast<int>(x0.size());
  std::vector<Eigen::VectorXd> pts;
  std::vector<double> vals;
  pts.reserve(static_cast<std::size_t>(n + 1));
  pts.push_back(x0);
  for (int i = 0; i < n; ++i) {
    Eigen::VectorXd p = x0;
    const double scale = std::abs(p(i)) > 1.0 ? std::abs(p(i)) : 1.0;
    p(i) += opts.initial_step * scale;
    pts.push_back(p);
  }
  for (const auto& p : pts) vals.push_back(f(p));

  std::vector<int> order(static_cast<std::size_t>(n + 1));
  MinimizeResult result;
  int iter = 0;
  for (; iter < opts.max_iters; ++iter) {
    for (int i = 0; i <= n; ++i) order[static_cast<std::size_t>(i)] = i;
    std::sort(order.begin(), order.end(), [&](int a, int b) {
      return vals[static_cast<std::size_t>(a)] < vals[static_cast<std::size_t>(b)];
    });
    const int best = order.front();
    const int worst = order.back();
    const int second_worst = order[static_cast<std::size_t>(n - 1 >= 0 ? n - 1 : 0)];

    if (std::abs(vals[static_cast<std::size_t>(worst)] - vals[static_cast<std::size_t>(best)]) <=
        opts.f_tol * (1.0 + std::abs(vals[static_cast<std::size_t>(best)]))) {
      result.converged = true;
      break;
    }

    Eigen::VectorXd centroid = Eigen::VectorXd::Zero(n);
    for (int i = 0; i <= n; ++i)
      if (i != worst) centroid += pts[static_cast<std::size_t>(i)];
    centroid /= static_cast<double>(n);

    const Eigen::VectorXd reflected = centroid + (centroid - pts[static_cast<std::size_t>(worst)]);
    const double fr = f(reflected);

    if (fr < vals[static_cast<std::size_t>(best)]) {
      const Eigen::VectorXd expanded =
          centroid + 2.0 * (centroid - pts[static_cast<std::size_t>(worst)]);
      const double fe = f(expanded);
      if (fe < fr) {
        pts[static_cast<std::size_t>(worst)] = expanded;
        vals[static_cast<std::size_t>(worst)] = fe;
      } else {
        pts[static_cast<std::size_t>(worst)] = reflected;
        vals[static_cast<std::size_t>(worst)] = fr;
      }
    } else if (fr < vals[static_cast<std::size_t>(second_worst)]) {
      pts[static_cast<std::size_t>(worst)] = reflected;
      vals[static_cast<std::size_t>(worst)] = fr;
    } else {
      const Eigen::VectorXd contracted =
          centroid + 0.5 * (pts[static_cast<std::size_t>(worst)] - centroid);
      const double fc = f(contracted);
      if (fc < vals[static_cast<std::size_t>(worst)]) {
        pts[static_cast<std::size_t>(worst)] = contracted;
        vals[static_cast<std::size_t>(worst)] = fc;
      } else {
        // Shrink toward the best vertex.
        for (int i = 0; i <= n; ++i) {
          if (i == best) continue;
          pts[static_cast<std::size_t>(i)] =
              pts[static_cast<std::size_t>(best)] +
              0.5 * (pts[static_cast<std::size_t>(i)] - pts[static_cast<std::size_t>(best)]);
          vals[static_cast<std::size_t>(i)] = f(pts[static_cast<std::size_t>(i)]);
        }
      }
    }
  }

  int best = 0;
  for (int i = 1; i <= n; ++i)
    if (vals[static_cast<std::size_t>(i)] < vals[static_cast<std::size_t>(best)]) best = i;
  result.x = pts[static_cast<std::size_t>(best)];
  result.value = vals[static_cast<std::size_t>(best)];
  result.iterations = iter;
  return result;
}

Eigen::VectorXd fd_newton_polish(const std::function<double(const Eigen::VectorXd&)>& f,
                                 Eigen::VectorXd x, int iters, double step) {
  const int n = static_cast<int>(x.size());
  double fx = f(x);
  for (int it = 0; it < iters; ++it) {
    Eigen::VectorXd g(n);
    Eigen::MatrixXd H(n, n);
    for (int i = 0; i < n; ++i) {
      Eigen::VectorXd xp = x, xm = x;
      xp(i) += step;
      xm(i) -= step;
      const double fp = f(xp);
      const double fm = f(xm);
      g(i) = (fp - fm) / (2.0 * step);
      H(i, i) = (fp - 2.0 * fx + fm) / (step * step);
      for (int j = i + 1; j < n; ++j) {
        Eigen::VectorXd xpp = x, xpm = x, xmp = x, xmm = x;
        xpp(i) += step; xpp(j) += step;
        xpm(i) += step; xpm(j) -= step;
        xmp(i) -= step; xmp(j) += step;
        xmm(i) -= step; xmm(j) -= step;
        H(i, j) = H(j, i) = (f(xpp) - f(xpm) - f(xmp) + f(xmm)) / (4.0 * step * step);
      }
    }
    Eigen::VectorXd dx = H.fullPivLu().solve(-g);
    if (!dx.allFinite()) break;
    double t = 1.0;
    bool accepted = false;
    for (int bt = 0; bt < 20; ++bt) {
      const Eigen::VectorXd cand = x + t * dx;
      const double fc = f(cand);
      if (fc < fx) {
        x = cand;
        fx = fc;
        accepted = true;
        break;
      }
      t *= 0.5;
    }
    if (!accepted) break;
  }
  return x;
}

}  // namespace tvlab

#include "tvlab/linalg.hpp"

#include <Eigen/LU>
#include <Eigen/SVD>
#include <stdexcept>

namespace tvlab {

RankDecision rank_decide(const Eigen::MatrixXd& M, TolPolicy policy) {
  if (!M.allFinite()) throw std::invalid_argument("rank_decide: non-finite entries");

  RankDecision out;
  const int vmin = static_cast<int>(std::min(M.rows(), M.cols()));
  if (vmin == 0) {
    out.tolerance_used = policy.kind == TolPolicy::Kind::Absolute ? policy.value : 0.0;
    return out;
  }

  Eigen::JacobiSVD<Eigen::MatrixXd> svd(M);
  const Eigen::VectorXd& sv = svd.singularValues();
  out.singular_values.assign(sv.data(), sv.data() + sv.size());

  const double sigma_max = sv.size() > 0 ? sv(0) : 0.0;
  out.tolerance_used = policy.kind == TolPolicy::Kind::Relative
                           ? policy.value * sigma_max * static_cast<double>(std::max(M.rows(), M.cols()))
                           : policy.value;

  int rank = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i)
    if (sv(i) > out.tolerance_used) ++rank;
  out.rank = rank;
  out.corank = vmin - rank;
  return out;
}

int corank_of_jacobian(const ExprMap& map, const Eigen::VectorXd& x, const Eigen::VectorXd& a,
                       TolPolicy policy) {
  return rank_decide(jacobian(map, x, a, WithRespectTo::X), policy).corank;
}

Eigen::MatrixXd SchurChart::apply(const Eigen::MatrixXd& M) const {
  const int p = static_cast<int>(pivot_rows.size());
  const int rows = static_cast<int>(M.rows());
  const int cols = static_cast<int>(M.cols());

  std::vector<int> row_order = pivot_rows;
  std::vector<int> col_order = pivot_cols;
  std::vector<char> row_used(static_cast<std::size_t>(rows), 0);
  std::vector<char> col_used(static_cast<std::size_t>(cols), 0);
  for (int r : pivot_rows) row_used[static_cast<std::size_t>(r)] = 1;
  for (int c : pivot_cols) col_used[static_cast<std::size_t>(c)] = 1;
  for (int r = 0; r < rows; ++r)
    if (!row_used[static_cast<std::size_t>(r)]) row_order.push_back(r);
  for (int c = 0; c < cols; ++c)
    if (!col_used[static_cast<std::size_t>(c)]) col_order.push_back(c);

  Eigen::MatrixXd P(rows, cols);
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c)
      P(r, c) = M(row_order[static_cast<std::size_t>(r)], col_order[static_cast<std::size_t>(c)]);

  if (p == 0) return P;
  const Eigen::MatrixXd A = P.topLeftCorner(p, p);
  const Eigen::MatrixXd B = P.topRightCorner(p, cols - p);
  const Eigen::MatrixXd C = P.bottomLeftCorner(rows - p, p);
  const Eigen::MatrixXd D = P.bottomRightCorner(rows - p, cols - p);
  return D - C * A.partialPivLu().solve(B);
}

SchurChart schur_stratum_chart(const Eigen::MatrixXd& M, int k, TolPolicy policy) {
  const int rows = static_cast<int>(M.rows());
  const int cols = static_cast<int>(M.cols());
  const int v = std::min(rows, cols);
  if (k < 1 || k > v) throw std::invalid_argument("schur_stratum_chart: k out of range");
  const int p = v - k;

  RankDecision rd = rank_decide(M, policy);
  if (rd.rank < p)
    throw std::invalid_argument(
        "schur_stratum_chart: no invertible pivot block of size " + std::to_string(p) +
        " (corank exceeds v - k)");

  // Greedy full-pivot elimination picks the pivot block deterministically.
  SchurChart chart;
  Eigen::MatrixXd work = M;
  std::vector<char> row_used(static_cast<std::size_t>(rows), 0);
  std::vector<char> col_used(static_cast<std::size_t>(cols), 0);
  for (int step = 0; step < p; ++step) {
    int pr = -1, pc = -1;
    double best = -1.0;
    for (int r = 0; r < rows; ++r) {
      if (row_used[static_cast<std::size_t>(r)]) continue;
      for (int c = 0; c < cols; ++c) {
        if (col_used[static_cast<std::size_t>(c)]) continue;
        const double mag = std::abs(work(r, c));
        if (mag > best) {
          best = mag;
          pr = r;
          pc = c;
        }
      }
    }
    const double piv = work(pr, pc);
    for (int r = 0; r < rows; ++r) {
      if (row_used[static_cast<std::size_t>(r)] || r == pr) continue;
      const double factor = work(r, pc) / piv;
      for (int c = 0; c < cols; ++c)
        if (!col_used[static_cast<std::size_t>(c)]) work(r, c) -= factor * work(pr, c);
    }
    row_used[static_cast<std::size_t>(pr)] = 1;
    col_used[static_cast<std::size_t>(pc)] = 1;
    chart.pivot_rows.push_back(pr);
    chart.pivot_cols.push_back(pc);
  }
  chart.chart = chart.apply(M);
  return chart;
}

}  // namespace tvlab

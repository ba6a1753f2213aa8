#include "gmdiff/quadrature.hpp"

#include <cmath>
#include <stdexcept>

namespace gmdiff {

namespace {

// Golub-Welsch: nodes are the eigenvalues of the symmetric tridiagonal
// Jacobi matrix of the orthogonal-polynomial recurrence, weights are
// mu0 * (first eigenvector component)^2.
QuadratureRule golub_welsch(const Eigen::VectorXd& off_diag, double mu0) {
  const int n = static_cast<int>(off_diag.size()) + 1;
  Eigen::MatrixXd jacobi = Eigen::MatrixXd::Zero(n, n);
  for (int k = 0; k + 1 < n; ++k) {
    jacobi(k, k + 1) = off_diag[k];
    jacobi(k + 1, k) = off_diag[k];
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(jacobi);
  if (es.info() != Eigen::Success) throw std::runtime_error("golub_welsch: eigensolver failed");
  QuadratureRule rule;
  rule.nodes = es.eigenvalues();
  rule.weights = mu0 * es.eigenvectors().row(0).transpose().array().square();
  return rule;
}

}  // namespace

QuadratureRule gauss_legendre(int n) {
  if (n < 1) throw std::invalid_argument("gauss_legendre: n must be >= 1");
  Eigen::VectorXd beta(n - 1);
  for (int k = 1; k < n; ++k) beta[k - 1] = k / std::sqrt(4.0 * k * k - 1.0);
  return golub_welsch(beta, 2.0);
}

QuadratureRule gauss_hermite(int n) {
  if (n < 1) throw std::invalid_argument("gauss_hermite: n must be >= 1");
  Eigen::VectorXd beta(n - 1);
  for (int k = 1; k < n; ++k) beta[k - 1] = std::sqrt(0.5 * k);
  return golub_welsch(beta, std::sqrt(M_PI));
}

namespace {

double simpson(const std::function<double(double)>& f, double a, double fa, double m, double fm,
               double b, double fb) {
  return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
}

double simpson_rec(const std::function<double(double)>& f, double a, double fa, double m,
                   double fm, double b, double fb, double whole, double tol, int depth) {
  const double lm = 0.5 * (a + m);
  const double rm = 0.5 * (m + b);
  const double flm = f(lm);
  const double frm = f(rm);
  const double left = simpson(f, a, fa, lm, flm, m, fm);
  const double right = simpson(f, m, fm, rm, frm, b, fb);
  const double err = left + right - whole;
  if (depth <= 0 || std::abs(err) <= 15.0 * tol) return left + right + err / 15.0;
  return simpson_rec(f, a, fa, lm, flm, m, fm, left, 0.5 * tol, depth - 1) +
         simpson_rec(f, m, fm, rm, frm, b, fb, right, 0.5 * tol, depth - 1);
}

}  // namespace

double adaptive_simpson(const std::function<double(double)>& f, double a, double b, double tol,
                        int max_depth) {
  const double m = 0.5 * (a + b);
  const double fa = f(a), fm = f(m), fb = f(b);
  const double whole = simpson(f, a, fa, m, fm, b, fb);
  return simpson_rec(f, a, fa, m, fm, b, fb, whole, tol, max_depth);
}

}  // namespace gmdiff

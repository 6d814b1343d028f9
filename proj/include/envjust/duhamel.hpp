#pragma once

#include <functional>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "envjust/params.hpp"

namespace envjust {

/// Parameters of the damped Klein-Gordon light-cone representation.
/// Cones are unit speed in x / sqrt(beta); profiles are evaluated in x.
struct KernelParams {
  double alphaHat = 0;    // eps^2 alpha / 2
  double kernelFreq = 0;  // m in J0(m zeta)
  double gamma = 1, beta = 1, epsilon = 0.1;
  double tol = 1e-8;      // relative tolerance per integral
  unsigned maxDepth = 15;
};

KernelParams make_kernel_params(const ModelParams& p, const DerivedParams& d);

/// sqrt(gamma - alphaHat^2): the mass of the undamped equation for e^{alphaHat t} y.
double kernel_freq_dimensional(double gamma, double alphaHat);
/// sqrt(gamma^2 - alphaHat^2), the alternative form.
double kernel_freq_alternative(double gamma, double alphaHat);

struct Profile {
  std::function<double(double)> eval;
  double supNorm = 0;
};

/// h(z, s) on the dependency cone, with a bound on sup_z |h(z, s)|.
struct ConeFunction {
  std::function<double(double z, double s)> eval;
  std::function<double(double s)> supBound;
  std::vector<double> breaks;  // times where h may lose smoothness in s
  double knotOrigin = 0, knotSpacing = 0;  // x-knots where h may lose smoothness (0: none)
};

class QuadratureError : public std::runtime_error {
 public:
  QuadratureError(const std::string& what, double achieved)
      : std::runtime_error(what), achievedError(achieved) {}
  double achievedError;
};

class BoundViolation : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class PicardDivergence : public std::runtime_error {
 public:
  PicardDivergence(const std::string& what, std::vector<double> d)
      : std::runtime_error(what), defects(std::move(d)) {}
  std::vector<double> defects;
};

/// 1/2 e^{-ah t}[f(x+t) + f(x-t) + ah int f J0(m z0) + int f d_t J0(m z0)]
double op_A(const Profile& f, double t, double x, const KernelParams& kp);
/// (eps/2) e^{-ah t} int g J0(m z0)
double op_B(const Profile& g, double t, double x, const KernelParams& kp);
/// -1/2 int_0^t int e^{-ah (t-s)} h J0(m z) dz ds
double op_M(const ConeFunction& h, double t, double x, const KernelParams& kp);

/// Tensor cubic Lagrange interpolant of samples on a uniform (t, x) lattice.
/// Arguments outside the lattice are clamped to its edge.
class LatticeConeFunction {
 public:
  LatticeConeFunction(double t0, double dt, std::size_t nt, double x0, double dx, std::size_t nx);
  std::vector<double>& row(std::size_t i) { return rows_[i]; }
  const std::vector<double>& row(std::size_t i) const { return rows_[i]; }
  /// Recomputes the per-row maxima used by sup_bound; call after writing rows.
  void finalize();
  double eval(double z, double s) const;
  /// Rigorous bound from the row maxima and the interpolation Lebesgue constants.
  double sup_bound(double s) const;
  ConeFunction view() const;

 private:
  double t0_, dt_, x0_, dx_;
  std::size_t nt_, nx_;
  std::vector<std::vector<double>> rows_;
  std::vector<double> rowMax_;
  struct Rows;
  std::shared_ptr<const Rows> splines_;
  int time_stencil(double s, double* w) const;
};

struct PicardProblem {
  KernelParams kp;
  double lambda = -1;
  Profile f, g;                                    // y(0) = f, y_t(0) = eps g
  std::function<double(double s, double x)> X;     // leading approximation
  std::function<double(double s, double x)> Res;   // ansatz residual (unscaled)
  bool linear = false;                             // drop the y^2 and y^3 terms
  double T = 1;
  std::vector<double> xOut;
  double dt = 0.1, dx = 0.1;
  double tol = 1e-9;
  int maxIterations = 60;
  unsigned workers = 1;
};

struct PicardResult {
  std::vector<double> times;                 // lattice rows
  std::vector<double> xOut;
  std::vector<std::vector<double>> y;        // y[row][output point]
  std::vector<double> defects;               // sup difference of successive iterates
  int iterations = 0;
  bool converged = false;
  double finalDefect = 0;
};

/// Fixed-point iteration y = A[f] + B[eps g] + M[h(y)] with
/// h = eps^-2 Res - lambda (eps^4 y^3 + 3 X^2 y + 3 eps^2 X y^2).
PicardResult picard_solve_error(const PicardProblem& prob);

struct KernelCandidate {
  std::string name;
  double freq = 0;
  double mismatch = 0;  // sup over samples of |representation - spectral|
};

struct KernelReport {
  std::vector<KernelCandidate> candidates;
  std::size_t selected = 0;
  double alternativeMismatch = 0;
  double selectedFreq() const { return candidates[selected].freq; }
};

/// Linear damped Klein-Gordon (lambda = 0, h = 0) with pulse data, solved
/// spectrally and through op_A + op_B for each candidate kernel frequency.
KernelReport validate_kernel(const ModelParams& p, double T = 1.0);

}  // namespace envjust

#include "envjust/duhamel.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <numbers>
#include <sstream>
#include <thread>

#include <boost/math/interpolators/cardinal_cubic_b_spline.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "envjust/bessel.hpp"
#include "envjust/carrier.hpp"
#include "envjust/grid.hpp"

namespace envjust {

namespace {

constexpr double kHalfPi = 0.5 * std::numbers::pi;
// Interpolation Lebesgue bound for uniform cubic B-spline rows (about 1.55 on
// the infinite lattice; endpoint derivative estimates are given extra room).
constexpr double kSplineLebesgue = 2.0;

template <class F>
double integrate_checked(F&& f, double a, double b, double tol, unsigned depth, const char* what,
                         double absFloor = 0) {
  double err = 0, l1 = 0;
  const double v =
      boost::math::quadrature::gauss_kronrod<double, 15>::integrate(f, a, b, depth, tol, &err, &l1);
  if (!std::isfinite(v)) throw QuadratureError(std::string(what) + ": non-finite integral", err);
  if (err > 10 * tol * l1 && err > 1e-14 * (1 + l1) && err > absFloor)
  {
    std::ostringstream o;
    o << what << ": quadrature did not reach tolerance (error estimate " << err << ", L1 " << l1
      << ", interval [" << a << ", " << b << "])";
    throw QuadratureError(o.str(), err);
  }
  return v;
}

void check_bound(double value, double bound, const char* what) {
  if (std::fabs(value) > bound * (1 + 1e-7) + 1e-12)
    throw BoundViolation(std::string(what) + " exceeds its a priori bound");
}

template <class Fn>
void parallel_for(std::size_t n, unsigned workers, Fn&& fn) {
  workers = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(n)));
  if (workers == 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex m;
  std::vector<std::thread> pool;
  for (unsigned w = 0; w < workers; ++w)
    pool.emplace_back([&] {
      for (std::size_t i; (i = next.fetch_add(1)) < n;) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard lock(m);
          if (!failure) failure = std::current_exception();
          next = n;
        }
      }
    });
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

// Lagrange weights on nodes start..start+n-1 (unit spacing) at position u.
void lagrange_weights(double u, int n, double* w) {
  for (int i = 0; i < n; ++i) {
    double num = 1, den = 1;
    for (int j = 0; j < n; ++j) {
      if (j == i) continue;
      num *= u - j;
      den *= i - j;
    }
    w[i] = num / den;
  }
}

}  // namespace

double kernel_freq_dimensional(double gamma, double alphaHat) {
  return std::sqrt(gamma - alphaHat * alphaHat);
}

double kernel_freq_alternative(double gamma, double alphaHat) {
  return std::sqrt(gamma * gamma - alphaHat * alphaHat);
}

KernelParams make_kernel_params(const ModelParams& p, const DerivedParams& d) {
  KernelParams kp;
  kp.alphaHat = d.alphaHat;
  kp.kernelFreq = kernel_freq_dimensional(p.gamma, d.alphaHat);
  kp.gamma = p.gamma;
  kp.beta = p.beta;
  kp.epsilon = p.epsilon;
  return kp;
}

double op_A(const Profile& f, double t, double x, const KernelParams& kp) {
  if (t == 0) return f.eval(x);
  const double sb = std::sqrt(kp.beta), m = kp.kernelFreq, ah = kp.alphaHat;
  auto integrand = [&](double th) {
    const double ct = std::cos(th), u = m * t * ct;
    return f.eval(x + sb * t * std::sin(th)) * (ah * bessel_j0(u) - m * m * t * bessel_j1_over_z(u)) * t * ct;
  };
  const double I = integrate_checked(integrand, -kHalfPi, kHalfPi, kp.tol, kp.maxDepth, "op_A");
  const double damp = std::exp(-ah * t);
  const double v = 0.5 * damp * (f.eval(x + sb * t) + f.eval(x - sb * t) + I);
  check_bound(v, damp * f.supNorm * (1 + ah * t + 0.5 * m * m * t * t), "op_A");
  return v;
}

double op_B(const Profile& g, double t, double x, const KernelParams& kp) {
  if (t == 0) return 0;
  const double sb = std::sqrt(kp.beta), m = kp.kernelFreq;
  auto integrand = [&](double th) {
    const double ct = std::cos(th);
    return g.eval(x + sb * t * std::sin(th)) * bessel_j0(m * t * ct) * t * ct;
  };
  const double I = integrate_checked(integrand, -kHalfPi, kHalfPi, kp.tol, kp.maxDepth, "op_B");
  const double damp = std::exp(-kp.alphaHat * t);
  const double v = 0.5 * kp.epsilon * damp * I;
  check_bound(v, kp.epsilon * t * damp * g.supNorm, "op_B");
  return v;
}

double op_M(const ConeFunction& h, double t, double x, const KernelParams& kp) {
  if (t == 0) return 0;
  const double sb = std::sqrt(kp.beta), m = kp.kernelFreq, ah = kp.alphaHat;
  const double innerTol = std::min(1e-11, 0.01 * kp.tol);
  // Inner integrals are split where the cone section crosses the knots of h,
  // so every piece is smooth and converges without deep refinement; this keeps
  // the outer integrand free of adaptive noise.
  auto outer = [&](double s) {
    const double r = t - s;
    if (r <= 0) return 0.0;
    const double half = sb * r;
    auto inner = [&](double th) {
      const double ct = std::cos(th);
      return h.eval(x + half * std::sin(th), s) * bessel_j0(m * r * ct) * r * ct;
    };
    std::vector<double> cuts{-kHalfPi};
    if (h.knotSpacing > 0) {
      const double k0 = std::floor((x - half - h.knotOrigin) / h.knotSpacing) + 1;
      for (double k = k0;; k += 1) {
        const double z = h.knotOrigin + k * h.knotSpacing;
        if (z >= x + half) break;
        cuts.push_back(std::asin(std::clamp((z - x) / half, -1.0, 1.0)));
      }
    }
    cuts.push_back(kHalfPi);
    double v = 0;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i)
      if (cuts[i + 1] > cuts[i]) v += integrate_checked(inner, cuts[i], cuts[i + 1], innerTol, kp.maxDepth, "op_M");
    return std::exp(-ah * r) * v;
  };
  auto boundDensity = [&](double s) { return std::exp(-ah * (t - s)) * (t - s) * h.supBound(s); };

  // Split at the caller's breakpoints (e.g. lattice rows) so each piece is smooth.
  std::vector<double> cuts{0.0};
  for (double b : h.breaks)
    if (b > 0 && b < t) cuts.push_back(b);
  cuts.push_back(t);
  double I = 0, bound = 0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i)
    bound += integrate_checked(boundDensity, cuts[i], cuts[i + 1], kp.tol, kp.maxDepth, "op_M bound");
  // Segment errors are judged against the whole integral's scale.
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i)
    I += integrate_checked(outer, cuts[i], cuts[i + 1], kp.tol, kp.maxDepth, "op_M", kp.tol * bound);
  const double v = -0.5 * I;
  check_bound(v, bound, "op_M");
  return v;
}

struct LatticeConeFunction::Rows {
  std::vector<boost::math::interpolators::cardinal_cubic_b_spline<double>> splines;
};

LatticeConeFunction::LatticeConeFunction(double t0, double dt, std::size_t nt, double x0, double dx,
                                         std::size_t nx)
    : t0_(t0), dt_(dt), x0_(x0), dx_(dx), nt_(nt), nx_(nx), rows_(nt, std::vector<double>(nx, 0.0)) {
  if (nt < 1 || nx < 5) throw std::invalid_argument("lattice needs at least 1 row and 5 columns");
}

void LatticeConeFunction::finalize() {
  rowMax_.assign(nt_, 0.0);
  auto rows = std::make_shared<Rows>();
  for (std::size_t i = 0; i < nt_; ++i) {
    for (double v : rows_[i]) rowMax_[i] = std::max(rowMax_[i], std::fabs(v));
    rows->splines.emplace_back(rows_[i].data(), nx_, x0_, dx_);
  }
  splines_ = std::move(rows);
}

int LatticeConeFunction::time_stencil(double s, double* w) const {
  const int n = static_cast<int>(std::min<std::size_t>(4, nt_));
  const double u = std::clamp((s - t0_) / dt_, 0.0, static_cast<double>(nt_ - 1));
  int start = static_cast<int>(std::floor(u)) - 1;
  start = std::clamp(start, 0, static_cast<int>(nt_) - n);
  lagrange_weights(u - start, n, w);
  return start;
}

double LatticeConeFunction::eval(double z, double s) const {
  if (!splines_) throw std::logic_error("LatticeConeFunction used before finalize()");
  const double zc = std::clamp(z, x0_, x0_ + dx_ * static_cast<double>(nx_ - 1));
  double w[4];
  const int start = time_stencil(s, w);
  const int n = static_cast<int>(std::min<std::size_t>(4, nt_));
  double v = 0;
  for (int i = 0; i < n; ++i)
    if (w[i] != 0) v += w[i] * splines_->splines[start + i](zc);
  return v;
}

double LatticeConeFunction::sup_bound(double s) const {
  double w[4];
  const int start = time_stencil(s, w);
  const int n = static_cast<int>(std::min<std::size_t>(4, nt_));
  double b = 0;
  for (int i = 0; i < n; ++i) b += std::fabs(w[i]) * rowMax_[start + i];
  return kSplineLebesgue * b;
}

ConeFunction LatticeConeFunction::view() const {
  ConeFunction c;
  c.eval = [this](double z, double s) { return eval(z, s); };
  c.supBound = [this](double s) { return sup_bound(s); };
  for (std::size_t i = 1; i < nt_; ++i) c.breaks.push_back(t0_ + dt_ * static_cast<double>(i));
  c.knotOrigin = x0_;
  c.knotSpacing = dx_;
  return c;
}

PicardResult picard_solve_error(const PicardProblem& prob) {
  if (prob.xOut.empty()) throw std::invalid_argument("picard_solve_error: no output points");
  if (!(prob.T > 0 && prob.dt > 0 && prob.dx > 0)) throw std::invalid_argument("picard_solve_error: bad lattice");
  const KernelParams& kp = prob.kp;
  const double sb = std::sqrt(kp.beta), eps = prob.kp.epsilon, lam = prob.lambda;
  const std::size_t nt = static_cast<std::size_t>(std::max(1.0, std::ceil(prob.T / prob.dt - 1e-9))) + 1;
  const double dt = prob.T / static_cast<double>(nt - 1);
  const double xlo = *std::min_element(prob.xOut.begin(), prob.xOut.end());
  const double xhi = *std::max_element(prob.xOut.begin(), prob.xOut.end());
  // Row i is only needed where it can influence an output cone, plus a margin
  // that absorbs the non-local spline coefficients; the lattice leaves room
  // for the cones of the margin columns as well.
  const double dx = prob.dx;
  const std::size_t margin = 12;
  const std::size_t reachCols = static_cast<std::size_t>(std::ceil(sb * prob.T / dx));
  const std::size_t padCols = reachCols + 2 * margin;
  const double x0 = xlo - dx * static_cast<double>(padCols);
  const std::size_t outCols = static_cast<std::size_t>(std::ceil((xhi - xlo) / dx));
  const std::size_t nx = outCols + 2 * padCols + 1;
  auto tRow = [&](std::size_t i) { return dt * static_cast<double>(i); };
  auto xCol = [&](std::size_t j) { return x0 + dx * static_cast<double>(j); };
  std::vector<std::size_t> jlo(nt), jhi(nt);
  std::vector<std::pair<std::size_t, std::size_t>> work;
  for (std::size_t i = 0; i < nt; ++i) {
    const auto reach = static_cast<std::size_t>(std::ceil(sb * (prob.T - tRow(i)) / dx - 1e-9));
    jlo[i] = padCols - reach - margin;
    jhi[i] = padCols + outCols + reach + margin;
    for (std::size_t j = jlo[i]; j <= jhi[i]; ++j) work.emplace_back(i, j);
  }
  auto trusted = [&](std::size_t i, std::size_t j) {
    const double reach = sb * (prob.T - tRow(i));
    return xCol(j) >= xlo - reach && xCol(j) <= xhi + reach;
  };
  // Constant extension outside the computed columns keeps the rows smooth.
  auto extend = [&](std::vector<double>& v) {
    for (std::size_t i = 0; i < nt; ++i) {
      double* r = v.data() + i * nx;
      std::fill(r, r + jlo[i], r[jlo[i]]);
      std::fill(r + jhi[i] + 1, r + nx, r[jhi[i]]);
    }
  };

  std::vector<double> base(nt * nx, 0.0), y, ynew(nt * nx, 0.0);
  parallel_for(work.size(), prob.workers, [&](std::size_t w) {
    const auto [i, j] = work[w];
    base[i * nx + j] = op_A(prob.f, tRow(i), xCol(j), kp) + op_B(prob.g, tRow(i), xCol(j), kp);
  });
  extend(base);
  y = base;

  std::vector<double> Xs(nt * nx, 0.0), Rs(nt * nx, 0.0);
  for (std::size_t i = 0; i < nt; ++i)
    for (std::size_t j = 0; j < nx; ++j) {
      if (prob.X) Xs[i * nx + j] = prob.X(tRow(i), xCol(j));
      if (prob.Res) Rs[i * nx + j] = prob.Res(tRow(i), xCol(j));
    }

  PicardResult res;
  int increases = 0;
  for (int it = 1; it <= prob.maxIterations; ++it) {
    LatticeConeFunction hl(0.0, dt, nt, x0, dx, nx);
    for (std::size_t i = 0; i < nt; ++i)
      for (std::size_t j = 0; j < nx; ++j) {
        const std::size_t k = i * nx + j;
        const double yy = y[k], X = Xs[k];
        double nl = 3 * X * X * yy;
        if (!prob.linear) nl += std::pow(eps, 4) * yy * yy * yy + 3 * eps * eps * X * yy * yy;
        hl.row(i)[j] = Rs[k] / (eps * eps) - lam * nl;
      }
    hl.finalize();
    const ConeFunction h = hl.view();
    parallel_for(work.size(), prob.workers, [&](std::size_t w) {
      const auto [i, j] = work[w];
      const std::size_t idx = i * nx + j;
      ynew[idx] = base[idx] + (i == 0 ? 0.0 : op_M(h, tRow(i), xCol(j), kp));
    });
    extend(ynew);
    double defect = 0;
    for (std::size_t i = 0; i < nt; ++i)
      for (std::size_t j = 0; j < nx; ++j)
        if (trusted(i, j)) defect = std::max(defect, std::fabs(ynew[i * nx + j] - y[i * nx + j]));
    y.swap(ynew);
    if (!res.defects.empty() && defect > res.defects.back())
      ++increases;
    else
      increases = 0;
    res.defects.push_back(defect);
    res.iterations = it;
    res.finalDefect = defect;
    if (!std::isfinite(defect) || increases >= 3)
      throw PicardDivergence("Picard iteration is not contracting", res.defects);
    if (defect < prob.tol) {
      res.converged = true;
      break;
    }
  }

  LatticeConeFunction yl(0.0, dt, nt, x0, dx, nx);
  for (std::size_t i = 0; i < nt; ++i) std::copy_n(y.begin() + i * nx, nx, yl.row(i).begin());
  yl.finalize();
  res.xOut = prob.xOut;
  for (std::size_t i = 0; i < nt; ++i) {
    res.times.push_back(tRow(i));
    std::vector<double> r;
    for (double x : prob.xOut) r.push_back(yl.eval(x, tRow(i)));
    res.y.push_back(std::move(r));
  }
  return res;
}

KernelReport validate_kernel(const ModelParams& p, double T) {
  const double ah = 0.5 * p.epsilon * p.epsilon * p.alpha;
  const double sb = std::sqrt(p.beta);
  const double L = 2 * (12.0 + sb * T) * 2;
  const std::size_t N = 1024;
  const GridPtr grid = make_grid(L, N);
  const double mid = 0.5 * L;
  auto f = [mid](double x) { return std::exp(-(x - mid) * (x - mid)); };
  auto g = [mid](double x) { return (x - mid) * std::exp(-0.5 * (x - mid) * (x - mid)); };

  CarrierSystem sys;
  sys.grid = grid;
  sys.damping = 2 * ah;
  sys.beta = p.beta;
  sys.gamma = p.gamma;
  std::vector<double> u0(N), ut0(N);
  for (std::size_t j = 0; j < N; ++j) {
    u0[j] = f(grid->x(j));
    ut0[j] = p.epsilon * g(grid->x(j));
  }
  const std::vector<double> times{0.25 * T, 0.5 * T, 0.75 * T, T};
  const auto states = evolve_carrier(u0, ut0, sys, times, 0.01);

  std::vector<std::size_t> cols;
  const std::size_t c = N / 2;
  const std::size_t stride = std::max<std::size_t>(1, static_cast<std::size_t>(0.25 / grid->spacing()));
  for (int o = -8; o <= 8; ++o) cols.push_back(c + o * stride);

  KernelReport rep;
  const double gMax = std::exp(-0.5);
  auto add = [&](const std::string& name, double radicand) {
    if (!(radicand > 0)) return;
    rep.candidates.push_back({name, std::sqrt(radicand), 0.0});
  };
  add("sqrt(gamma - alphaHat^2)", p.gamma - ah * ah);
  add("sqrt(gamma^2 - alphaHat^2)", p.gamma * p.gamma - ah * ah);
  add("sqrt(gamma)", p.gamma);
  for (auto& cand : rep.candidates) {
    KernelParams kp;
    kp.alphaHat = ah;
    kp.kernelFreq = cand.freq;
    kp.gamma = p.gamma;
    kp.beta = p.beta;
    kp.epsilon = p.epsilon;
    kp.tol = 1e-10;
    const Profile F{f, 1.0}, G{g, gMax};
    for (std::size_t n = 0; n < times.size(); ++n)
      for (std::size_t col : cols) {
        const double x = grid->x(col);
        double v;
        try {
          v = op_A(F, times[n], x, kp) + op_B(G, times[n], x, kp);
        } catch (const BoundViolation&) {
          // A wrong kernel can break the a priori bound; that is itself a mismatch.
          v = INFINITY;
        }
        cand.mismatch = std::max(cand.mismatch, std::fabs(v - states[n].u[col]));
      }
  }
  for (std::size_t i = 0; i < rep.candidates.size(); ++i) {
    if (rep.candidates[i].mismatch < rep.candidates[rep.selected].mismatch) rep.selected = i;
    if (rep.candidates[i].name == "sqrt(gamma^2 - alphaHat^2)") rep.alternativeMismatch = rep.candidates[i].mismatch;
  }
  return rep;
}

}  // namespace envjust

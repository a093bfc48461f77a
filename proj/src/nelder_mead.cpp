#include "qgp/nelder_mead.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "qgp/error.hpp"

namespace qgp::opt {

namespace {

struct BudgetExhausted {};

using Point = std::vector<double>;

Point combine(double a, const Point& x, double b, const Point& y) {
  Point out(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = a * x[i] + b * y[i];
  return out;
}

}  // namespace

NelderMeadResult nelder_mead(const Objective& f, Point x0, const NelderMeadOptions& opts) {
  const std::size_t n = x0.size();
  if (n == 0) throw Error(ErrorCode::InvalidArgument, "nelder_mead: empty starting point");
  if (opts.max_evals < 1) throw Error(ErrorCode::InvalidArgument, "nelder_mead: max_evals must be >= 1");

  const double dn = static_cast<double>(n);
  const double rho = 1.0;
  const double chi = opts.adaptive ? 1.0 + 2.0 / dn : 2.0;
  const double psi = opts.adaptive ? 0.75 - 1.0 / (2.0 * dn) : 0.5;
  const double sigma = opts.adaptive ? 1.0 - 1.0 / dn : 0.5;

  NelderMeadResult res;
  std::vector<Point> sim;
  std::vector<double> fsim;

  auto eval = [&](const Point& x) {
    if (res.evaluations >= opts.max_evals) throw BudgetExhausted{};
    ++res.evaluations;
    const double v = f(x);
    return std::isnan(v) ? std::numeric_limits<double>::infinity() : v;
  };
  auto order = [&] {
    std::vector<std::size_t> idx(sim.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return fsim[a] < fsim[b]; });
    std::vector<Point> s2;
    std::vector<double> f2;
    for (std::size_t i : idx) {
      s2.push_back(std::move(sim[i]));
      f2.push_back(fsim[i]);
    }
    sim = std::move(s2);
    fsim = std::move(f2);
  };

  try {
    sim.push_back(x0);
    fsim.push_back(eval(x0));
    for (std::size_t i = 0; i < n; ++i) {
      Point x = x0;
      x[i] += opts.initial_step;
      fsim.push_back(eval(x));
      sim.push_back(std::move(x));
    }
    order();

    for (;;) {
      double xspread = 0.0;
      double fspread = 0.0;
      for (std::size_t j = 1; j <= n; ++j) {
        fspread = std::max(fspread, std::abs(fsim[j] - fsim[0]));
        for (std::size_t i = 0; i < n; ++i) xspread = std::max(xspread, std::abs(sim[j][i] - sim[0][i]));
      }
      if (xspread <= opts.xatol && fspread <= opts.fatol) {
        res.converged = true;
        break;
      }
      ++res.iterations;

      Point xbar(n, 0.0);
      for (std::size_t j = 0; j < n; ++j)
        for (std::size_t i = 0; i < n; ++i) xbar[i] += sim[j][i] / dn;

      const Point xr = combine(1.0 + rho, xbar, -rho, sim[n]);
      const double fxr = eval(xr);
      bool shrink = false;
      if (fxr < fsim[0]) {
        Point xe = combine(1.0 + rho * chi, xbar, -rho * chi, sim[n]);
        const double fxe = eval(xe);
        if (fxe < fxr) {
          sim[n] = std::move(xe);
          fsim[n] = fxe;
        } else {
          sim[n] = xr;
          fsim[n] = fxr;
        }
      } else if (fxr < fsim[n - 1]) {
        sim[n] = xr;
        fsim[n] = fxr;
      } else if (fxr < fsim[n]) {
        Point xc = combine(1.0 + psi * rho, xbar, -psi * rho, sim[n]);
        const double fxc = eval(xc);
        if (fxc <= fxr) {
          sim[n] = std::move(xc);
          fsim[n] = fxc;
        } else {
          shrink = true;
        }
      } else {
        Point xcc = combine(1.0 - psi, xbar, psi, sim[n]);
        const double fxcc = eval(xcc);
        if (fxcc < fsim[n]) {
          sim[n] = std::move(xcc);
          fsim[n] = fxcc;
        } else {
          shrink = true;
        }
      }
      if (shrink) {
        for (std::size_t j = 1; j <= n; ++j) {
          Point xs = combine(1.0 - sigma, sim[0], sigma, sim[j]);
          fsim[j] = eval(xs);
          sim[j] = std::move(xs);
        }
      }
      order();
    }
  } catch (const BudgetExhausted&) {
    if (!fsim.empty()) order();
  }

  if (sim.empty()) {
    res.x = x0;
    res.f = std::numeric_limits<double>::infinity();
  } else {
    res.x = sim[0];
    res.f = fsim[0];
  }
  return res;
}

}  // namespace qgp::opt

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "qgp/error.hpp"
#include "qgp/gp_kernels.hpp"
#include "support.hpp"

using namespace qgp;
using namespace testing;
using gp::Channel;

namespace {

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode::Io;
}

gp::LineHyperParams random_theta(std::mt19937_64& g) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  gp::LineHyperParams th;
  th.current_kernel = {std::exp(u(g)), std::exp(2.0 * u(g))};
  th.voltage_kernel = {std::exp(u(g)), std::exp(2.0 * u(g))};
  th.R = std::exp(u(g));
  th.L = std::exp(u(g));
  th.noise_ii = th.noise_vj = th.noise_vi = 1e-3;
  return th;
}

RealVector sorted_times(int n, std::mt19937_64& g, double span) {
  std::uniform_real_distribution<double> u(0.0, span);
  RealVector t(n);
  for (int i = 0; i < n; ++i) t(i) = u(g);
  std::sort(t.data(), t.data() + n);
  return t;
}

}  // namespace

TEST_CASE("rbf values") {
  const gp::RBFParams p{2.5, 3.0};
  CHECK(gp::rbf(0.4, 0.4, p) == 2.5);
  CHECK(gp::rbf(0.0, std::sqrt(2.0), {1.0, 1.0}) == doctest::Approx(std::exp(-1.0)).epsilon(1e-14));
  CHECK(gp::rbf(0.1, 0.9, p) == gp::rbf(0.9, 0.1, p));
  double prev = gp::rbf(0.0, 0.0, p);
  for (double d = 0.5; d < 20.0; d += 0.5) {
    const double k = gp::rbf(0.0, d, p);
    CHECK(k < prev);
    prev = k;
  }
  CHECK(prev < 1e-100);
  CHECK(code_of([] { gp::RBFParams{-1.0, 1.0}.validate(); }) == ErrorCode::InvalidArgument);
}

TEST_CASE("rbf derivatives") {
  const auto z = gp::rbf_derivatives(1.0, 1.0, {2.0, 3.0});
  CHECK(z.d_t == 0.0);
  CHECK(z.d_tp == 0.0);
  CHECK(z.d_t_tp == doctest::Approx(6.0));
  const auto d = gp::rbf_derivatives(1.0, 0.0, {1.0, 1.0});
  CHECK(d.d_t == doctest::Approx(-std::exp(-0.5)));
  CHECK(d.d_tp == doctest::Approx(std::exp(-0.5)));
  CHECK(std::abs(d.d_t_tp) < 1e-15);

  std::mt19937_64 g(3);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  for (int trial = 0; trial < 100; ++trial) {
    const gp::RBFParams p{std::exp(u(g)), std::exp(u(g))};
    const double ell = 1.0 / std::sqrt(p.weight);
    const double t = u(g) * ell, tp = u(g) * ell;
    const double h = 1e-5 * ell;
    auto k = [&](double a, double b) { return gp::rbf(a, b, p); };
    const double fd_t = (k(t + h, tp) - k(t - h, tp)) / (2 * h);
    const double fd_tp = (k(t, tp + h) - k(t, tp - h)) / (2 * h);
    const double fd_ttp = (k(t + h, tp + h) - k(t + h, tp - h) - k(t - h, tp + h) + k(t - h, tp - h)) / (4 * h * h);
    const auto r = gp::rbf_derivatives(t, tp, p);
    // relative to the natural scale of each derivative
    CHECK(std::abs(r.d_t - fd_t) <= 1e-6 * p.variance / ell);
    CHECK(std::abs(r.d_tp - fd_tp) <= 1e-6 * p.variance / ell);
    CHECK(std::abs(r.d_t_tp - fd_ttp) <= 1e-4 * p.variance / (ell * ell));
  }
}

TEST_CASE("cross kernel closed forms") {
  std::mt19937_64 g(4);
  for (int trial = 0; trial < 50; ++trial) {
    const auto th = random_theta(g);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    const double t = u(g), tp = u(g);
    const double kI = gp::rbf(t, tp, th.current_kernel), kV = gp::rbf(t, tp, th.voltage_kernel);
    const auto dI = gp::rbf_derivatives(t, tp, th.current_kernel);
    CHECK(gp::cross_kernel(Channel::CurrentI, Channel::CurrentI, t, tp, th) == doctest::Approx(kI));
    CHECK(gp::cross_kernel(Channel::VoltageJ, Channel::VoltageJ, t, tp, th) == doctest::Approx(kV));
    CHECK(gp::cross_kernel(Channel::CurrentI, Channel::VoltageJ, t, tp, th) == 0.0);
    CHECK(gp::cross_kernel(Channel::VoltageI, Channel::CurrentI, t, tp, th) == doctest::Approx(th.R * kI + th.L * dI.d_t));
    CHECK(gp::cross_kernel(Channel::CurrentI, Channel::VoltageI, t, tp, th) == doctest::Approx(th.R * kI + th.L * dI.d_tp));
    CHECK(gp::cross_kernel(Channel::VoltageI, Channel::VoltageJ, t, tp, th) == doctest::Approx(kV));
    const double vv = th.R * th.R * kI + th.R * th.L * (dI.d_t + dI.d_tp) + th.L * th.L * dI.d_t_tp + kV;
    CHECK(gp::cross_kernel(Channel::VoltageI, Channel::VoltageI, t, tp, th) == doctest::Approx(vv));
    for (auto a : gp::kChannels)
      for (auto b : gp::kChannels)
        CHECK(gp::cross_kernel(a, b, t, tp, th) == gp::cross_kernel(b, a, tp, t, th));
  }

  gp::LineHyperParams th;
  th.R = th.L = 0.0;
  CHECK(gp::cross_kernel(Channel::VoltageI, Channel::VoltageI, 0.2, 0.5, th) ==
        doctest::Approx(gp::rbf(0.2, 0.5, th.voltage_kernel)));
  CHECK(gp::cross_kernel(Channel::VoltageI, Channel::CurrentI, 0.2, 0.5, th) == 0.0);
  th.R = 2.0;
  CHECK(gp::cross_kernel(Channel::VoltageI, Channel::CurrentI, 0.2, 0.5, th) ==
        doctest::Approx(2.0 * gp::rbf(0.2, 0.5, th.current_kernel)));

  CHECK(gp::parse_channel("v_j") == Channel::VoltageJ);
  CHECK(std::string(gp::to_string(Channel::VoltageI)) == "v_i");
  CHECK(code_of([] { gp::parse_channel("v_k"); }) == ErrorCode::UnknownChannel);
}

TEST_CASE("Monte-Carlo covariance of line-equation samples") {
  gp::LineHyperParams th;
  th.current_kernel = {1.0, 1.0};
  th.voltage_kernel = {0.7, 2.0};
  th.R = 0.5;
  th.L = 0.3;
  const int m = 6;
  const double h = 1e-2;
  RealVector grid(m);
  for (int i = 0; i < m; ++i) grid(i) = 0.5 * i;

  // i_i on (t - h, t, t + h) for every grid point, v_j on the grid
  RealVector fine(3 * m);
  for (int i = 0; i < m; ++i) {
    fine(3 * i) = grid(i) - h;
    fine(3 * i + 1) = grid(i);
    fine(3 * i + 2) = grid(i) + h;
  }
  auto root = [](const RealMatrix& k) {
    Eigen::SelfAdjointEigenSolver<RealMatrix> es(k);
    const RealVector ev = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
    return RealMatrix(es.eigenvectors() * ev.asDiagonal());
  };
  RealMatrix kI(3 * m, 3 * m), kV(m, m);
  for (int a = 0; a < 3 * m; ++a)
    for (int b = 0; b < 3 * m; ++b) kI(a, b) = gp::rbf(fine(a), fine(b), th.current_kernel);
  for (int a = 0; a < m; ++a)
    for (int b = 0; b < m; ++b) kV(a, b) = gp::rbf(grid(a), grid(b), th.voltage_kernel);
  const RealMatrix sI = root(kI), sV = root(kV);

  const int paths = 20000;
  std::mt19937_64 g(77);
  std::normal_distribution<double> z;
  RealMatrix ii(paths, m), vi(paths, m);
  for (int p = 0; p < paths; ++p) {
    RealVector zi(3 * m), zv(m);
    for (auto& x : zi) x = z(g);
    for (auto& x : zv) x = z(g);
    const RealVector i = sI * zi, v = sV * zv;
    for (int k = 0; k < m; ++k) {
      ii(p, k) = i(3 * k + 1);
      vi(p, k) = th.R * i(3 * k + 1) + th.L * (i(3 * k + 2) - i(3 * k)) / (2 * h) + v(k);
    }
  }

  int outside = 0;
  for (int a = 0; a < m; ++a)
    for (int b = 0; b < m; ++b) {
      for (auto [x, y, cx, cy] : {std::tuple{&vi, &ii, Channel::VoltageI, Channel::CurrentI},
                                  std::tuple{&vi, &vi, Channel::VoltageI, Channel::VoltageI}}) {
        const RealVector prod = x->col(a).cwiseProduct(y->col(b));
        const double mean = prod.mean();
        const double se = std::sqrt((prod.array() - mean).square().sum() / (paths - 1) / paths);
        const double expect = gp::cross_kernel(cx, cy, grid(a), grid(b), th);
        if (std::abs(mean - expect) > 3.0 * se) ++outside;
      }
    }
  // 72 entries at three standard errors: a couple of excursions are expected at most
  CHECK(outside <= 2);
}

TEST_CASE("joint kernel assembly") {
  std::mt19937_64 g(8);
  const auto th = random_theta(g);
  gp::ChannelTimes times{sorted_times(11, g, 1.0), sorted_times(11, g, 1.0), sorted_times(10, g, 1.0)};
  const RealMatrix k = gp::assemble_joint(times, th);
  REQUIRE(k.rows() == 32);
  REQUIRE(k.cols() == 32);
  CHECK(k == k.transpose());
  CHECK(k == gp::serial::assemble_joint(times, th));

  const RealVector nd = gp::noise_diagonal(times, th);
  CHECK(nd.size() == 32);
  CHECK(nd.head(11).isConstant(th.noise_ii));

  // rows of the joint kernel are the cross vectors at training times
  const auto check_row = [&](Channel c, Eigen::Index offset, const RealVector& t) {
    for (Eigen::Index i = 0; i < t.size(); ++i)
      CHECK((gp::cross_vectors(c, t(i), times, th) - k.row(offset + i).transpose()).cwiseAbs().maxCoeff() == 0.0);
  };
  check_row(Channel::CurrentI, 0, times.ii);
  check_row(Channel::VoltageJ, 11, times.vj);
  check_row(Channel::VoltageI, 22, times.vi);
  CHECK(gp::cross_vectors(Channel::VoltageJ, 0.3, times, th).head(11).isZero(0.0));

  gp::LineHyperParams zero = th;
  zero.R = zero.L = 0.0;
  RealVector one(1);
  one << 0.25;
  const RealMatrix small = gp::assemble_joint({one, one, one}, zero);
  CHECK(small(0, 1) == 0.0);
  CHECK(small(1, 0) == 0.0);
  CHECK(small(0, 2) == 0.0);
  CHECK(small(0, 0) == doctest::Approx(zero.current_kernel.variance));

  CHECK(code_of([&] { gp::assemble_joint({RealVector(), times.vj, times.vi}, th); }) == ErrorCode::EmptyChannel);
}

TEST_CASE("joint kernel is positive semidefinite") {
  std::mt19937_64 g(9);
  std::uniform_int_distribution<int> len(1, 12);
  for (int trial = 0; trial < 200; ++trial) {
    const auto th = random_theta(g);
    gp::ChannelTimes times{sorted_times(len(g), g, 2.0), sorted_times(len(g), g, 2.0), sorted_times(len(g), g, 2.0)};
    const RealMatrix k = gp::assemble_joint(times, th);
    Eigen::SelfAdjointEigenSolver<RealMatrix> es(k);
    CHECK(es.eigenvalues().minCoeff() >= -1e-8 * k.diagonal().maxCoeff());
    const RealMatrix kn = k + RealMatrix(gp::noise_diagonal(times, th).asDiagonal());
    Eigen::SelfAdjointEigenSolver<RealMatrix> esn(kn);
    CHECK(esn.eigenvalues().minCoeff() > 0.0);
  }
}

TEST_CASE("parallel assembly matches the serial reference on a large grid") {
  std::mt19937_64 g(10);
  const auto th = random_theta(g);
  gp::ChannelTimes times{sorted_times(150, g, 1.0), sorted_times(130, g, 1.0), sorted_times(140, g, 1.0)};
  CHECK(gp::assemble_joint(times, th) == gp::serial::assemble_joint(times, th));
}

TEST_CASE("hyperparameter array round trip") {
  gp::LineHyperParams th;
  th.current_kernel = {1, 2};
  th.voltage_kernel = {3, 4};
  th.R = 5;
  th.L = 6;
  th.noise_ii = 7;
  th.noise_vj = 8;
  th.noise_vi = 9;
  const auto a = th.to_array();
  for (int i = 0; i < 9; ++i) CHECK(a[i] == i + 1);
  CHECK(gp::LineHyperParams::from_array(a).to_array() == a);
  th.noise_vi = 0.0;
  CHECK(code_of([&] { th.validate(); }) == ErrorCode::InvalidArgument);
}

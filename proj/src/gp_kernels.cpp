#include "qgp/gp_kernels.hpp"

#include <cmath>
#include <vector>

#include "qgp/error.hpp"

namespace qgp::gp {

void RBFParams::validate() const {
  if (!(variance > 0.0) || !(weight > 0.0) || !std::isfinite(variance) || !std::isfinite(weight))
    throw Error(ErrorCode::InvalidArgument, "RBF variance and weight must be positive and finite");
}

void LineHyperParams::validate() const {
  for (double v : to_array())
    if (!(v > 0.0) || !std::isfinite(v))
      throw Error(ErrorCode::InvalidArgument, "line hyperparameters must be positive and finite");
}

std::array<double, LineHyperParams::kSize> LineHyperParams::to_array() const {
  return {current_kernel.variance, current_kernel.weight, voltage_kernel.variance, voltage_kernel.weight,
          R, L, noise_ii, noise_vj, noise_vi};
}

LineHyperParams LineHyperParams::from_array(const std::array<double, kSize>& a) {
  LineHyperParams p;
  p.current_kernel = {a[0], a[1]};
  p.voltage_kernel = {a[2], a[3]};
  p.R = a[4];
  p.L = a[5];
  p.noise_ii = a[6];
  p.noise_vj = a[7];
  p.noise_vi = a[8];
  return p;
}

const char* to_string(Channel c) {
  switch (c) {
    case Channel::CurrentI: return "i_i";
    case Channel::VoltageJ: return "v_j";
    case Channel::VoltageI: return "v_i";
  }
  throw Error(ErrorCode::UnknownChannel, "unknown channel");
}

Channel parse_channel(const std::string& s) {
  if (s == "i_i") return Channel::CurrentI;
  if (s == "v_j") return Channel::VoltageJ;
  if (s == "v_i") return Channel::VoltageI;
  throw Error(ErrorCode::UnknownChannel, "unknown channel '" + s + "'");
}

double rbf(double t, double tp, const RBFParams& p) {
  const double tau = t - tp;
  return p.variance * std::exp(-0.5 * p.weight * tau * tau);
}

RBFDerivatives rbf_derivatives(double t, double tp, const RBFParams& p) {
  const double tau = t - tp;
  const double k = p.variance * std::exp(-0.5 * p.weight * tau * tau);
  return {-p.weight * tau * k, p.weight * tau * k, p.weight * (1.0 - p.weight * tau * tau) * k};
}

double cross_kernel(Channel a, Channel b, double t, double tp, const LineHyperParams& th) {
  const int ia = static_cast<int>(a);
  const int ib = static_cast<int>(b);
  if (ia < 0 || ia > 2 || ib < 0 || ib > 2) throw Error(ErrorCode::UnknownChannel, "unknown channel");

  const double r = th.R;
  const double l = th.L;
  switch (ia * 3 + ib) {
    case 0:  // i_i, i_i
      return rbf(t, tp, th.current_kernel);
    case 1:  // i_i, v_j
    case 3:  // v_j, i_i
      return 0.0;
    case 2: {  // i_i, v_i
      const double k = rbf(t, tp, th.current_kernel);
      return r * k + l * rbf_derivatives(t, tp, th.current_kernel).d_tp;
    }
    case 6: {  // v_i, i_i
      const double k = rbf(t, tp, th.current_kernel);
      return r * k + l * rbf_derivatives(t, tp, th.current_kernel).d_t;
    }
    case 4:  // v_j, v_j
    case 5:  // v_j, v_i
    case 7:  // v_i, v_j
      return rbf(t, tp, th.voltage_kernel);
    default: {  // v_i, v_i
      const double k = rbf(t, tp, th.current_kernel);
      const RBFDerivatives d = rbf_derivatives(t, tp, th.current_kernel);
      return r * r * k + r * l * (d.d_t + d.d_tp) + l * l * d.d_t_tp + rbf(t, tp, th.voltage_kernel);
    }
  }
}

const RealVector& ChannelTimes::of(Channel c) const {
  switch (c) {
    case Channel::CurrentI: return ii;
    case Channel::VoltageJ: return vj;
    case Channel::VoltageI: return vi;
  }
  throw Error(ErrorCode::UnknownChannel, "unknown channel");
}

namespace {

struct Layout {
  std::vector<Channel> channel;
  std::vector<double> time;
};

Layout flatten(const ChannelTimes& times) {
  Layout out;
  for (Channel c : kChannels) {
    const RealVector& t = times.of(c);
    if (t.size() == 0) throw Error(ErrorCode::EmptyChannel, std::string("channel ") + to_string(c) + " is empty");
    for (Eigen::Index i = 0; i < t.size(); ++i) {
      out.channel.push_back(c);
      out.time.push_back(t(i));
    }
  }
  return out;
}

}  // namespace

RealMatrix assemble_joint(const ChannelTimes& times, const LineHyperParams& theta) {
  const Layout lay = flatten(times);
  const auto n = static_cast<Eigen::Index>(lay.time.size());
  RealMatrix k(n, n);
#pragma omp parallel for schedule(dynamic, 4) if (n > 64)
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j <= i; ++j) {
      const double v = cross_kernel(lay.channel[i], lay.channel[j], lay.time[i], lay.time[j], theta);
      k(i, j) = v;
      k(j, i) = v;
    }
  }
  return k;
}

namespace serial {

RealMatrix assemble_joint(const ChannelTimes& times, const LineHyperParams& theta) {
  const Layout lay = flatten(times);
  const auto n = static_cast<Eigen::Index>(lay.time.size());
  RealMatrix k(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j <= i; ++j)
      k(i, j) = k(j, i) = cross_kernel(lay.channel[i], lay.channel[j], lay.time[i], lay.time[j], theta);
  return k;
}

}  // namespace serial

RealVector noise_diagonal(const ChannelTimes& times, const LineHyperParams& theta) {
  RealVector d(times.total());
  d << RealVector::Constant(times.ii.size(), theta.noise_ii), RealVector::Constant(times.vj.size(), theta.noise_vj),
      RealVector::Constant(times.vi.size(), theta.noise_vi);
  return d;
}

RealVector cross_vectors(Channel s, double t_star, const ChannelTimes& times, const LineHyperParams& theta) {
  const Layout lay = flatten(times);
  RealVector q(static_cast<Eigen::Index>(lay.time.size()));
  for (Eigen::Index i = 0; i < q.size(); ++i) q(i) = cross_kernel(s, lay.channel[i], t_star, lay.time[i], theta);
  return q;
}

}  // namespace qgp::gp

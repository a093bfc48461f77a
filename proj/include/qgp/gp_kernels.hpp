#pragma once

// RBF covariance, its time derivatives, and the joint kernel over the three
// line signals. The channel order is always [i_i, v_j, v_i]; i_i and v_j are
// independent zero-mean GP priors and v_i = R i_i + L di_i/dt + v_j.

#include <array>
#include <string>

#include "qgp/numerics.hpp"

namespace qgp::gp {

struct RBFParams {
  double variance = 1.0;  // signal^2
  double weight = 1.0;    // 1/s^2
  void validate() const;
};

struct LineHyperParams {
  RBFParams current_kernel;
  RBFParams voltage_kernel;
  double R = 1.0;
  double L = 1.0;
  double noise_ii = 1.0;
  double noise_vj = 1.0;
  double noise_vi = 1.0;

  static constexpr int kSize = 9;
  void validate() const;
  // (var_I, w_I, var_V, w_V, R, L, noise_ii, noise_vj, noise_vi)
  std::array<double, kSize> to_array() const;
  static LineHyperParams from_array(const std::array<double, kSize>& a);
};

enum class Channel { CurrentI = 0, VoltageJ = 1, VoltageI = 2 };
inline constexpr std::array<Channel, 3> kChannels{Channel::CurrentI, Channel::VoltageJ, Channel::VoltageI};

const char* to_string(Channel c);
Channel parse_channel(const std::string& s);

double rbf(double t, double tp, const RBFParams& p);

struct RBFDerivatives {
  double d_t = 0.0;     // dk/dt
  double d_tp = 0.0;    // dk/dt'
  double d_t_tp = 0.0;  // d2k/dt dt'
};
RBFDerivatives rbf_derivatives(double t, double tp, const RBFParams& p);

double cross_kernel(Channel a, Channel b, double t, double tp, const LineHyperParams& theta);

struct ChannelTimes {
  RealVector ii;
  RealVector vj;
  RealVector vi;
  const RealVector& of(Channel c) const;
  Eigen::Index total() const { return ii.size() + vj.size() + vi.size(); }
};

RealMatrix assemble_joint(const ChannelTimes& times, const LineHyperParams& theta);

/// diag(noise_ii I, noise_vj I, noise_vi I) as a vector.
RealVector noise_diagonal(const ChannelTimes& times, const LineHyperParams& theta);

/// Row of cross covariances between channel s at t_star and every training point.
RealVector cross_vectors(Channel s, double t_star, const ChannelTimes& times, const LineHyperParams& theta);

namespace serial {
RealMatrix assemble_joint(const ChannelTimes& times, const LineHyperParams& theta);
}

}  // namespace qgp::gp

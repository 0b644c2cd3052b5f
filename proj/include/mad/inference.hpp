#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mad/design.hpp"

namespace mad {

// Contrast tau(w, w') = Y(w) - Y(w').
struct ArmPair {
  std::size_t treatment = 1;
  std::size_t control = 0;

  bool operator==(const ArmPair&) const = default;
};

struct IpwTerm {
  double tau = 0.0;     // per-unit IPW effect estimate
  double sigma2 = 0.0;  // unbiased estimate of its variance bound
};

// Inverse-propensity-weighted contribution of one unit. Arms outside the pair
// contribute (0, 0). Throws InvariantError if the realized arm has recorded
// probability zero.
IpwTerm ipw_step(std::size_t arm, double outcome, const AssignmentDistribution& probs, ArmPair pair);

// Half-width of the asymptotic confidence sequence:
//   sqrt( 2 (S eta^2 + 1) / (t^2 eta^2) * log( sqrt(S eta^2 + 1) / alpha ) ).
double asymptotic_radius(double s_hat, std::uint64_t t, double eta, double alpha);

// eta that optimizes the radius at time t_star:
//   sqrt( (-2 log alpha + log(-2 log alpha + 1)) / t_star ).
double eta_for_horizon(double alpha, std::uint64_t t_star);

struct ConfidenceSequenceTrack {
  ArmPair pair;
  double alpha = 0.05;
  double eta = 0.0;
  std::size_t batch_size = 1;
  // Index i holds time i+1: units in per-unit mode, complete batches otherwise.
  std::vector<double> center;
  std::vector<double> radius;
  std::vector<double> s_hat;

  std::size_t size() const noexcept { return center.size(); }
  bool operator==(const ConfidenceSequenceTrack&) const = default;
};

// Batched mode averages the IPW terms of each complete batch and uses the
// batch count as the time index; a trailing incomplete batch is ignored.
ConfidenceSequenceTrack cs_track(const Trajectory& trajectory, ArmPair pair, double eta, double alpha,
                                 AssignmentMode mode = AssignmentMode::per_unit());

// One track per treatment arm against `control`.
std::map<std::size_t, ConfidenceSequenceTrack> pairwise_tracks(const Trajectory& trajectory,
                                                               std::size_t control, double eta,
                                                               double alpha);

// Boundary u(v) on the running sum as a function of intrinsic time v.
using Boundary = std::function<double(double)>;

// Two-sided sub-Gaussian normal-mixture boundary
//   u(v) = sqrt( (v + rho) log( (v + rho) / (rho alpha^2) ) ).
double normal_mixture_boundary(double v, double rho, double alpha);

// Two-sided polynomial-stitched boundary for a sub-exponential process with
// scale `scale` (stitching ratio 2, exponent 1.4, alpha/2 per side):
//   sqrt(k1^2 v l(v) + k2^2 c^2 l(v)^2) + k2 c l(v),
//   l(v) = 1.4 log log(2v) + log(zeta(1.4) / ((alpha/2) log(2)^1.4)).
// v below 1 is evaluated at 1.
double stitched_boundary(double v, double scale, double alpha);

// rho minimizing u(v_star) for the normal-mixture boundary.
double optimal_rho(double v_star, double alpha);

struct NonAsymptoticTrack {
  ArmPair pair;
  double alpha = 0.05;
  double rho = 1.0;
  std::vector<double> center;
  std::vector<double> intrinsic_time;  // V_t = sum_{i<=t} (tau_i - running mean_i)^2
  std::vector<double> radius;          // u(V_t) / t
  // Smallest recorded assignment probability over the pair's arms; compare
  // with the p_min the boundary's validity argument assumes.
  double min_assignment_prob = 1.0;

  std::size_t size() const noexcept { return center.size(); }
  bool clipping_satisfied(double p_min) const { return min_assignment_prob >= p_min; }
};

NonAsymptoticTrack nonasymptotic_track(const Trajectory& trajectory, ArmPair pair, double alpha,
                                       double rho);
NonAsymptoticTrack nonasymptotic_track(const Trajectory& trajectory, ArmPair pair, double alpha,
                                       double rho, const Boundary& boundary);

struct StoppingReport {
  std::optional<std::size_t> stop_time;  // 1-based; empty means never within horizon
  std::string rule = "first t with 0 outside [center - radius, center + radius]";

  bool stopped() const { return stop_time.has_value(); }
};

StoppingReport stopping_time(std::span<const double> center, std::span<const double> radius);
StoppingReport stopping_time(const ConfidenceSequenceTrack& track);
StoppingReport stopping_time(const NonAsymptoticTrack& track);

// CSV with columns t, center, radius, S_hat, stopped_flag (1 from the stop
// time onward).
std::string track_csv(const ConfidenceSequenceTrack& track);

}  // namespace mad

#include "mad/inference.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "mad/error.hpp"

namespace mad {

namespace {

void check_pair(ArmPair pair, std::size_t k) {
  if (pair.treatment >= k) throw ParameterError("pair.treatment", "arm index out of range");
  if (pair.control >= k) throw ParameterError("pair.control", "arm index out of range");
  if (pair.treatment == pair.control) throw ParameterError("pair", "contrast arms must differ");
}

void check_alpha(double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw ParameterError("alpha", "must lie in (0, 1)");
}

}  // namespace

IpwTerm ipw_step(std::size_t arm, double outcome, const AssignmentDistribution& probs, ArmPair pair) {
  check_pair(pair, probs.size());
  if (arm >= probs.size()) throw ParameterError("arm", "arm index out of range");
  if (arm != pair.treatment && arm != pair.control) return {};
  const double p = probs[arm];
  if (!(p > 0.0)) {
    throw InvariantError("arm " + std::to_string(arm) + " was realized with recorded probability 0");
  }
  const double weighted = outcome / p;
  return {arm == pair.treatment ? weighted : -weighted, weighted * weighted};
}

double asymptotic_radius(double s_hat, std::uint64_t t, double eta, double alpha) {
  if (!(s_hat >= 0.0)) throw ParameterError("s_hat", "must be non-negative");
  if (t == 0) throw ParameterError("t", "must be positive");
  if (!(eta > 0.0)) throw ParameterError("eta", "must be positive");
  check_alpha(alpha);
  const double eta2 = eta * eta;
  const double scaled = s_hat * eta2 + 1.0;
  const double td = static_cast<double>(t);
  return std::sqrt(2.0 * scaled / (td * td * eta2) * std::log(std::sqrt(scaled) / alpha));
}

double eta_for_horizon(double alpha, std::uint64_t t_star) {
  check_alpha(alpha);
  if (t_star == 0) throw ParameterError("t_star", "must be positive");
  const double l = -2.0 * std::log(alpha);
  return std::sqrt((l + std::log(l + 1.0)) / static_cast<double>(t_star));
}

ConfidenceSequenceTrack cs_track(const Trajectory& trajectory, ArmPair pair, double eta, double alpha,
                                 AssignmentMode mode) {
  check_pair(pair, trajectory.n_arms);
  check_alpha(alpha);
  if (!(eta > 0.0)) throw ParameterError("eta", "must be positive");
  if (mode.batch_size != trajectory.mode.batch_size) {
    throw ParameterError("mode", "track mode must match the mode the trajectory was recorded under");
  }
  const std::size_t b = mode.batch_size;
  const std::size_t batches = trajectory.size() / b;
  const double bd = static_cast<double>(b);

  ConfidenceSequenceTrack track;
  track.pair = pair;
  track.alpha = alpha;
  track.eta = eta;
  track.batch_size = b;
  track.center.reserve(batches);
  track.radius.reserve(batches);
  track.s_hat.reserve(batches);

  double tau_sum = 0.0;
  double s_hat = 0.0;
  for (std::size_t j = 0; j < batches; ++j) {
    double batch_tau = 0.0;
    double batch_sigma2 = 0.0;
    for (std::size_t i = j * b; i < (j + 1) * b; ++i) {
      const auto& step = trajectory.steps[i];
      const IpwTerm term = ipw_step(step.chosen_arm, step.observed_outcome, step.mixed, pair);
      batch_tau += term.tau;
      batch_sigma2 += term.sigma2;
    }
    tau_sum += batch_tau / bd;
    s_hat += batch_sigma2 / (bd * bd);
    const std::uint64_t index = j + 1;
    track.center.push_back(tau_sum / static_cast<double>(index));
    track.s_hat.push_back(s_hat);
    track.radius.push_back(asymptotic_radius(s_hat, index, eta, alpha));
  }
  return track;
}

std::map<std::size_t, ConfidenceSequenceTrack> pairwise_tracks(const Trajectory& trajectory,
                                                               std::size_t control, double eta,
                                                               double alpha) {
  if (trajectory.n_arms < 2) throw ParameterError("n_arms", "at least two arms are required");
  if (control >= trajectory.n_arms) throw ParameterError("control", "arm index out of range");
  std::map<std::size_t, ConfidenceSequenceTrack> tracks;
  for (std::size_t w = 0; w < trajectory.n_arms; ++w) {
    if (w == control) continue;
    tracks.emplace(w, cs_track(trajectory, {w, control}, eta, alpha, trajectory.mode));
  }
  return tracks;
}

double normal_mixture_boundary(double v, double rho, double alpha) {
  const double vr = v + rho;
  return std::sqrt(vr * std::log(vr / (rho * alpha * alpha)));
}

double stitched_boundary(double v, double scale, double alpha) {
  check_alpha(alpha);
  if (!(scale >= 0.0)) throw ParameterError("scale", "must be non-negative");
  constexpr double zeta_1_4 = 3.1055472779775809;
  const double eta = 2.0;
  const double s = 1.4;
  const double k1 = (std::pow(eta, 0.25) + std::pow(eta, -0.25)) / std::sqrt(2.0);
  const double k2 = (std::sqrt(eta) + 1.0) / 2.0;
  const double vv = std::max(v, 1.0);
  const double l = s * std::log(std::log(eta * vv)) + std::log(zeta_1_4 / (0.5 * alpha * std::pow(std::log(eta), s)));
  return std::sqrt(k1 * k1 * vv * l + k2 * k2 * scale * scale * l * l) + k2 * scale * l;
}

double optimal_rho(double v_star, double alpha) {
  if (!(v_star > 0.0)) throw ParameterError("v_star", "must be positive");
  check_alpha(alpha);
  // u(v_star) is unimodal in log rho; golden-section search.
  double lo = std::log(v_star) - 20.0;
  double hi = std::log(v_star) + 20.0;
  const double g = (std::sqrt(5.0) - 1.0) / 2.0;
  auto f = [&](double log_rho) { return normal_mixture_boundary(v_star, std::exp(log_rho), alpha); };
  double x1 = hi - g * (hi - lo);
  double x2 = lo + g * (hi - lo);
  double f1 = f(x1);
  double f2 = f(x2);
  for (int iter = 0; iter < 200 && hi - lo > 1e-10; ++iter) {
    if (f1 < f2) {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - g * (hi - lo);
      f1 = f(x1);
    } else {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + g * (hi - lo);
      f2 = f(x2);
    }
  }
  return std::exp(0.5 * (lo + hi));
}

NonAsymptoticTrack nonasymptotic_track(const Trajectory& trajectory, ArmPair pair, double alpha,
                                       double rho) {
  if (!(rho > 0.0)) throw ParameterError("rho", "must be positive");
  return nonasymptotic_track(trajectory, pair, alpha, rho,
                             [rho, alpha](double v) { return normal_mixture_boundary(v, rho, alpha); });
}

NonAsymptoticTrack nonasymptotic_track(const Trajectory& trajectory, ArmPair pair, double alpha,
                                       double rho, const Boundary& boundary) {
  check_pair(pair, trajectory.n_arms);
  check_alpha(alpha);
  if (!(rho > 0.0)) throw ParameterError("rho", "must be positive");
  NonAsymptoticTrack track;
  track.pair = pair;
  track.alpha = alpha;
  track.rho = rho;
  const std::size_t n = trajectory.size();
  track.center.reserve(n);
  track.intrinsic_time.reserve(n);
  track.radius.reserve(n);
  double tau_sum = 0.0;
  double v = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const auto& step = trajectory.steps[i];
    track.min_assignment_prob =
        std::min({track.min_assignment_prob, step.mixed[pair.treatment], step.mixed[pair.control]});
    const IpwTerm term = ipw_step(step.chosen_arm, step.observed_outcome, step.mixed, pair);
    tau_sum += term.tau;
    const double td = static_cast<double>(i + 1);
    const double center = tau_sum / td;
    const double dev = term.tau - center;
    v += dev * dev;
    track.center.push_back(center);
    track.intrinsic_time.push_back(v);
    track.radius.push_back(boundary(v) / td);
  }
  return track;
}

StoppingReport stopping_time(std::span<const double> center, std::span<const double> radius) {
  if (center.size() != radius.size()) throw ParameterError("radius", "length must match center");
  StoppingReport report;
  for (std::size_t i = 0; i < center.size(); ++i) {
    if (std::abs(center[i]) > radius[i]) {
      report.stop_time = i + 1;
      break;
    }
  }
  return report;
}

StoppingReport stopping_time(const ConfidenceSequenceTrack& track) {
  return stopping_time(track.center, track.radius);
}

StoppingReport stopping_time(const NonAsymptoticTrack& track) {
  return stopping_time(track.center, track.radius);
}

std::string track_csv(const ConfidenceSequenceTrack& track) {
  const StoppingReport stop = stopping_time(track);
  std::ostringstream out;
  out.precision(17);
  out << "t,center,radius,S_hat,stopped_flag\n";
  for (std::size_t i = 0; i < track.size(); ++i) {
    const bool stopped = stop.stop_time && i + 1 >= *stop.stop_time;
    out << (i + 1) << ',' << track.center[i] << ',' << track.radius[i] << ',' << track.s_hat[i] << ','
        << (stopped ? 1 : 0) << '\n';
  }
  return out.str();
}

}  // namespace mad

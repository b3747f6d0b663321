#pragma once

#include <optional>
#include <stdexcept>

namespace presim::relcalc {

// Julian year; all rate/time conversions in the project use these.
inline constexpr double kSecondsPerYear = 31'557'600.0;
inline constexpr double kHoursPerYear = 8'766.0;

// Drive description as found on a vendor spec sheet. Exactly one of
// five_year_fail_prob / mttf_hours needs to be present; the other is derived
// under the exponential-lifetime model.
struct MediaSpec {
  double capacity_bytes = 0.0;
  double uber_per_bit = 0.0;
  std::optional<double> five_year_fail_prob;
  std::optional<double> mttf_hours;
  double duty_cycle = 1.0;               // fraction of time spent transferring
  double sustained_transfer_bps = 64e6;  // bytes/second

  double annual_hazard() const;  // per-year catastrophic failure rate
  double derived_mttf_hours() const { return mttf_hours_from_hazard(annual_hazard()); }

  static double mttf_hours_from_hazard(double lambda_per_year);
};

// Probability that a full read of `capacity_bytes` hits at least one
// unrecoverable bit error: 1 - (1 - uber)^(bytes * 8).
double full_read_error_prob(double capacity_bytes, double uber_per_bit);

// Expected unrecoverable bit errors accumulated over `years` of service at
// the given duty cycle and sustained transfer rate.
double service_life_latent_errors(double uber_per_bit, double transfer_bps,
                                  double duty_cycle, double years);
double service_life_latent_errors(const MediaSpec& spec, double years);

// Inverts a "probability p of failing within `years`" spec-sheet figure to a
// constant annual hazard: lambda = -ln(1 - p) / years. Throws
// std::domain_error for p >= 1 or years <= 0.
double hazard_from_service_prob(double p, double years);

// Forward direction: probability of failure within `years` at hazard lambda.
double service_prob_from_hazard(double lambda_per_year, double years);

// Probability that all n independent replicas are gone by time t with no
// repair: (1 - e^(-lambda t))^n.
double replica_loss_prob(int n, double lambda_per_year, double years);

}  // namespace presim::relcalc

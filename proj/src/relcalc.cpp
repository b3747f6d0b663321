#include "presim/relcalc.hpp"

#include <cmath>
#include <limits>

namespace presim::relcalc {

double MediaSpec::annual_hazard() const {
  if (five_year_fail_prob) return hazard_from_service_prob(*five_year_fail_prob, 5.0);
  if (mttf_hours && *mttf_hours > 0.0) return kHoursPerYear / *mttf_hours;
  return 0.0;
}

double MediaSpec::mttf_hours_from_hazard(double lambda_per_year) {
  if (lambda_per_year <= 0.0) return std::numeric_limits<double>::infinity();
  return kHoursPerYear / lambda_per_year;
}

double full_read_error_prob(double capacity_bytes, double uber_per_bit) {
  if (uber_per_bit <= 0.0 || capacity_bytes <= 0.0) return 0.0;
  if (uber_per_bit >= 1.0) return 1.0;
  const double bits = capacity_bytes * 8.0;
  // 1 - (1-u)^bits via expm1/log1p to stay accurate for u ~ 1e-15.
  return -std::expm1(bits * std::log1p(-uber_per_bit));
}

double service_life_latent_errors(double uber_per_bit, double transfer_bps,
                                  double duty_cycle, double years) {
  const double bits_read =
      transfer_bps * 8.0 * duty_cycle * years * kSecondsPerYear;
  return uber_per_bit * bits_read;
}

double service_life_latent_errors(const MediaSpec& spec, double years) {
  return service_life_latent_errors(spec.uber_per_bit, spec.sustained_transfer_bps,
                                    spec.duty_cycle, years);
}

double hazard_from_service_prob(double p, double years) {
  if (p < 0.0 || p >= 1.0) throw std::domain_error("service failure probability must be in [0, 1)");
  if (years <= 0.0) throw std::domain_error("service life must be positive");
  return -std::log1p(-p) / years;
}

double service_prob_from_hazard(double lambda_per_year, double years) {
  return -std::expm1(-lambda_per_year * years);
}

double replica_loss_prob(int n, double lambda_per_year, double years) {
  if (n < 1) throw std::domain_error("replica count must be >= 1");
  if (lambda_per_year < 0.0 || years < 0.0)
    throw std::domain_error("hazard and horizon must be non-negative");
  const double single = -std::expm1(-lambda_per_year * years);
  return std::pow(single, n);
}

}  // namespace presim::relcalc

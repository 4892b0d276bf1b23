#pragma once

#include <optional>
#include <vector>

#include "votecast/error.hpp"
#include "votecast/regressors.hpp"  // Matrix

namespace votecast {

struct ArimaxOrder {
  int p = 0;
  int d = 5;
  int q = 1;
};

struct OptimSettings {
  double css_tolerance = 1e-10;
  int max_evals_per_dim = 500;
};

/// Fitted ARIMAX state: coefficients plus the series tail needed to forecast.
struct ArimaxFit {
  ArimaxOrder order;
  std::vector<double> phi;    // AR coefficients, length p
  std::vector<double> theta;  // MA coefficients, length q
  std::vector<double> beta;   // exogenous coefficients
  double intercept = 0.0;
  double sigma2 = 0.0;
  double css = 0.0;
  bool degenerate_variance = false;

  std::vector<double> diff_tails;      // last value of each difference level 0..d-1
  std::vector<double> last_w;          // last p values of the differenced series
  std::vector<double> last_residuals;  // last q residuals (oldest first)
  Matrix last_exog_levels;             // last d exogenous rows, for differencing futures
};

/// d-fold first differences; output length len(y) - d.
std::vector<double> difference(const std::vector<double>& y, int d);

/// Inverse of difference. `initials` holds the last known value of each
/// difference level k = 0..d-1 (level first); returns the continuation levels,
/// one per diff entry.
std::vector<double> integrate(const std::vector<double>& diffs,
                              const std::vector<double>& initials);
std::vector<double> integrate(const std::vector<double>& diffs,
                              const std::vector<double>& initials, int d);

/// Conditional-sum-of-squares estimation of
///   w_t = c + beta.x_t + sum phi_j w_{t-j} + e_t + sum theta_k e_{t-k}
/// on the d-times differenced series (exogenous rows differenced alongside),
/// pre-sample residuals fixed at zero. Derivative-free simplex descent from a
/// zero coefficient vector with (intercept, beta) warm-started by least
/// squares; MA roots reflected into the invertible region afterwards.
ArimaxFit fit_arimax(const std::vector<double>& y, const Matrix* exog, ArimaxOrder order,
                     OptimSettings settings = {});

/// Iterated conditional-mean forecasts integrated back to levels. Future
/// innovations are zero; stored residuals feed the first q steps.
std::vector<double> forecast(const ArimaxFit& fit, int h, const Matrix* exog_future);

}  // namespace votecast

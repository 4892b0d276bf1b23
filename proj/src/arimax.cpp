#include "votecast/arimax.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numeric>
#include <utility>

namespace votecast {

namespace {

constexpr double kHuge = 1e300;

struct CssProblem {
  const std::vector<double>* w = nullptr;
  const Matrix* xw = nullptr;  // differenced exogenous rows, aligned with w
  int p = 0, q = 0, k = 0;

  int dim() const { return p + q + k + 1; }

  // params = [phi, theta, beta, intercept]
  double css(const std::vector<double>& params, std::vector<double>* resid_out = nullptr) const {
    const std::vector<double>& ww = *w;
    const int nw = static_cast<int>(ww.size());
    const double* phi = params.data();
    const double* theta = params.data() + p;
    const double* beta = params.data() + p + q;
    const double c = params[static_cast<std::size_t>(p + q + k)];

    std::vector<double> e(static_cast<std::size_t>(nw), 0.0);
    double acc_css = 0.0;
    for (int t = p; t < nw; ++t) {
      double pred = c;
      if (k > 0) {
        const std::vector<double>& x = (*xw)[static_cast<std::size_t>(t)];
        for (int j = 0; j < k; ++j) pred += beta[j] * x[static_cast<std::size_t>(j)];
      }
      for (int j = 1; j <= p; ++j) pred += phi[j - 1] * ww[static_cast<std::size_t>(t - j)];
      for (int j = 1; j <= q; ++j) {
        if (t - j >= 0) pred += theta[j - 1] * e[static_cast<std::size_t>(t - j)];
      }
      const double err = ww[static_cast<std::size_t>(t)] - pred;
      e[static_cast<std::size_t>(t)] = err;
      acc_css += err * err;
    }
    if (!std::isfinite(acc_css)) return kHuge;
    if (resid_out != nullptr) *resid_out = std::move(e);
    return acc_css;
  }
};

// Dense symmetric solve by Gaussian elimination with partial pivoting; a tiny
// ridge keeps collinear designs solvable for the warm start.
std::vector<double> solve_normal_equations(const Matrix& X, const std::vector<double>& y) {
  const std::size_t n = y.size();
  const std::size_t k = X.empty() ? 0 : X.front().size();
  const std::size_t m = k + 1;
  std::vector<std::vector<double>> a(m, std::vector<double>(m + 1, 0.0));
  auto cell = [&](std::size_t r, std::size_t j) -> double {
    return j < k ? X[r][j] : 1.0;
  };
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = i; j < m; ++j) {
      double s = 0.0;
      for (std::size_t r = 0; r < n; ++r) s += cell(r, i) * cell(r, j);
      a[i][j] = a[j][i] = s;
    }
    double s = 0.0;
    for (std::size_t r = 0; r < n; ++r) s += cell(r, i) * y[r];
    a[i][m] = s;
  }
  double trace = 0.0;
  for (std::size_t i = 0; i < m; ++i) trace += a[i][i];
  const double ridge = 1e-10 * (trace / static_cast<double>(m) + 1.0);
  for (std::size_t i = 0; i < m; ++i) a[i][i] += ridge;

  for (std::size_t col = 0; col < m; ++col) {
    std::size_t piv = col;
    for (std::size_t r = col + 1; r < m; ++r) {
      if (std::abs(a[r][col]) > std::abs(a[piv][col])) piv = r;
    }
    std::swap(a[col], a[piv]);
    if (a[col][col] == 0.0) continue;
    for (std::size_t r = 0; r < m; ++r) {
      if (r == col) continue;
      const double f = a[r][col] / a[col][col];
      for (std::size_t j = col; j <= m; ++j) a[r][j] -= f * a[col][j];
    }
  }
  std::vector<double> out(m, 0.0);
  for (std::size_t i = 0; i < m; ++i) {
    if (a[i][i] != 0.0) out[i] = a[i][m] / a[i][i];
  }
  return out;
}

// Nelder-Mead simplex descent.
std::vector<double> simplex_minimize(const CssProblem& prob, std::vector<double> start,
                                     const OptimSettings& settings) {
  const int dim = prob.dim();
  const int max_evals = settings.max_evals_per_dim * dim;
  int evals = 0;
  auto f = [&](const std::vector<double>& x) {
    ++evals;
    return prob.css(x);
  };

  std::vector<std::vector<double>> pts(static_cast<std::size_t>(dim) + 1, start);
  for (int i = 0; i < dim; ++i) {
    double& v = pts[static_cast<std::size_t>(i) + 1][static_cast<std::size_t>(i)];
    const bool arma_coeff = i < prob.p + prob.q;
    v += arma_coeff ? 0.25 : 0.1 * std::max(1.0, std::abs(v));
  }
  std::vector<double> fv(pts.size());
  for (std::size_t i = 0; i < pts.size(); ++i) fv[i] = f(pts[i]);

  std::vector<std::size_t> idx(pts.size());
  while (evals < max_evals) {
    std::iota(idx.begin(), idx.end(), 0);
    std::sort(idx.begin(), idx.end(), [&fv](std::size_t a, std::size_t b) {
      return fv[a] < fv[b];
    });
    const std::size_t best = idx.front(), worst = idx.back(), second = idx[idx.size() - 2];
    if (fv[worst] - fv[best] < settings.css_tolerance) break;

    std::vector<double> centroid(static_cast<std::size_t>(dim), 0.0);
    for (std::size_t i : idx) {
      if (i == worst) continue;
      for (int j = 0; j < dim; ++j) centroid[static_cast<std::size_t>(j)] += pts[i][static_cast<std::size_t>(j)];
    }
    for (double& v : centroid) v /= static_cast<double>(dim);

    auto blend = [&](double t) {
      std::vector<double> x(static_cast<std::size_t>(dim));
      for (int j = 0; j < dim; ++j) {
        x[static_cast<std::size_t>(j)] =
            centroid[static_cast<std::size_t>(j)] +
            t * (pts[worst][static_cast<std::size_t>(j)] - centroid[static_cast<std::size_t>(j)]);
      }
      return x;
    };

    std::vector<double> refl = blend(-1.0);
    const double fr = f(refl);
    if (fr < fv[best]) {
      std::vector<double> exp_pt = blend(-2.0);
      const double fe = f(exp_pt);
      if (fe < fr) {
        pts[worst] = std::move(exp_pt);
        fv[worst] = fe;
      } else {
        pts[worst] = std::move(refl);
        fv[worst] = fr;
      }
    } else if (fr < fv[second]) {
      pts[worst] = std::move(refl);
      fv[worst] = fr;
    } else {
      const bool outside = fr < fv[worst];
      std::vector<double> ctr = blend(outside ? -0.5 : 0.5);
      const double fc = f(ctr);
      if (fc < std::min(fr, fv[worst])) {
        pts[worst] = std::move(ctr);
        fv[worst] = fc;
      } else {
        for (std::size_t i : idx) {
          if (i == best) continue;
          for (int j = 0; j < dim; ++j) {
            pts[i][static_cast<std::size_t>(j)] =
                0.5 * (pts[i][static_cast<std::size_t>(j)] +
                       pts[best][static_cast<std::size_t>(j)]);
          }
          fv[i] = f(pts[i]);
        }
      }
    }
  }
  std::size_t best = 0;
  for (std::size_t i = 1; i < pts.size(); ++i) {
    if (fv[i] < fv[best]) best = i;
  }
  return pts[best];
}

// Roots by Durand-Kerner iteration; coefficients low to high, monic not required.
std::vector<std::complex<double>> poly_roots(std::vector<double> coeffs) {
  while (coeffs.size() > 1 && std::abs(coeffs.back()) < 1e-12) coeffs.pop_back();
  const std::size_t deg = coeffs.size() - 1;
  std::vector<std::complex<double>> roots;
  if (deg == 0) return roots;
  std::vector<std::complex<double>> c(coeffs.begin(), coeffs.end());
  for (auto& v : c) v /= coeffs.back();

  auto eval = [&c](std::complex<double> z) {
    std::complex<double> acc = 0.0;
    for (std::size_t i = c.size(); i-- > 0;) acc = acc * z + c[i];
    return acc;
  };

  roots.resize(deg);
  const std::complex<double> seed(0.4, 0.9);
  std::complex<double> pw = 1.0;
  for (auto& r : roots) {
    pw *= seed;
    r = pw;
  }
  for (int iter = 0; iter < 200; ++iter) {
    double moved = 0.0;
    for (std::size_t i = 0; i < deg; ++i) {
      std::complex<double> denom = 1.0;
      for (std::size_t j = 0; j < deg; ++j) {
        if (j != i) denom *= roots[i] - roots[j];
      }
      if (std::abs(denom) < 1e-30) continue;
      const std::complex<double> delta = eval(roots[i]) / denom;
      roots[i] -= delta;
      moved = std::max(moved, std::abs(delta));
    }
    if (moved < 1e-13) break;
  }
  return roots;
}

// Reflect MA roots inside the unit circle to their invertible mirror image.
bool enforce_invertible(std::vector<double>& theta) {
  if (theta.empty()) return false;
  std::vector<double> poly(theta.size() + 1, 0.0);
  poly[0] = 1.0;
  for (std::size_t i = 0; i < theta.size(); ++i) poly[i + 1] = theta[i];
  auto roots = poly_roots(poly);
  bool changed = false;
  for (auto& r : roots) {
    if (std::abs(r) < 1.0 && std::abs(r) > 1e-12) {
      r = 1.0 / std::conj(r);
      changed = true;
    }
  }
  if (!changed) return false;

  // Rebuild theta(z) = prod(1 - z / r_i); value 1 at z = 0 by construction.
  std::vector<std::complex<double>> acc = {1.0};
  for (const auto& r : roots) {
    std::vector<std::complex<double>> next(acc.size() + 1, 0.0);
    for (std::size_t i = 0; i < acc.size(); ++i) {
      next[i] += acc[i];
      next[i + 1] -= acc[i] / r;
    }
    acc = std::move(next);
  }
  for (std::size_t i = 0; i < theta.size(); ++i) {
    theta[i] = i + 1 < acc.size() ? acc[i + 1].real() : 0.0;
  }
  return true;
}

Matrix difference_rows(const Matrix& rows, int d) {
  Matrix cur = rows;
  for (int pass = 0; pass < d; ++pass) {
    Matrix next(cur.size() - 1);
    for (std::size_t i = 1; i < cur.size(); ++i) {
      std::vector<double> row(cur[i].size());
      for (std::size_t j = 0; j < row.size(); ++j) row[j] = cur[i][j] - cur[i - 1][j];
      next[i - 1] = std::move(row);
    }
    cur = std::move(next);
  }
  return cur;
}

}  // namespace

std::vector<double> difference(const std::vector<double>& y, int d) {
  if (static_cast<int>(y.size()) <= d) {
    raise(Errc::SeriesTooShort, "cannot difference " + std::to_string(y.size()) +
                                    " values " + std::to_string(d) + " times");
  }
  std::vector<double> cur = y;
  for (int pass = 0; pass < d; ++pass) {
    for (std::size_t i = 0; i + 1 < cur.size(); ++i) cur[i] = cur[i + 1] - cur[i];
    cur.pop_back();
  }
  return cur;
}

std::vector<double> integrate(const std::vector<double>& diffs,
                              const std::vector<double>& initials) {
  std::vector<double> tails = initials;
  std::vector<double> out;
  out.reserve(diffs.size());
  for (double f : diffs) {
    double v = f;
    for (std::size_t k = tails.size(); k-- > 0;) {
      v += tails[k];
      tails[k] = v;
    }
    out.push_back(v);
  }
  return out;
}

std::vector<double> integrate(const std::vector<double>& diffs,
                              const std::vector<double>& initials, int d) {
  if (static_cast<int>(initials.size()) != d) {
    raise(Errc::InconsistentInitials, "expected " + std::to_string(d) + " initial values, got " +
                                          std::to_string(initials.size()));
  }
  return integrate(diffs, initials);
}

ArimaxFit fit_arimax(const std::vector<double>& y, const Matrix* exog, ArimaxOrder order,
                     OptimSettings settings) {
  if (order.p < 0 || order.d < 0 || order.q < 0) {
    raise(Errc::TooFewObservations, "orders must be non-negative");
  }
  for (double v : y) {
    if (!std::isfinite(v)) raise(Errc::NonFiniteInput, "non-finite endogenous value");
  }
  const int n = static_cast<int>(y.size());
  const int k = exog != nullptr && !exog->empty() ? static_cast<int>(exog->front().size()) : 0;
  if (k > 0) {
    if (static_cast<int>(exog->size()) != n) {
      raise(Errc::ExogenousWidthMismatch, "exogenous rows must align with y");
    }
    for (const auto& row : *exog) {
      if (static_cast<int>(row.size()) != k) {
        raise(Errc::ExogenousWidthMismatch, "ragged exogenous matrix");
      }
      for (double v : row) {
        if (!std::isfinite(v)) raise(Errc::NonFiniteInput, "non-finite exogenous value");
      }
    }
  }
  if (n <= order.d) raise(Errc::TooFewObservations, "series shorter than differencing order");
  const int nw = n - order.d;
  const int dim = order.p + order.q + k + 1;
  if (dim >= nw - order.p) {
    raise(Errc::TooFewObservations, std::to_string(dim) + " parameters vs " +
                                        std::to_string(nw - order.p) + " usable observations");
  }

  ArimaxFit fit;
  fit.order = order;
  const std::vector<double> w = difference(y, order.d);
  Matrix xw;
  if (k > 0) xw = difference_rows(*exog, order.d);

  // Tail state for forecasting.
  {
    std::vector<double> level = y;
    for (int kk = 0; kk < order.d; ++kk) {
      fit.diff_tails.push_back(level.back());
      level = difference(level, 1);
    }
    for (int j = order.p; j >= 1; --j) {
      fit.last_w.push_back(w[static_cast<std::size_t>(nw - j)]);
    }
    if (k > 0) {
      for (int j = order.d; j >= 1; --j) {
        fit.last_exog_levels.push_back((*exog)[static_cast<std::size_t>(n - j)]);
      }
    }
  }

  // Degenerate series: constant after differencing with no exogenous signal.
  double w_mean = std::accumulate(w.begin(), w.end(), 0.0) / nw;
  double w_var = 0.0;
  for (double v : w) w_var += (v - w_mean) * (v - w_mean);
  w_var /= nw;
  if (k == 0 && w_var <= 1e-20 * (1.0 + w_mean * w_mean)) {
    fit.phi.assign(static_cast<std::size_t>(order.p), 0.0);
    fit.theta.assign(static_cast<std::size_t>(order.q), 0.0);
    fit.intercept = w_mean;
    fit.sigma2 = 0.0;
    fit.css = 0.0;
    fit.degenerate_variance = true;
    fit.last_residuals.assign(static_cast<std::size_t>(order.q), 0.0);
    return fit;
  }

  CssProblem prob{&w, k > 0 ? &xw : nullptr, order.p, order.q, k};

  // Warm start: zeros for phi/theta, OLS of w on xw for (beta, intercept).
  std::vector<double> start(static_cast<std::size_t>(dim), 0.0);
  if (k > 0) {
    const std::vector<double> ols = solve_normal_equations(xw, w);
    for (int j = 0; j < k; ++j) start[static_cast<std::size_t>(order.p + order.q + j)] = ols[static_cast<std::size_t>(j)];
    start.back() = ols.back();
  } else {
    start.back() = w_mean;
  }

  std::vector<double> best = simplex_minimize(prob, start, settings);
  // The optimizer never returns a point worse than either start.
  const std::vector<double> zero(static_cast<std::size_t>(dim), 0.0);
  for (const std::vector<double>* cand : {&std::as_const(start), &zero}) {
    if (prob.css(*cand) < prob.css(best)) best = *cand;
  }

  fit.phi.assign(best.begin(), best.begin() + order.p);
  fit.theta.assign(best.begin() + order.p, best.begin() + order.p + order.q);
  fit.beta.assign(best.begin() + order.p + order.q, best.begin() + order.p + order.q + k);
  fit.intercept = best.back();

  if (enforce_invertible(fit.theta)) {
    std::copy(fit.theta.begin(), fit.theta.end(), best.begin() + order.p);
  }

  std::vector<double> resid;
  fit.css = prob.css(best, &resid);
  fit.sigma2 = fit.css / static_cast<double>(nw - order.p);
  for (int j = order.q; j >= 1; --j) {
    fit.last_residuals.push_back(resid[static_cast<std::size_t>(nw - j)]);
  }
  return fit;
}

std::vector<double> forecast(const ArimaxFit& fit, int h, const Matrix* exog_future) {
  if (h < 1) raise(Errc::EmptyInput, "h must be >= 1");
  const int k = static_cast<int>(fit.beta.size());
  if (k == 0) {
    if (exog_future != nullptr && !exog_future->empty()) {
      raise(Errc::ExogenousWidthMismatch, "model fit without exogenous variables");
    }
  } else {
    if (exog_future == nullptr || static_cast<int>(exog_future->size()) < h) {
      raise(Errc::ExogenousWidthMismatch, "need " + std::to_string(h) + " future exogenous rows");
    }
    for (const auto& row : *exog_future) {
      if (static_cast<int>(row.size()) != k) {
        raise(Errc::ExogenousWidthMismatch, "exogenous width mismatch");
      }
    }
  }

  // Difference the future exogenous rows against the stored level tail.
  Matrix xdiff;
  if (k > 0) {
    Matrix extended = fit.last_exog_levels;
    extended.insert(extended.end(), exog_future->begin(), exog_future->begin() + h);
    xdiff = difference_rows(extended, fit.order.d);
  }

  std::vector<double> wbuf = fit.last_w;
  std::vector<double> ebuf = fit.last_residuals;
  std::vector<double> tails = fit.diff_tails;
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(h));
  for (int s = 0; s < h; ++s) {
    double acc = fit.intercept;
    if (k > 0) {
      const auto& x = xdiff[static_cast<std::size_t>(s)];
      for (int j = 0; j < k; ++j) acc += fit.beta[static_cast<std::size_t>(j)] * x[static_cast<std::size_t>(j)];
    }
    for (int j = 1; j <= fit.order.p; ++j) {
      acc += fit.phi[static_cast<std::size_t>(j - 1)] * wbuf[wbuf.size() - static_cast<std::size_t>(j)];
    }
    for (int j = 1; j <= fit.order.q; ++j) {
      if (ebuf.size() >= static_cast<std::size_t>(j)) {
        acc += fit.theta[static_cast<std::size_t>(j - 1)] * ebuf[ebuf.size() - static_cast<std::size_t>(j)];
      }
    }
    if (fit.order.p > 0) wbuf.push_back(acc);
    ebuf.push_back(0.0);  // future innovations are zero

    double level = acc;
    for (std::size_t kk = tails.size(); kk-- > 0;) {
      level += tails[kk];
      tails[kk] = level;
    }
    out.push_back(level);
  }
  return out;
}

}  // namespace votecast

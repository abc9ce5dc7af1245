// Independent reference implementations the production code is checked
// against. Kept deliberately naive: dense joint-Gaussian algebra instead of
// Kalman recursions, plain loops instead of the scan in detect_single.
#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <optional>
#include <vector>

#include "bsts.hpp"
#include "changepoint.hpp"

namespace oracle {

// ---- dense joint-Gaussian oracle for the state space model ----------------

struct DenseModel {
  std::vector<Eigen::VectorXd> state_mean;             // mu_t
  std::vector<std::vector<Eigen::MatrixXd>> state_cov; // C[s][t] = Cov(alpha_s, alpha_t), s <= t
  Eigen::VectorXd y_mean;
  Eigen::MatrixXd y_cov;
};

inline DenseModel dense_moments(const coverimpact::StateSpaceModel& m, int n) {
  DenseModel dm;
  dm.state_mean.resize(n);
  dm.state_cov.assign(n, std::vector<Eigen::MatrixXd>(n));

  const Eigen::MatrixXd RQR = m.R * m.q_diag.asDiagonal() * m.R.transpose();
  dm.state_mean[0] = m.a1;
  dm.state_cov[0][0] = m.P1;
  for (int t = 1; t < n; ++t) {
    dm.state_mean[t] = m.T * dm.state_mean[t - 1];
    dm.state_cov[t][t] = m.T * dm.state_cov[t - 1][t - 1] * m.T.transpose() + RQR;
  }
  for (int s = 0; s < n; ++s) {
    for (int t = s + 1; t < n; ++t) {
      dm.state_cov[s][t] = dm.state_cov[s][t - 1] * m.T.transpose();
    }
  }

  dm.y_mean.resize(n);
  dm.y_cov.resize(n, n);
  for (int s = 0; s < n; ++s) {
    dm.y_mean[s] = m.Z.dot(dm.state_mean[s]);
    for (int t = s; t < n; ++t) {
      const double c = m.Z.dot(dm.state_cov[s][t] * m.Z);
      dm.y_cov(s, t) = c;
      dm.y_cov(t, s) = c;
    }
    dm.y_cov(s, s) += m.obs_var;
  }
  return dm;
}

inline std::vector<int> observed_indices(const std::vector<double>& y) {
  std::vector<int> idx;
  for (int t = 0; t < static_cast<int>(y.size()); ++t) {
    if (!std::isnan(y[t])) idx.push_back(t);
  }
  return idx;
}

inline double dense_loglik(const coverimpact::StateSpaceModel& m,
                           const std::vector<double>& y) {
  const int n = static_cast<int>(y.size());
  const DenseModel dm = dense_moments(m, n);
  const std::vector<int> obs = observed_indices(y);
  const int k = static_cast<int>(obs.size());

  Eigen::VectorXd resid(k);
  Eigen::MatrixXd cov(k, k);
  for (int i = 0; i < k; ++i) {
    resid[i] = y[obs[i]] - dm.y_mean[obs[i]];
    for (int j = 0; j < k; ++j) cov(i, j) = dm.y_cov(obs[i], obs[j]);
  }

  const Eigen::LDLT<Eigen::MatrixXd> ldlt(cov);
  const double logdet = ldlt.vectorD().array().log().sum();
  const double quad = resid.dot(ldlt.solve(resid));
  return -0.5 * (k * std::log(2.0 * 3.14159265358979323846) + logdet + quad);
}

// E[alpha_t | observed y] by direct conditioning of the joint Gaussian.
inline Eigen::VectorXd dense_smoothed_mean(const coverimpact::StateSpaceModel& m,
                                           const std::vector<double>& y, int t) {
  const int n = static_cast<int>(y.size());
  const DenseModel dm = dense_moments(m, n);
  const std::vector<int> obs = observed_indices(y);
  const int k = static_cast<int>(obs.size());

  Eigen::VectorXd resid(k);
  Eigen::MatrixXd cov(k, k);
  Eigen::MatrixXd cross(m.d, k);  // Cov(alpha_t, y_obs)
  for (int i = 0; i < k; ++i) {
    const int s = obs[i];
    resid[i] = y[s] - dm.y_mean[s];
    for (int j = 0; j < k; ++j) cov(i, j) = dm.y_cov(obs[i], obs[j]);
    const Eigen::MatrixXd c_ts =
        t <= s ? dm.state_cov[t][s] : Eigen::MatrixXd(dm.state_cov[s][t].transpose());
    cross.col(i) = c_ts * m.Z;
  }
  return dm.state_mean[t] + cross * cov.ldlt().solve(resid);
}

// ---- exhaustive two-segment MLE changepoint oracle -------------------------

struct BruteResult {
  double lambda = 0.0;
  int best_tau = 0;
  double null_ll = 0.0;
  std::vector<double> ml;
};

inline double brute_segment_ll(const std::vector<double>& y, std::size_t lo, std::size_t hi,
                               coverimpact::CptStatistic stat, double global_mean,
                               double global_var) {
  const double m = static_cast<double>(hi - lo);
  double mean = 0.0;
  for (std::size_t i = lo; i < hi; ++i) mean += y[i];
  mean /= m;

  const double two_pi = 2.0 * 3.14159265358979323846;
  if (stat == coverimpact::CptStatistic::Mean) {
    double ll = 0.0;
    for (std::size_t i = lo; i < hi; ++i) {
      ll += -0.5 * std::log(two_pi * global_var) -
            (y[i] - mean) * (y[i] - mean) / (2.0 * global_var);
    }
    return ll;
  }
  const double center =
      stat == coverimpact::CptStatistic::Variance ? global_mean : mean;
  double var = 0.0;
  for (std::size_t i = lo; i < hi; ++i) var += (y[i] - center) * (y[i] - center);
  var /= m;
  double ll = 0.0;
  for (std::size_t i = lo; i < hi; ++i) {
    ll += -0.5 * std::log(two_pi * var) - (y[i] - center) * (y[i] - center) / (2.0 * var);
  }
  return ll;
}

inline BruteResult brute_changepoint(const std::vector<double>& y,
                                     coverimpact::CptStatistic stat, int min_seg_len) {
  const int n = static_cast<int>(y.size());
  double gmean = 0.0;
  for (const double v : y) gmean += v;
  gmean /= n;
  double gvar = 0.0;
  for (const double v : y) gvar += (v - gmean) * (v - gmean);
  gvar /= n;

  BruteResult out;
  out.null_ll = brute_segment_ll(y, 0, y.size(), stat, gmean, gvar);
  double best = -1e300;
  for (int tau = min_seg_len; tau <= n - min_seg_len; ++tau) {
    const double ml = brute_segment_ll(y, 0, tau, stat, gmean, gvar) +
                      brute_segment_ll(y, tau, y.size(), stat, gmean, gvar);
    out.ml.push_back(ml);
    if (ml > best) {
      best = ml;
      out.best_tau = tau;
    }
  }
  out.lambda = 2.0 * (best - out.null_ll);
  return out;
}

}  // namespace oracle

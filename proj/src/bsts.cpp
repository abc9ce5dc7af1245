#include "bsts.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "errors.hpp"

namespace coverimpact {

namespace {

constexpr double kTwoPi = 6.28318530717958647692;

bool is_missing(double y) { return std::isnan(y); }

Eigen::MatrixXd symmetrize_floor(const Eigen::MatrixXd& M) {
  const Eigen::MatrixXd S = 0.5 * (M + M.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(S);
  const Eigen::VectorXd ev = es.eigenvalues().cwiseMax(0.0);
  return es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().transpose();
}

Eigen::MatrixXd pinv_psd(const Eigen::MatrixXd& M) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (M + M.transpose()));
  const double scale = es.eigenvalues().cwiseAbs().maxCoeff();
  const double tol = 1e-12 * std::max(1.0, scale);
  Eigen::VectorXd inv = es.eigenvalues();
  for (int i = 0; i < inv.size(); ++i) {
    inv[i] = inv[i] > tol ? 1.0 / inv[i] : 0.0;
  }
  return es.eigenvectors() * inv.asDiagonal() * es.eigenvectors().transpose();
}

// Draw from N(mean, cov) with cov possibly singular; eigen square root.
Eigen::VectorXd mvn_sample(const Eigen::VectorXd& mean, const Eigen::MatrixXd& cov,
                           Rng& rng) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (cov + cov.transpose()));
  Eigen::VectorXd z(mean.size());
  for (int i = 0; i < z.size(); ++i) z[i] = rng.normal();
  const Eigen::VectorXd root = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  return mean + es.eigenvectors() * (root.asDiagonal() * z);
}

}  // namespace

const char* component_name(ComponentKind kind) {
  switch (kind) {
    case ComponentKind::LocalLevel: return "local_level";
    case ComponentKind::LocalLinearTrend: return "local_linear_trend";
  }
  return "local_linear_trend";
}

ComponentKind parse_component(const std::string& name) {
  if (name == "local_level") return ComponentKind::LocalLevel;
  if (name == "local_linear_trend") return ComponentKind::LocalLinearTrend;
  fail(ErrorCode::Param, "unknown component '" + name +
                             "' (expected local_level or local_linear_trend)");
}

void validate(const StateSpaceModel& m) {
  if (m.d < 1 || m.q < 1 || m.q > m.d) {
    fail(ErrorCode::Param, "state space dimensions invalid (need 1 <= q <= d)");
  }
  if (m.Z.size() != m.d || m.T.rows() != m.d || m.T.cols() != m.d ||
      m.R.rows() != m.d || m.R.cols() != m.q || m.q_diag.size() != m.q ||
      m.a1.size() != m.d || m.P1.rows() != m.d || m.P1.cols() != m.d) {
    fail(ErrorCode::Param, "state space matrix shapes inconsistent");
  }
  if (m.obs_var < 0.0) fail(ErrorCode::Param, "observation variance must be nonnegative");
  if ((m.q_diag.array() < 0.0).any()) {
    fail(ErrorCode::Param, "state diffusion variances must be nonnegative");
  }
}

StateSpaceModel build_model(ComponentKind kind, double obs_var,
                            std::span<const double> state_vars, double y_variance_hint) {
  if (obs_var < 0.0) fail(ErrorCode::Param, "observation variance must be nonnegative");
  for (const double v : state_vars) {
    if (v < 0.0) fail(ErrorCode::Param, "state diffusion variances must be nonnegative");
  }
  if (!(y_variance_hint > 0.0)) {
    fail(ErrorCode::Param, "y variance hint must be positive");
  }

  StateSpaceModel m;
  switch (kind) {
    case ComponentKind::LocalLevel: {
      if (state_vars.size() != 1) {
        fail(ErrorCode::Param, "local_level takes one state variance");
      }
      m.d = 1;
      m.q = 1;
      m.Z = Eigen::VectorXd::Ones(1);
      m.T = Eigen::MatrixXd::Ones(1, 1);
      m.R = Eigen::MatrixXd::Ones(1, 1);
      break;
    }
    case ComponentKind::LocalLinearTrend: {
      if (state_vars.size() != 2) {
        fail(ErrorCode::Param, "local_linear_trend takes level and slope variances");
      }
      m.d = 2;
      m.q = 2;
      m.Z = Eigen::VectorXd::Zero(2);
      m.Z[0] = 1.0;
      m.T = Eigen::MatrixXd::Identity(2, 2);
      m.T(0, 1) = 1.0;
      m.R = Eigen::MatrixXd::Identity(2, 2);
      break;
    }
  }
  m.obs_var = obs_var;
  m.q_diag = Eigen::Map<const Eigen::VectorXd>(state_vars.data(),
                                               static_cast<int>(state_vars.size()));
  m.a1 = Eigen::VectorXd::Zero(m.d);
  m.P1 = 1e6 * y_variance_hint * Eigen::MatrixXd::Identity(m.d, m.d);
  return m;
}

FilterOutput kalman_filter(const StateSpaceModel& m, std::span<const double> y) {
  validate(m);
  const int n = static_cast<int>(y.size());
  if (n < 1) fail(ErrorCode::Param, "filter needs at least one time point");
  if (std::all_of(y.begin(), y.end(), is_missing)) {
    fail(ErrorCode::Param, "filter needs at least one observed value");
  }

  const Eigen::MatrixXd RQR = m.R * m.q_diag.asDiagonal() * m.R.transpose();

  FilterOutput fo;
  fo.a_pred.resize(n);
  fo.P_pred.resize(n);
  fo.a_filt.resize(n);
  fo.P_filt.resize(n);
  fo.innovation.assign(n, std::numeric_limits<double>::quiet_NaN());
  fo.innovation_var.assign(n, std::numeric_limits<double>::quiet_NaN());
  fo.observed.assign(n, false);

  Eigen::VectorXd a = m.a1;
  Eigen::MatrixXd P = symmetrize_floor(m.P1);
  for (int t = 0; t < n; ++t) {
    fo.a_pred[t] = a;
    fo.P_pred[t] = P;

    if (!is_missing(y[t])) {
      const double v = y[t] - m.Z.dot(a);
      const double F = m.Z.dot(P * m.Z) + m.obs_var;
      if (!(F > 0.0)) {
        fail(ErrorCode::Conditioning,
             "innovation variance not positive at t=" + std::to_string(t + 1));
      }
      const Eigen::VectorXd PZ = P * m.Z;
      fo.a_filt[t] = a + PZ * (v / F);
      fo.P_filt[t] = symmetrize_floor(P - PZ * PZ.transpose() / F);
      fo.innovation[t] = v;
      fo.innovation_var[t] = F;
      fo.observed[t] = true;
      fo.loglik += -0.5 * (std::log(kTwoPi * F) + v * v / F);
    } else {
      fo.a_filt[t] = a;
      fo.P_filt[t] = P;
    }

    a = m.T * fo.a_filt[t];
    P = symmetrize_floor(m.T * fo.P_filt[t] * m.T.transpose() + RQR);
  }
  return fo;
}

SmootherOutput kalman_smoother(const StateSpaceModel& m, std::span<const double> y,
                               const FilterOutput& fo) {
  validate(m);
  const int n = static_cast<int>(y.size());
  if (static_cast<int>(fo.a_pred.size()) != n) {
    fail(ErrorCode::Param, "filter output does not match the series length");
  }

  SmootherOutput out;
  out.mean.resize(n);
  out.cov.resize(n);

  Eigen::VectorXd r = Eigen::VectorXd::Zero(m.d);
  Eigen::MatrixXd N = Eigen::MatrixXd::Zero(m.d, m.d);
  for (int t = n - 1; t >= 0; --t) {
    if (fo.observed[t]) {
      const double F = fo.innovation_var[t];
      const double v = fo.innovation[t];
      const Eigen::VectorXd K = m.T * (fo.P_pred[t] * m.Z) / F;
      const Eigen::MatrixXd L = m.T - K * m.Z.transpose();
      r = m.Z * (v / F) + L.transpose() * r;
      N = m.Z * m.Z.transpose() / F + L.transpose() * N * L;
    } else {
      r = m.T.transpose() * r;
      N = m.T.transpose() * N * m.T;
    }
    out.mean[t] = fo.a_pred[t] + fo.P_pred[t] * r;
    out.cov[t] = symmetrize_floor(fo.P_pred[t] - fo.P_pred[t] * N * fo.P_pred[t]);
  }
  return out;
}

Eigen::MatrixXd ffbs(const StateSpaceModel& m, std::span<const double> y, Rng& rng) {
  const FilterOutput fo = kalman_filter(m, y);
  const int n = static_cast<int>(y.size());

  Eigen::MatrixXd states(n, m.d);
  Eigen::VectorXd alpha = mvn_sample(fo.a_filt[n - 1], fo.P_filt[n - 1], rng);
  states.row(n - 1) = alpha.transpose();

  for (int t = n - 2; t >= 0; --t) {
    const Eigen::MatrixXd& Pp = fo.P_pred[t + 1];
    const Eigen::MatrixXd J = fo.P_filt[t] * m.T.transpose() * pinv_psd(Pp);
    const Eigen::VectorXd mean = fo.a_filt[t] + J * (alpha - fo.a_pred[t + 1]);
    const Eigen::MatrixXd cov = fo.P_filt[t] - J * Pp * J.transpose();
    alpha = mvn_sample(mean, symmetrize_floor(cov), rng);
    states.row(t) = alpha.transpose();
  }
  return states;
}

PosteriorDraws gibbs_sample(const StateSpaceModel& m, std::span<const double> y,
                            const GibbsPriors& priors, int n_iter, int burn_in,
                            std::uint64_t seed) {
  validate(m);
  if (burn_in < 0 || n_iter <= burn_in) {
    fail(ErrorCode::Param, "gibbs sampling requires n_iter > burn_in >= 0");
  }
  if (!(priors.obs.shape > 0.0) || !(priors.obs.scale > 0.0)) {
    fail(ErrorCode::Param, "observation variance prior must have positive shape and scale");
  }
  if (static_cast<int>(priors.state.size()) != m.q) {
    fail(ErrorCode::Param, "need one state variance prior per diffusion entry");
  }
  for (const VariancePrior& p : priors.state) {
    if (!(p.shape > 0.0) || !(p.scale > 0.0)) {
      fail(ErrorCode::Param, "state variance priors must have positive shape and scale");
    }
  }

  const int n = static_cast<int>(y.size());
  int n_obs = 0;
  for (const double v : y) {
    if (!is_missing(v)) ++n_obs;
  }
  if (n_obs == 0) fail(ErrorCode::Param, "gibbs sampling needs at least one observed value");

  // State-equation residuals are recovered through the pseudo-inverse of R;
  // identity for the built-in components.
  const Eigen::MatrixXd Rpinv =
      m.R.completeOrthogonalDecomposition().pseudoInverse();

  StateSpaceModel cur = m;
  Rng rng(seed);

  PosteriorDraws draws;
  draws.burn_in = burn_in;
  draws.seed = seed;
  const int keep = n_iter - burn_in;
  draws.obs_var.reserve(keep);
  draws.state_vars.resize(keep, m.q);
  draws.states.reserve(keep);

  for (int iter = 0; iter < n_iter; ++iter) {
    const Eigen::MatrixXd states = ffbs(cur, y, rng);

    double obs_sse = 0.0;
    for (int t = 0; t < n; ++t) {
      if (is_missing(y[t])) continue;
      const double resid = y[t] - m.Z.dot(states.row(t).transpose());
      obs_sse += resid * resid;
    }
    cur.obs_var = rng.inverse_gamma(priors.obs.shape + 0.5 * n_obs,
                                    priors.obs.scale + 0.5 * obs_sse);

    Eigen::VectorXd state_sse = Eigen::VectorXd::Zero(m.q);
    for (int t = 0; t + 1 < n; ++t) {
      const Eigen::VectorXd eta =
          Rpinv * (states.row(t + 1).transpose() - m.T * states.row(t).transpose());
      state_sse += eta.cwiseProduct(eta);
    }
    for (int j = 0; j < m.q; ++j) {
      cur.q_diag[j] = rng.inverse_gamma(priors.state[j].shape + 0.5 * (n - 1),
                                        priors.state[j].scale + 0.5 * state_sse[j]);
    }

    if (iter >= burn_in) {
      draws.obs_var.push_back(cur.obs_var);
      draws.state_vars.row(draws.states.size()) = cur.q_diag.transpose();
      draws.states.push_back(states);
    }
  }
  return draws;
}

Eigen::MatrixXd posterior_predict(const PosteriorDraws& draws, const StateSpaceModel& m,
                                  int horizon, std::uint64_t seed) {
  validate(m);
  if (horizon < 1) fail(ErrorCode::Param, "forecast horizon must be at least 1");
  if (draws.count() < 1) fail(ErrorCode::Param, "no posterior draws to predict from");

  Rng rng(seed);
  Eigen::MatrixXd paths(draws.count(), horizon);
  for (int i = 0; i < draws.count(); ++i) {
    Eigen::VectorXd alpha = draws.states[i].row(draws.states[i].rows() - 1).transpose();
    const double obs_sd = std::sqrt(draws.obs_var[i]);
    const Eigen::VectorXd state_sd = draws.state_vars.row(i).cwiseMax(0.0).cwiseSqrt();
    for (int k = 0; k < horizon; ++k) {
      Eigen::VectorXd eta(m.q);
      for (int j = 0; j < m.q; ++j) eta[j] = rng.normal(0.0, state_sd[j]);
      alpha = m.T * alpha + m.R * eta;
      paths(i, k) = m.Z.dot(alpha) + rng.normal(0.0, obs_sd);
    }
  }
  return paths;
}

}  // namespace coverimpact

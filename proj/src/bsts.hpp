#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "rng.hpp"

namespace coverimpact {

enum class ComponentKind { LocalLevel, LocalLinearTrend };

const char* component_name(ComponentKind kind);
ComponentKind parse_component(const std::string& name);

// Time-invariant linear-Gaussian state space:
//   y_t     = Z' alpha_t + eps_t,        eps_t ~ N(0, obs_var)
//   alpha_{t+1} = T alpha_t + R eta_t,   eta_t ~ N(0, diag(q_diag))
// with alpha_1 ~ N(a1, P1).
struct StateSpaceModel {
  int d = 0;  // state dimension
  int q = 0;  // disturbance dimension, q <= d
  Eigen::VectorXd Z;
  Eigen::MatrixXd T;
  Eigen::MatrixXd R;  // d x q
  double obs_var = 0.0;
  Eigen::VectorXd q_diag;
  Eigen::VectorXd a1;
  Eigen::MatrixXd P1;
};

void validate(const StateSpaceModel& m);

// Populates the matrices for the requested component. state_vars supplies
// the diffusion variances (level, or level and slope); P1 is diffuse,
// 1e6 * y_variance_hint on the diagonal.
StateSpaceModel build_model(ComponentKind kind, double obs_var,
                            std::span<const double> state_vars,
                            double y_variance_hint = 1.0);

// NaN entries in y mark missing observations: the update step is skipped
// and the slot contributes nothing to the log-likelihood.
struct FilterOutput {
  std::vector<Eigen::VectorXd> a_pred, a_filt;
  std::vector<Eigen::MatrixXd> P_pred, P_filt;
  std::vector<double> innovation;      // NaN at missing slots
  std::vector<double> innovation_var;  // NaN at missing slots
  std::vector<bool> observed;
  double loglik = 0.0;
};

FilterOutput kalman_filter(const StateSpaceModel& m, std::span<const double> y);

struct SmootherOutput {
  std::vector<Eigen::VectorXd> mean;
  std::vector<Eigen::MatrixXd> cov;
};

// Fixed-interval smoother (backward disturbance recursion); covariances are
// symmetrized with eigenvalues floored at zero.
SmootherOutput kalman_smoother(const StateSpaceModel& m, std::span<const double> y,
                               const FilterOutput& fo);

// One exact draw from p(alpha_{1:n} | y): forward filter, backward sampling.
// Returns an n x d matrix, one state per row.
Eigen::MatrixXd ffbs(const StateSpaceModel& m, std::span<const double> y, Rng& rng);

// Inverse-gamma prior, density proportional to x^{-shape-1} e^{-scale/x}.
struct VariancePrior {
  double shape = 0.01;
  double scale = 0.01;
};

struct GibbsPriors {
  VariancePrior obs;
  std::vector<VariancePrior> state;  // one per q_diag entry
};

struct PosteriorDraws {
  std::vector<double> obs_var;          // one per retained draw
  Eigen::MatrixXd state_vars;           // draws x q
  std::vector<Eigen::MatrixXd> states;  // each n x d
  int burn_in = 0;
  std::uint64_t seed = 0;

  int count() const { return static_cast<int>(obs_var.size()); }
};

// Alternates an FFBS state draw with conjugate inverse-gamma variance draws
// (observation residuals for obs_var, state-equation residuals per q entry).
// Keeps draws after burn_in; deterministic given the seed.
PosteriorDraws gibbs_sample(const StateSpaceModel& m, std::span<const double> y,
                            const GibbsPriors& priors, int n_iter, int burn_in,
                            std::uint64_t seed);

// Propagates each retained draw's final state forward h steps, sampling the
// state and observation noise from that draw's variances. Returns draws x h
// samples of y_{n+1..n+h}.
Eigen::MatrixXd posterior_predict(const PosteriorDraws& draws, const StateSpaceModel& m,
                                  int horizon, std::uint64_t seed);

}  // namespace coverimpact

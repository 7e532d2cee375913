#pragma once

#include <Eigen/Cholesky>
#include <Eigen/Dense>
#include <cmath>
#include <map>
#include <utility>

#include "rft/errors.hpp"
#include "rft/graph.hpp"

namespace rft {

/// Filter constants shared by every agent: motion-model noise Q, measurement
/// noise for the GPS and relative channels, step length, and the divergence
/// threshold chi for the detection gate. The measurement Jacobians are fixed:
/// H_gps = I and H_rel = -I; the motion model has F = I, G = dt * I.
struct MeasurementModels {
    Mat process_cov;   // Q
    Mat gps_cov;       // R_gps
    Mat relative_cov;  // R_rel
    double dt = 0.0;
    double chi = 0.0;

    void validate() const {
        auto check_spd = [](const Mat& m, const char* name) {
            if (m.rows() != m.cols() || !m.isApprox(m.transpose(), 1e-12)) {
                throw ConfigError(std::string(name) + " must be symmetric");
            }
            if (Eigen::LLT<Mat>(m).info() != Eigen::Success) {
                throw ConfigError(std::string(name) + " must be positive definite");
            }
        };
        check_spd(process_cov, "process covariance");
        check_spd(gps_cov, "GPS measurement covariance");
        check_spd(relative_cov, "relative measurement covariance");
        if (dt <= 0.0) throw ConfigError("estimator dt must be positive");
        if (chi <= 0.0) throw ConfigError("detection threshold chi must be positive");
    }
};

/// Gaussian belief in information form: Phi = P^{-1}, phi = Phi * xhat. The
/// mean is kept recovered alongside so both parameterizations stay coherent.
struct InfoState {
    Vec xhat;
    Mat Phi;
    Vec phi;

    static InfoState from_moments(const Vec& mean, const Mat& cov) {
        Eigen::LLT<Mat> llt(cov);
        if (llt.info() != Eigen::Success) {
            throw EstimatorDegenerateError("initial covariance is not positive definite");
        }
        InfoState s;
        s.xhat = mean;
        s.Phi = llt.solve(Mat::Identity(cov.rows(), cov.cols()));
        s.Phi = 0.5 * (s.Phi + s.Phi.transpose()).eval();
        s.phi = s.Phi * mean;
        return s;
    }

    Mat covariance() const {
        Eigen::LLT<Mat> llt(Phi);
        if (llt.info() != Eigen::Success) {
            throw EstimatorDegenerateError("information matrix is not positive definite");
        }
        Mat p = llt.solve(Mat::Identity(Phi.rows(), Phi.cols()));
        return 0.5 * (p + p.transpose());
    }
};

enum class UpdateMode { kGps = 0, kRelative = 1, kPredictOnly = 2, kNone = 3 };

namespace detail {

inline Eigen::LLT<Mat> checked_llt(const Mat& m, const char* what) {
    Eigen::LLT<Mat> llt(0.5 * (m + m.transpose()));
    if (llt.info() != Eigen::Success) {
        throw EstimatorDegenerateError(std::string(what) + " is not positive definite");
    }
    return llt;
}

inline double log_det_from_llt(const Eigen::LLT<Mat>& llt) {
    return 2.0 * llt.matrixL().toDenseMatrix().diagonal().array().log().sum();
}

}  // namespace detail

/// Motion-model prediction: xhat advances by the measured velocity, the
/// covariance by dt^2 Q (F = I, G = dt I).
inline InfoState predict(const InfoState& est, const Vec& measured_velocity,
                         const MeasurementModels& models) {
    const Mat p_prior = est.covariance() + models.dt * models.dt * models.process_cov;
    return InfoState::from_moments(est.xhat + measured_velocity * models.dt, p_prior);
}

namespace detail {

/// Shared information-form measurement update with Jacobian h_sign * I:
///   Phi  += R^{-1}
///   phi  += h_sign R^{-1} [s - shat + h_sign xhat]
inline InfoState info_update(const InfoState& predicted, const Vec& s, const Vec& shat,
                             double h_sign, const Mat& r) {
    const auto r_llt = checked_llt(r, "measurement covariance");
    InfoState out;
    out.Phi = predicted.Phi + r_llt.solve(Mat::Identity(r.rows(), r.cols()));
    out.Phi = 0.5 * (out.Phi + out.Phi.transpose()).eval();
    out.phi = predicted.phi + h_sign * r_llt.solve(s - shat + h_sign * predicted.xhat);
    const auto phi_llt = checked_llt(out.Phi, "updated information matrix");
    out.xhat = phi_llt.solve(out.phi);
    return out;
}

}  // namespace detail

/// GPS update: H = I, measurement prediction shat = xhat(k|k-1).
inline InfoState update_gps(const InfoState& predicted, const Vec& s,
                            const MeasurementModels& models) {
    return detail::info_update(predicted, s, predicted.xhat, +1.0, models.gps_cov);
}

/// Cooperative-localization update against neighbor j: the measurement is the
/// relative displacement s = x_j - x_i, predicted from the neighbor's desired
/// position as shat = h_j^d - xhat(k|k-1). H = -I. No communication involved.
inline InfoState update_relative(const InfoState& predicted, const Vec& s,
                                 const Vec& neighbor_desired_pos,
                                 const MeasurementModels& models) {
    return detail::info_update(predicted, s, neighbor_desired_pos - predicted.xhat, -1.0,
                               models.relative_cov);
}

/// KL divergence between the prior and posterior Gaussian beliefs,
///   D = 1/2 { d^T Phi_post d + tr(Phi_post Phi_prior^{-1})
///             + ln(det Phi_prior / det Phi_post) - n },  d = xhat_post - xhat_prior.
/// Non-negative; tiny negative floating-point residue is clamped to zero.
inline double kl_divergence(const InfoState& prior, const InfoState& posterior) {
    const auto n = prior.Phi.rows();
    const auto prior_llt = detail::checked_llt(prior.Phi, "prior information matrix");
    const auto post_llt = detail::checked_llt(posterior.Phi, "posterior information matrix");
    const Vec d = posterior.xhat - prior.xhat;
    const double quad = d.dot(posterior.Phi * d);
    const double trace = prior_llt.solve(posterior.Phi).trace();
    const double log_det_ratio =
        detail::log_det_from_llt(prior_llt) - detail::log_det_from_llt(post_llt);
    const double dkl = 0.5 * (quad + trace + log_det_ratio - static_cast<double>(n));
    return dkl < 0.0 && dkl > -1e-9 ? 0.0 : dkl;
}

inline double saturation(double x) {
    return (x < 0.0 ? -1.0 : 1.0) * std::min(1.0, std::abs(x));
}

/// Positioning quality measure beta = 1 - sat(D_KL / chi), in [0, 1].
inline double quality_measure(double d_kl, double chi) {
    if (chi <= 0.0) throw ConfigError("detection threshold chi must be positive");
    return 1.0 - saturation(d_kl / chi);
}

/// Outcome of one resilient estimation step.
struct EstimatorStepResult {
    UpdateMode mode = UpdateMode::kNone;
    double d_kl = 0.0;
    double beta = 1.0;
};

/// Per-agent resilient state estimator.
///
/// Each step: predict with the measured velocity; tentatively fuse the GPS
/// measurement on a copy; gate it by the KL divergence between prior and
/// tentative posterior. Below chi the GPS update is accepted; otherwise it is
/// discarded untouched and one relative update per neighbor (ascending index)
/// is applied to the prediction instead. With no neighbors available the step
/// is flagged predict-only.
class ResilientEstimator {
public:
    ResilientEstimator(const Vec& initial_position, const Mat& initial_cov,
                       MeasurementModels models)
        : models_(std::move(models)), state_(InfoState::from_moments(initial_position, initial_cov)) {
        models_.validate();
    }

    const InfoState& state() const { return state_; }
    const EstimatorStepResult& last_result() const { return last_; }

    EstimatorStepResult step(const Vec& measured_velocity, const Vec& gps,
                             const std::map<int, Vec>& relative_meas,
                             const std::map<int, Vec>& neighbor_desired_pos) {
        const InfoState prior = predict(state_, measured_velocity, models_);
        const InfoState tentative = update_gps(prior, gps, models_);

        EstimatorStepResult res;
        res.d_kl = kl_divergence(prior, tentative);
        res.beta = quality_measure(res.d_kl, models_.chi);

        if (res.d_kl < models_.chi) {
            state_ = tentative;
            res.mode = UpdateMode::kGps;
        } else if (relative_meas.empty()) {
            state_ = prior;
            res.mode = UpdateMode::kPredictOnly;
        } else {
            state_ = prior;
            for (const auto& [j, s] : relative_meas) {
                state_ = update_relative(state_, s, neighbor_desired_pos.at(j), models_);
            }
            res.mode = UpdateMode::kRelative;
        }
        last_ = res;
        return res;
    }

private:
    MeasurementModels models_;
    InfoState state_;
    EstimatorStepResult last_;
};

}  // namespace rft

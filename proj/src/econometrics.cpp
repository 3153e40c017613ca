#include "amm/econometrics.hpp"

#include <cmath>
#include <stdexcept>

namespace amm {

OlsFit ols(const Eigen::MatrixXd& x, const Eigen::VectorXd& y) {
    const auto n = x.rows();
    const auto k = x.cols();
    if (y.size() != n || n <= k) throw std::invalid_argument("ill-posed regression");
    const Eigen::MatrixXd xtx = x.transpose() * x;
    Eigen::FullPivLU<Eigen::MatrixXd> lu(xtx);
    if (!lu.isInvertible()) throw std::runtime_error("singular design matrix");
    const Eigen::MatrixXd xtx_inv = lu.inverse();
    OlsFit fit;
    fit.coefficients = xtx_inv * (x.transpose() * y);
    const Eigen::VectorXd resid = y - x * fit.coefficients;
    fit.residual_variance = resid.squaredNorm() / static_cast<double>(n - k);
    fit.standard_errors = (fit.residual_variance * xtx_inv.diagonal().array()).sqrt();
    const double tss = (y.array() - y.mean()).square().sum();
    fit.r_squared = tss > 0.0 ? 1.0 - resid.squaredNorm() / tss : 0.0;
    return fit;
}

Model1Estimate estimate_model1(const std::vector<double>& s_path,
                               const std::vector<double>& z_path, double dt) {
    const std::size_t n = s_path.size();
    if (n != z_path.size() || n < 31) throw std::invalid_argument("need at least 30 observations");
    if (!(dt > 0.0)) throw std::domain_error("dt must be positive");
    const std::size_t m = n - 1;

    Model1Estimate est;
    // sigma from the sample s.d. of oracle log returns.
    {
        double mean = 0.0;
        for (std::size_t k = 0; k < m; ++k) mean += std::log(s_path[k + 1] / s_path[k]);
        mean /= static_cast<double>(m);
        double var = 0.0;
        for (std::size_t k = 0; k < m; ++k) {
            const double d = std::log(s_path[k + 1] / s_path[k]) - mean;
            var += d * d;
        }
        var /= static_cast<double>(m - 1);
        est.sigma = std::sqrt(var / dt);
        est.sigma_se = est.sigma / std::sqrt(2.0 * static_cast<double>(m));
    }

    // Pool regression: dlogZ = -gamma^2/2 dt + beta (S-Z)/Z dt + gamma sqrt(dt) eps.
    Eigen::VectorXd y(m), x(m);
    double x_scale = 0.0;
    for (std::size_t k = 0; k < m; ++k) {
        y[k] = std::log(z_path[k + 1] / z_path[k]);
        x[k] = (s_path[k] - z_path[k]) / z_path[k];
        x_scale = std::max(x_scale, std::abs(x[k]));
    }
    if (x_scale < 1e-14) throw std::runtime_error("beta unidentified: S and Z coincide");

    // Pass 1: free intercept to get the residual scale; pass 2: slope with the
    // intercept constrained to -gamma^2/2 dt.
    Eigen::MatrixXd design(m, 2);
    design.col(0).setOnes();
    design.col(1) = x;
    OlsFit pass1 = ols(design, y);
    double gamma_hat = std::sqrt(std::max(pass1.residual_variance, 0.0) / dt);
    double beta_hat = pass1.coefficients[1] / dt;
    double beta_se = pass1.standard_errors[1] / dt;
    for (int iter = 0; iter < 2; ++iter) {
        const Eigen::VectorXd y_adj = y.array() + 0.5 * gamma_hat * gamma_hat * dt;
        const double sxx = x.squaredNorm();
        const double slope = x.dot(y_adj) / sxx;
        beta_hat = slope / dt;
        const Eigen::VectorXd resid = y_adj - slope * x;
        const double rv = resid.squaredNorm() / static_cast<double>(m - 1);
        gamma_hat = std::sqrt(rv / dt);
        beta_se = std::sqrt(rv / sxx) / dt;
    }
    est.beta = beta_hat;
    est.beta_se = beta_se;
    est.gamma = gamma_hat;
    est.gamma_se = gamma_hat / std::sqrt(2.0 * static_cast<double>(m));
    return est;
}

double pool_fee_rate(double volume_24h, double kappa, double rate, double fee_tier) {
    if (!(kappa > 0.0) || !(rate > 0.0)) throw std::domain_error("kappa and rate must be positive");
    if (volume_24h < 0.0 || fee_tier < 0.0) throw std::domain_error("negative fee inputs");
    return fee_tier * volume_24h / (2.0 * kappa * std::sqrt(rate));
}

VarModel fit_var(const Eigen::MatrixXd& series, int lags) {
    const auto t = series.rows();
    const auto d = series.cols();
    if (lags < 1) throw std::invalid_argument("need at least one lag");
    const auto rows = t - lags;
    const auto cols = d * lags + 1;
    if (rows <= cols) throw std::invalid_argument("too few observations for the VAR order");

    Eigen::MatrixXd x(rows, cols);
    Eigen::MatrixXd y(rows, d);
    for (Eigen::Index r = 0; r < rows; ++r) {
        x(r, 0) = 1.0;
        for (int l = 1; l <= lags; ++l)
            x.block(r, 1 + (l - 1) * d, 1, d) = series.row(lags + r - l);
        y.row(r) = series.row(lags + r);
    }
    const Eigen::MatrixXd xtx = x.transpose() * x;
    Eigen::FullPivLU<Eigen::MatrixXd> lu(xtx);
    if (!lu.isInvertible()) throw std::runtime_error("singular VAR design");
    const Eigen::MatrixXd coef = lu.solve(x.transpose() * y);  // cols x d

    VarModel model;
    model.observations = static_cast<int>(rows);
    model.intercept = coef.row(0).transpose();
    model.phi.resize(lags);
    for (int l = 0; l < lags; ++l)
        model.phi[l] = coef.block(1 + l * d, 0, d, d).transpose();
    const Eigen::MatrixXd resid = y - x * coef;
    model.sigma = resid.transpose() * resid / static_cast<double>(rows - cols);
    return model;
}

MultiOuParams var1_to_multi_ou(const VarModel& model, double dt) {
    if (model.phi.size() != 1) throw std::invalid_argument("conversion requires a VAR(1)");
    if (!(dt > 0.0)) throw std::domain_error("dt must be positive");
    const auto d = model.phi[0].rows();
    const Eigen::MatrixXd i = Eigen::MatrixXd::Identity(d, d);
    MultiOuParams p;
    p.beta = (i - model.phi[0]) / dt;
    p.mu = (i - model.phi[0]).fullPivLu().solve(model.intercept);
    const Eigen::MatrixXd sigma_ou = model.sigma / dt;
    Eigen::LLT<Eigen::MatrixXd> llt(sigma_ou);
    if (llt.info() != Eigen::Success)
        throw std::runtime_error("innovation covariance is not positive definite");
    p.sigma_chol = llt.matrixL();
    p.R0 = p.mu;
    return p;
}

double companion_spectral_radius(const VarModel& model) {
    const auto d = model.phi[0].rows();
    const auto k = static_cast<Eigen::Index>(model.phi.size());
    Eigen::MatrixXd comp = Eigen::MatrixXd::Zero(d * k, d * k);
    for (Eigen::Index l = 0; l < k; ++l) comp.block(0, l * d, d, d) = model.phi[l];
    if (k > 1)
        comp.block(d, 0, d * (k - 1), d * (k - 1)) =
            Eigen::MatrixXd::Identity(d * (k - 1), d * (k - 1));
    return comp.eigenvalues().cwiseAbs().maxCoeff();
}

SpilloverReport spillover(const VarModel& model, int horizon) {
    if (horizon < 0) throw std::invalid_argument("horizon must be nonnegative");
    if (companion_spectral_radius(model) >= 1.0)
        throw std::runtime_error("unstable VAR: spectral radius >= 1");
    const auto d = model.phi[0].rows();
    const auto k = static_cast<int>(model.phi.size());

    // MA coefficients A_0..A_n.
    std::vector<Eigen::MatrixXd> a(horizon + 1);
    a[0] = Eigen::MatrixXd::Identity(d, d);
    for (int h = 1; h <= horizon; ++h) {
        a[h] = Eigen::MatrixXd::Zero(d, d);
        for (int l = 1; l <= std::min(h, k); ++l) a[h] += model.phi[l - 1] * a[h - l];
    }

    SpilloverReport rep;
    rep.horizon = horizon;
    rep.fevd = Eigen::MatrixXd::Zero(d, d);
    const auto& sig = model.sigma;
    for (Eigen::Index i = 0; i < d; ++i) {
        double denom = 0.0;
        for (int h = 0; h <= horizon; ++h)
            denom += (a[h].row(i) * sig * a[h].row(i).transpose())(0, 0);
        for (Eigen::Index j = 0; j < d; ++j) {
            double num = 0.0;
            for (int h = 0; h <= horizon; ++h) {
                const double e = (a[h].row(i) * sig.col(j))(0, 0);
                num += e * e;
            }
            rep.fevd(i, j) = num / (sig(j, j) * denom);
        }
    }
    rep.fevd_normalized = rep.fevd.array().colwise() / rep.fevd.rowwise().sum().array();

    const double total = static_cast<double>(d);  // each normalised row sums to 1
    double cross = 0.0;
    rep.dsi_to = Eigen::VectorXd::Zero(d);
    rep.dsi_from = Eigen::VectorXd::Zero(d);
    for (Eigen::Index i = 0; i < d; ++i)
        for (Eigen::Index j = 0; j < d; ++j) {
            if (i == j) continue;
            cross += rep.fevd_normalized(i, j);
            rep.dsi_to[j] += rep.fevd_normalized(i, j);    // transmitted by j
            rep.dsi_from[i] += rep.fevd_normalized(i, j);  // received by i
        }
    rep.tsi = 100.0 * cross / total;
    rep.dsi_to *= 100.0 / total;
    rep.dsi_from *= 100.0 / total;
    rep.nsi = rep.dsi_to - rep.dsi_from;
    return rep;
}

std::vector<double> ema(const std::vector<double>& series, int span) {
    if (series.empty()) throw std::invalid_argument("empty series");
    if (span < 1) throw std::invalid_argument("span must be >= 1");
    std::vector<double> out(series.size());
    const double keep = static_cast<double>(span - 1) / (span + 1);
    const double mix = 2.0 / (span + 1);
    out[0] = series[0];
    for (std::size_t k = 1; k < series.size(); ++k) out[k] = keep * out[k - 1] + mix * series[k];
    return out;
}

MacdResult compute_macd(const std::vector<double>& series, int span_n) {
    MacdResult r;
    r.ema12 = ema(series, 12);
    r.ema26 = ema(series, 26);
    r.macd.resize(series.size());
    for (std::size_t k = 0; k < series.size(); ++k) r.macd[k] = r.ema12[k] - r.ema26[k];
    r.macd_smoothed = ema(r.macd, span_n);
    return r;
}

}  // namespace amm

#include "amm/hjb.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace amm {

namespace {

// One implicit sweep along the first axis of a (nu x nv) field for the
// operator a(u,v) d_u + d(u) d_uu + q(u,v), with reflected (Neumann) ends:
// solves (I - dt L) out = rhs line by line.
class LineSolver {
public:
    LineSolver(std::size_t n) : lo_(n), di_(n), up_(n), work_(n) {}

    void solve(std::size_t n, const double* adv, const double* diff, const double* q, double dt,
               double h, const double* rhs, double* out) {
        for (std::size_t i = 0; i < n; ++i) {
            const double d = diff[i] / (h * h);
            double a_up = 0.0, a_lo = 0.0;
            if (adv) {
                const double a = adv[i];
                if (i > 0 && i + 1 < n) {
                    a_up = std::max(a, 0.0) / h;
                    a_lo = -std::min(a, 0.0) / h;
                }
            }
            double c_lo = d + a_lo;
            double c_up = d + a_up;
            if (i == 0) c_lo = 0.0;
            if (i + 1 == n) c_up = 0.0;
            // Reflected ghost at the ends, so the edge row of d_uu reduces to
            // (neighbour - this)/h^2 and the diagonal is -(c_lo + c_up).
            const double c_di = -(c_lo + c_up);
            const double qq = q ? q[i] : 0.0;
            lo_[i] = -dt * c_lo;
            di_[i] = 1.0 - dt * (c_di + qq);
            up_[i] = -dt * c_up;
        }
        // Thomas algorithm.
        work_[0] = up_[0] / di_[0];
        out[0] = rhs[0] / di_[0];
        for (std::size_t i = 1; i < n; ++i) {
            const double m = di_[i] - lo_[i] * work_[i - 1];
            work_[i] = up_[i] / m;
            out[i] = (rhs[i] - lo_[i] * out[i - 1]) / m;
        }
        for (std::size_t i = n - 1; i-- > 0;) out[i] -= work_[i] * out[i + 1];
    }

private:
    std::vector<double> lo_, di_, up_, work_;
};

struct FieldOps {
    std::size_t nu, nv;
    double hu, hv;
    std::vector<double> adv_u;   // nu*nv advection along u (empty if none)
    std::vector<double> diff_u;  // nu
    std::vector<double> diff_v;  // nv
    std::vector<double> react_c; // nu*nv multiplier of the reaction coefficient

    std::size_t at(std::size_t ui, std::size_t vi) const { return ui * nv + vi; }
};

// Backward substep of size dt for d_tau theta = L_u + L_v + q theta + src,
// Lie splitting with the u-sweep carrying reaction and source.
void split_step(const FieldOps& ops, const std::vector<double>& q, const std::vector<double>& src,
                double dt, std::vector<double>& theta, LineSolver& su, LineSolver& sv,
                std::vector<double>& tmp) {
    const std::size_t nu = ops.nu, nv = ops.nv;
    std::vector<double> line_rhs(nu), line_out(nu), line_adv(nu), line_q(nu);
    // u-direction: for each v line.
    for (std::size_t vi = 0; vi < nv; ++vi) {
        for (std::size_t ui = 0; ui < nu; ++ui) {
            const std::size_t k = ops.at(ui, vi);
            line_rhs[ui] = theta[k] + dt * (src.empty() ? 0.0 : src[k]);
            line_adv[ui] = ops.adv_u.empty() ? 0.0 : ops.adv_u[k];
            line_q[ui] = q.empty() ? 0.0 : q[k];
        }
        su.solve(nu, ops.adv_u.empty() ? nullptr : line_adv.data(), ops.diff_u.data(),
                 q.empty() ? nullptr : line_q.data(), dt, ops.hu, line_rhs.data(), line_out.data());
        for (std::size_t ui = 0; ui < nu; ++ui) tmp[ops.at(ui, vi)] = line_out[ui];
    }
    // v-direction: for each u line.
    std::vector<double> vrhs(nv), vout(nv);
    for (std::size_t ui = 0; ui < nu; ++ui) {
        for (std::size_t vi = 0; vi < nv; ++vi) vrhs[vi] = tmp[ops.at(ui, vi)];
        sv.solve(nv, nullptr, ops.diff_v.data(), nullptr, dt, ops.hv, vrhs.data(), vout.data());
        for (std::size_t vi = 0; vi < nv; ++vi) theta[ops.at(ui, vi)] = vout[vi];
    }
}

struct ModelFields {
    FieldOps ops;
    std::vector<double> theta2_src;  // -phi
    std::vector<double> theta1_src;  // beta (S - Z) for Model I, zero otherwise
};

ModelFields build_model1_fields(const ModelIParams& p, const LiquidationConfig& cfg,
                                const Grid3D& g) {
    ModelFields f;
    const std::size_t nu = g.u.size(), nv = g.v.size();
    f.ops.nu = nu;
    f.ops.nv = nv;
    f.ops.hu = g.u[1] - g.u[0];
    f.ops.hv = g.v[1] - g.v[0];
    f.ops.adv_u.resize(nu * nv);
    f.ops.diff_u.resize(nu);
    f.ops.diff_v.resize(nv);
    f.ops.react_c.resize(nu * nv);
    f.theta2_src.assign(nu * nv, -cfg.phi);
    f.theta1_src.resize(nu * nv);
    for (std::size_t ui = 0; ui < nu; ++ui) f.ops.diff_u[ui] = 0.5 * p.gamma * p.gamma * g.u[ui] * g.u[ui];
    for (std::size_t vi = 0; vi < nv; ++vi) f.ops.diff_v[vi] = 0.5 * p.sigma * p.sigma * g.v[vi] * g.v[vi];
    for (std::size_t ui = 0; ui < nu; ++ui)
        for (std::size_t vi = 0; vi < nv; ++vi) {
            const double z = g.u[ui], s = g.v[vi];
            f.ops.adv_u[f.ops.at(ui, vi)] = p.beta * (s - z);
            f.ops.react_c[f.ops.at(ui, vi)] = cfg.kappa / cfg.eta * std::pow(z, -1.5);
            f.theta1_src[f.ops.at(ui, vi)] = p.beta * (s - z);
        }
    return f;
}

ModelFields build_model2_fields(const ModelIIParams& p, const LiquidationConfig& cfg,
                                const Grid3D& g) {
    ModelFields f;
    const std::size_t nu = g.u.size(), nv = g.v.size();
    f.ops.nu = nu;
    f.ops.nv = nv;
    f.ops.hu = g.u[1] - g.u[0];
    f.ops.hv = g.v[1] - g.v[0];
    f.ops.diff_u.resize(nu);
    f.ops.diff_v.resize(nv);
    f.ops.react_c.resize(nu * nv);
    f.theta2_src.assign(nu * nv, -cfg.phi);
    for (std::size_t ui = 0; ui < nu; ++ui) f.ops.diff_u[ui] = 0.5 * p.gamma * p.gamma * g.u[ui] * g.u[ui];
    for (std::size_t vi = 0; vi < nv; ++vi)
        f.ops.diff_v[vi] = 0.5 * p.varsigma * p.varsigma * g.v[vi] * g.v[vi];
    for (std::size_t ui = 0; ui < nu; ++ui)
        for (std::size_t vi = 0; vi < nv; ++vi)
            f.ops.react_c[f.ops.at(ui, vi)] = g.v[vi] / cfg.eta * std::pow(g.u[ui], -1.5);
    return f;
}

PdeSolution solve_generic(ModelFields f, const LiquidationConfig& cfg, const Grid3D& grid,
                          const HjbOptions& opt) {
    const std::size_t nt = grid.t.size(), nu = grid.u.size(), nv = grid.v.size();
    if (nt < 3 || nu < 3 || nv < 3) throw std::domain_error("need at least 3 nodes per axis");

    PdeSolution sol;
    sol.grid = grid;
    sol.theta0.assign(nt * nu * nv, 0.0);
    sol.theta1.assign(nt * nu * nv, 0.0);
    sol.theta2.assign(nt * nu * nv, 0.0);
    sol.picard_iterations.assign(nt, 0);

    std::vector<double> th2(nu * nv, -cfg.alpha), th1(nu * nv, 0.0), th0(nu * nv, 0.0);
    for (std::size_t k = 0; k < nu * nv; ++k) sol.theta2[(nt - 1) * nu * nv + k] = -cfg.alpha;

    LineSolver su(nu), sv(nv);
    std::vector<double> tmp(nu * nv), q(nu * nv), src(nu * nv), prev(nu * nv), cand(nu * nv);

    const double cmax = *std::max_element(f.ops.react_c.begin(), f.ops.react_c.end());

    for (std::size_t level = nt - 1; level-- > 0;) {
        const double dt_full = grid.t[level + 1] - grid.t[level];
        // Substep plan: geometric refinement on the first backward interval
        // (terminal layer), then enough uniform substeps to keep the Picard
        // linearisation contractive.
        std::vector<double> steps;
        if (level == nt - 2 && opt.terminal_substeps > 1) {
            double h = dt_full * 1e-4;
            double acc = 0.0;
            while (acc + h < dt_full) {
                steps.push_back(h);
                acc += h;
                h *= 1.4;
            }
            steps.push_back(dt_full - acc);
        } else {
            double m = 1.0;
            const double th2max = std::max(1.0, -*std::min_element(th2.begin(), th2.end()));
            m = std::ceil(dt_full * th2max * cmax / 0.25);
            const int msteps = std::max(1, static_cast<int>(std::min(m, 4096.0)));
            steps.assign(msteps, dt_full / msteps);
        }

        int iters_total = 0;
        for (double h : steps) {
            // theta2: Picard on the quadratic term.
            prev = th2;
            double residual = 0.0;
            int it = 0;
            for (; it < opt.picard_max_iters; ++it) {
                for (std::size_t k = 0; k < nu * nv; ++k) q[k] = f.ops.react_c[k] * prev[k];
                cand = th2;
                split_step(f.ops, q, f.theta2_src, h, cand, su, sv, tmp);
                residual = 0.0;
                for (std::size_t k = 0; k < nu * nv; ++k)
                    residual = std::max(residual, std::abs(cand[k] - prev[k]));
                prev = cand;
                if (residual < opt.picard_tol) break;
            }
            ++it;
            iters_total += it;
            if (residual >= opt.picard_tol)
                throw std::runtime_error("Picard iteration did not converge; last residual " +
                                         std::to_string(residual));
            sol.final_picard_residual = residual;
            th2 = prev;

            // theta1: linear, reaction c * theta2.
            for (std::size_t k = 0; k < nu * nv; ++k) q[k] = f.ops.react_c[k] * th2[k];
            split_step(f.ops, q, f.theta1_src, h, th1, su, sv, tmp);

            // theta0: source c/4 * theta1^2.
            for (std::size_t k = 0; k < nu * nv; ++k)
                src[k] = 0.25 * f.ops.react_c[k] * th1[k] * th1[k];
            split_step(f.ops, {}, src, h, th0, su, sv, tmp);
        }
        sol.picard_iterations[level] = iters_total;
        std::copy(th2.begin(), th2.end(), sol.theta2.begin() + level * nu * nv);
        std::copy(th1.begin(), th1.end(), sol.theta1.begin() + level * nu * nv);
        std::copy(th0.begin(), th0.end(), sol.theta0.begin() + level * nu * nv);
    }
    return sol;
}

double trilinear(const std::vector<double>& field, const Grid3D& g, double t, double u, double v,
                 bool& clamped) {
    auto locate = [&clamped](const std::vector<double>& axis, double x, std::size_t& i, double& w) {
        if (x < axis.front()) { x = axis.front(); clamped = true; }
        if (x > axis.back()) { x = axis.back(); clamped = true; }
        auto it = std::upper_bound(axis.begin(), axis.end(), x);
        i = static_cast<std::size_t>(std::max<std::ptrdiff_t>(0, it - axis.begin() - 1));
        if (i >= axis.size() - 1) i = axis.size() - 2;
        w = (x - axis[i]) / (axis[i + 1] - axis[i]);
    };
    std::size_t ti, ui, vi;
    double wt, wu, wv;
    locate(g.t, t, ti, wt);
    locate(g.u, u, ui, wu);
    locate(g.v, v, vi, wv);
    const std::size_t nu = g.u.size(), nv = g.v.size();
    auto at = [&](std::size_t a, std::size_t b, std::size_t c) {
        return field[(a * nu + b) * nv + c];
    };
    double out = 0.0;
    for (int dt_ = 0; dt_ < 2; ++dt_)
        for (int du_ = 0; du_ < 2; ++du_)
            for (int dv_ = 0; dv_ < 2; ++dv_) {
                const double w = (dt_ ? wt : 1 - wt) * (du_ ? wu : 1 - wu) * (dv_ ? wv : 1 - wv);
                out += w * at(ti + dt_, ui + du_, vi + dv_);
            }
    return out;
}

}  // namespace

Grid3D Grid3D::make(double T, int nt, double u_lo, double u_hi, int nu, double v_lo, double v_hi,
                    int nv) {
    if (nt < 3 || nu < 3 || nv < 3) throw std::domain_error("need at least 3 nodes per axis");
    Grid3D g;
    g.t.resize(nt);
    g.u.resize(nu);
    g.v.resize(nv);
    for (int i = 0; i < nt; ++i) g.t[i] = T * static_cast<double>(i) / (nt - 1);
    for (int i = 0; i < nu; ++i) g.u[i] = u_lo + (u_hi - u_lo) * static_cast<double>(i) / (nu - 1);
    for (int i = 0; i < nv; ++i) g.v[i] = v_lo + (v_hi - v_lo) * static_cast<double>(i) / (nv - 1);
    return g;
}

PdeSolution solve_model1_pde(const ModelIParams& params, const LiquidationConfig& config,
                             const Grid3D& grid, const HjbOptions& options) {
    return solve_generic(build_model1_fields(params, config, grid), config, grid, options);
}

PdeSolution solve_model2_pde(const ModelIIParams& params, const LiquidationConfig& config,
                             const Grid3D& grid, const HjbOptions& options) {
    return solve_generic(build_model2_fields(params, config, grid), config, grid, options);
}

SpeedResult feedback_speed_from_solution(const PdeSolution& sol, HjbModel which,
                                         const LiquidationConfig& config, double t, double y,
                                         double u, double v) {
    SpeedResult r;
    bool clamped = false;
    const double th2 = trilinear(sol.theta2, sol.grid, t, u, v, clamped);
    const double th1 = trilinear(sol.theta1, sol.grid, t, u, v, clamped);
    const double depth = (which == HjbModel::ModelI) ? config.kappa : v;
    r.nu = -(depth / (2.0 * config.eta)) * std::pow(u, -1.5) * (2.0 * th2 * y + th1);
    r.clamped = clamped;
    return r;
}

MertonCoefficients merton_envelope(const ModelIParams& params, const LiquidationConfig& config,
                                   double t) {
    const double T = config.T;
    if (t > T) throw std::domain_error("t outside [0, T]");
    const double beta = params.beta, sigma = params.sigma, gamma = params.gamma, phi = config.phi;
    if (!(phi > 0.0)) throw std::domain_error("Merton envelope needs phi > 0");
    auto rhs = [&](const MertonCoefficients& m, MertonCoefficients& d) {
        d.a = -sigma * sigma * m.a - beta * beta / (4.0 * phi) - 0.5 * beta * m.b;
        d.b = beta * m.b + beta * beta / phi - 4.0 * beta * m.c;
        d.c = -(gamma * gamma - 2.0 * beta) * m.c - beta * beta / (4.0 * phi);
    };
    MertonCoefficients m{0.0, 0.0, 0.0};
    const int n = 20000;
    const double h = -(T - t) / n;
    for (int k = 0; k < n; ++k) {
        MertonCoefficients k1, k2, k3, k4, tmp;
        rhs(m, k1);
        tmp = {m.a + 0.5 * h * k1.a, m.b + 0.5 * h * k1.b, m.c + 0.5 * h * k1.c};
        rhs(tmp, k2);
        tmp = {m.a + 0.5 * h * k2.a, m.b + 0.5 * h * k2.b, m.c + 0.5 * h * k2.c};
        rhs(tmp, k3);
        tmp = {m.a + h * k3.a, m.b + h * k3.b, m.c + h * k3.c};
        rhs(tmp, k4);
        m.a += h / 6.0 * (k1.a + 2 * k2.a + 2 * k3.a + k4.a);
        m.b += h / 6.0 * (k1.b + 2 * k2.b + 2 * k3.b + k4.b);
        m.c += h / 6.0 * (k1.c + 2 * k2.c + 2 * k3.c + k4.c);
    }
    return m;
}

double merton_c_closed_form(const ModelIParams& params, const LiquidationConfig& config,
                            double t) {
    const double a = params.gamma * params.gamma - 2.0 * params.beta;
    const double k = params.beta * params.beta / (4.0 * config.phi * a);
    return -k * (1.0 - std::exp(a * (config.T - t)));
}

BoundsReport verify_bounds(const PdeSolution& sol, HjbModel which, const ModelIParams& params,
                           const LiquidationConfig& config) {
    BoundsReport rep;
    const auto& g = sol.grid;
    const std::size_t nt = g.t.size(), nu = g.u.size(), nv = g.v.size();
    for (std::size_t ti = 0; ti < nt; ++ti) {
        const double lower = -config.alpha - config.phi * (config.T - g.t[ti]);
        MertonCoefficients m{};
        if (which == HjbModel::ModelI) m = merton_envelope(params, config, g.t[ti]);
        const double ezt_decay = std::exp(-params.beta * (config.T - g.t[ti]));
        for (std::size_t ui = 0; ui < nu; ++ui)
            for (std::size_t vi = 0; vi < nv; ++vi) {
                const std::size_t k = sol.idx(ti, ui, vi);
                const double th2 = sol.theta2[k], th1 = sol.theta1[k], th0 = sol.theta0[k];
                rep.lower_violation = std::max(rep.lower_violation, lower - th2);
                if (which == HjbModel::ModelII) {
                    rep.upper_violation = std::max(rep.upper_violation, th2);
                    rep.theta1_upper_violation = std::max(rep.theta1_upper_violation, std::abs(th1));
                    rep.theta0_upper_violation = std::max(rep.theta0_upper_violation, std::abs(th0));
                } else {
                    const double z = g.u[ui], s = g.v[vi];
                    const double quad = m.a * s * s + 0.5 * m.b * s * z + m.c * z * z;
                    const double ezt = z * ezt_decay + s * (1.0 - ezt_decay);
                    rep.upper_violation = std::max(rep.upper_violation, th2 - quad);
                    rep.theta1_upper_violation =
                        std::max(rep.theta1_upper_violation, th1 - (quad - lower));
                    rep.theta1_lower_violation = std::max(
                        rep.theta1_lower_violation, (-z + ezt + lower - quad) - th1);
                    rep.theta0_lower_violation = std::max(rep.theta0_lower_violation, -th0);
                    rep.theta0_upper_violation = std::max(rep.theta0_upper_violation, th0 - quad);
                }
            }
    }
    return rep;
}

}  // namespace amm

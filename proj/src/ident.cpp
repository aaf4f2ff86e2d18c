#include "hgsim/ident.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

#include <unsupported/Eigen/MatrixFunctions>

#include "hgsim/errors.hpp"
#include "hgsim/parallel.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace hgsim {

std::array<double, IdentTheta::kCount> IdentTheta::to_array() const {
    return {a1, a2, a4, t_p, K_d, K_hf};
}

IdentTheta IdentTheta::from_array(const std::array<double, kCount>& v) {
    IdentTheta t;
    t.a1 = v[0];
    t.a2 = v[1];
    t.a4 = v[2];
    t.t_p = v[3];
    t.K_d = v[4];
    t.K_hf = v[5];
    return t;
}

const std::array<const char*, IdentTheta::kCount>& IdentTheta::names() {
    static const std::array<const char*, kCount> n{"a1", "a2",  "a4",
                                                   "t_p", "K_d", "K_hf"};
    return n;
}

ParamBounds ParamBounds::defaults() {
    ParamBounds b;
    b.lo = {0.0, 0.0, 3.0, 0.01, 1.0, 0.0};
    b.hi = {0.5, 0.1, 5.0, 0.30, 5.0, 1.0};
    return b;
}

void ParamBounds::validate() const {
    for (int j = 0; j < IdentTheta::kCount; ++j) {
        if (!std::isfinite(lo[j]) || !std::isfinite(hi[j]) || !(lo[j] < hi[j]))
            throw ConfigError(std::string("invalid bounds for parameter '") +
                              IdentTheta::names()[j] + "'");
    }
}

bool ParamBounds::contains(const IdentTheta& t) const {
    const auto v = t.to_array();
    for (int j = 0; j < IdentTheta::kCount; ++j)
        if (v[j] < lo[j] || v[j] > hi[j]) return false;
    return true;
}

IdentTheta ParamBounds::project(const IdentTheta& t) const {
    auto v = t.to_array();
    for (int j = 0; j < IdentTheta::kCount; ++j)
        v[j] = std::clamp(v[j], lo[j], hi[j]);
    return IdentTheta::from_array(v);
}

void IdentProblem::validate() const {
    const std::size_t n = e_y.size();
    if (n < 100) throw ConfigError("identification needs at least 100 samples");
    if (e_theta.size() != n || phi.size() != n || T_h.size() != n ||
        T_d.size() != n || phi_meas.size() != n)
        throw ConfigError("identification series have unequal lengths");
    if (!(sample_rate > 0.0)) throw ConfigError("sample_rate must be positive");
    bounds.validate();
    if (!bounds.contains(theta0))
        throw ConfigError("theta0 lies outside the parameter bounds");
    if (!(fixed.t_nms > 0.0) || !(fixed.K_nms >= 0.0))
        throw ConfigError("fixed neuromuscular parameters must be positive");
    for (double w : output_weights)
        if (!std::isfinite(w)) throw ConfigError("output weights must be finite");
}

StateSpace realize_statespace(const IdentTheta& th, const FixedNeuromuscular& fx) {
    if (!(th.t_p > 0.0)) throw ConfigError("t_p must be positive");
    if (!(fx.t_nms > 0.0)) throw ConfigError("t_nms must be positive");
    for (double v : th.to_array())
        if (!std::isfinite(v)) throw ConfigError("non-finite parameter value");

    // Visual command u_pre = -(a1 e_y + a2 x1) + a4 e_theta feeds the
    // first-order Pade delay (state x2, output phi' = 2 x2 - u_pre); the
    // neuromuscular block turns the delayed target into driver torque:
    //   x3' = (T* - x3)/t_nms,  T* = (K_d + K_nms) phi' - K_nms phi - K_hf T_h.
    const double c = 2.0 / th.t_p;
    const double g = (th.K_d + fx.K_nms) / fx.t_nms;

    StateSpace ss;
    ss.A = Eigen::MatrixXd::Zero(3, 3);
    ss.B = Eigen::MatrixXd::Zero(3, 4);
    ss.C = Eigen::MatrixXd::Zero(2, 3);
    ss.D = Eigen::MatrixXd::Zero(2, 4);

    // x1' = e_y
    ss.B(0, 0) = 1.0;
    // x2' = c (u_pre - x2)
    ss.A(1, 0) = -th.a2 * c;
    ss.A(1, 1) = -c;
    ss.B(1, 0) = -th.a1 * c;
    ss.B(1, 1) = th.a4 * c;
    // x3' = g (2 x2 + a1 e_y + a2 x1 - a4 e_theta) - (K_nms phi + K_hf T_h + x3)/t_nms
    ss.A(2, 0) = th.a2 * g;
    ss.A(2, 1) = 2.0 * g;
    ss.A(2, 2) = -1.0 / fx.t_nms;
    ss.B(2, 0) = th.a1 * g;
    ss.B(2, 1) = -th.a4 * g;
    ss.B(2, 2) = -fx.K_nms / fx.t_nms;
    ss.B(2, 3) = -th.K_hf / fx.t_nms;

    // y1 = T_d = x3
    ss.C(0, 2) = 1.0;
    // y2 = phi' = 2 x2 + a1 e_y + a2 x1 - a4 e_theta
    ss.C(1, 0) = th.a2;
    ss.C(1, 1) = 2.0;
    ss.D(1, 0) = th.a1;
    ss.D(1, 1) = -th.a4;
    return ss;
}

StateSpace discretize(const StateSpace& cont, double dt) {
    if (!(dt > 0.0)) throw ConfigError("discretization step must be positive");
    const long n = cont.A.rows();
    const long m = cont.B.cols();
    Eigen::MatrixXd aug = Eigen::MatrixXd::Zero(n + m, n + m);
    aug.topLeftCorner(n, n) = cont.A;
    aug.topRightCorner(n, m) = cont.B;
    const Eigen::MatrixXd e = (aug * dt).exp();

    StateSpace disc;
    disc.A = e.topLeftCorner(n, n);
    disc.B = e.topRightCorner(n, m);
    disc.C = cont.C;
    disc.D = cont.D;
    return disc;
}

void simulate_discrete(const StateSpace& disc, const IdentProblem& p,
                       std::vector<double>& out_Td, std::vector<double>& out_phi) {
    const std::size_t n = p.size();
    out_Td.resize(n);
    out_phi.resize(n);

    // Fixed-size copies keep the per-sample arithmetic allocation-free.
    const Eigen::Matrix3d A = disc.A;
    const Eigen::Matrix<double, 3, 4> B = disc.B;
    const Eigen::Matrix<double, 2, 3> C = disc.C;
    const Eigen::Matrix<double, 2, 4> D = disc.D;

    Eigen::Vector3d x = Eigen::Vector3d::Zero();
    Eigen::Vector4d u;
    for (std::size_t k = 0; k < n; ++k) {
        u << p.e_y[k], p.e_theta[k], p.phi[k], p.T_h[k];
        const Eigen::Vector2d y = C * x + D * u;
        out_Td[k] = y(0);
        out_phi[k] = y(1);
        x = A * x + B * u;
    }
}

double fit_percent(const std::vector<double>& y, const std::vector<double>& yhat) {
    if (y.empty() || y.size() != yhat.size())
        throw ConfigError("fit_percent needs equal-length non-empty series");
    const double mean = std::accumulate(y.begin(), y.end(), 0.0) /
                        static_cast<double>(y.size());
    double num = 0.0, den = 0.0;
    for (std::size_t k = 0; k < y.size(); ++k) {
        num += (y[k] - yhat[k]) * (y[k] - yhat[k]);
        den += (y[k] - mean) * (y[k] - mean);
    }
    if (!(den > 0.0))
        throw ConfigError("degenerate data: output series is constant");
    return 100.0 * (1.0 - std::sqrt(num) / std::sqrt(den));
}

namespace {

constexpr double kLambda0 = 1e-3;
constexpr double kLambdaShrink = 0.3;
constexpr double kLambdaGrow = 10.0;
constexpr double kLambdaMax = 1e14;

double series_variance(const std::vector<double>& y) {
    const double mean = std::accumulate(y.begin(), y.end(), 0.0) /
                        static_cast<double>(y.size());
    double ss = 0.0;
    for (double v : y) ss += (v - mean) * (v - mean);
    return ss / static_cast<double>(y.size() - 1);
}

// Weighted squared prediction error over both channels; +inf if the model
// response is non-finite (diverged realization).
struct Evaluator {
    const IdentProblem& p;
    double dt;
    double w0, w1;
    mutable std::vector<double> yTd, yphi;  // scratch, reused across calls

    double loss(const IdentTheta& th) const {
        const StateSpace disc = discretize(realize_statespace(th, p.fixed), dt);
        simulate_discrete(disc, p, yTd, yphi);
        double L = 0.0;
        for (std::size_t k = 0; k < p.size(); ++k) {
            const double r0 = yTd[k] - p.T_d[k];
            const double r1 = yphi[k] - p.phi_meas[k];
            L += w0 * r0 * r0 + w1 * r1 * r1;
        }
        return std::isfinite(L) ? L : std::numeric_limits<double>::infinity();
    }
};

struct StartOutcome {
    IdentTheta theta;
    double loss = std::numeric_limits<double>::infinity();
    int iterations = 0;
    bool converged = false;
    std::vector<IterRecord> trace;
};

// One damped Gauss-Newton descent from `start`, projected onto the bounds.
StartOutcome gauss_newton(const Evaluator& ev, const IdentProblem& p,
                          const IdentTheta& start, const PemOptions& opt) {
    constexpr int NP = IdentTheta::kCount;
    const std::size_t N = p.size();

    StartOutcome out;
    IdentTheta theta = p.bounds.project(start);
    double L = ev.loss(theta);
    if (!std::isfinite(L)) return out;  // diverged at the start point: give up

    Eigen::MatrixXd J0(N, NP), J1(N, NP);       // per-channel Jacobians
    Eigen::VectorXd r0(N), r1(N);               // residuals at theta
    Eigen::Matrix<double, NP, NP> H;
    Eigen::Matrix<double, NP, 1> grad;
    std::vector<double> pTd, pphi;

    double lambda = kLambda0;
    bool model_dirty = true;
    int iter = 0;
    while (iter < opt.max_iters) {
        if (model_dirty) {
            const StateSpace disc =
                discretize(realize_statespace(theta, p.fixed), ev.dt);
            simulate_discrete(disc, p, pTd, pphi);
            for (std::size_t k = 0; k < N; ++k) {
                r0(static_cast<long>(k)) = pTd[k] - p.T_d[k];
                r1(static_cast<long>(k)) = pphi[k] - p.phi_meas[k];
            }
            // Central finite differences, one column per free parameter.
            auto v = theta.to_array();
            for (int j = 0; j < NP; ++j) {
                const double width = p.bounds.hi[j] - p.bounds.lo[j];
                const double h = 1e-6 * std::max(std::abs(v[j]), 0.01 * width);
                auto vp = v, vm = v;
                vp[j] += h;
                vm[j] -= h;
                std::vector<double> yTp, ypp, yTm, ypm;
                simulate_discrete(
                    discretize(realize_statespace(IdentTheta::from_array(vp),
                                                  p.fixed),
                               ev.dt),
                    p, yTp, ypp);
                simulate_discrete(
                    discretize(realize_statespace(IdentTheta::from_array(vm),
                                                  p.fixed),
                               ev.dt),
                    p, yTm, ypm);
                const double inv2h = 1.0 / (2.0 * h);
                for (std::size_t k = 0; k < N; ++k) {
                    J0(static_cast<long>(k), j) = (yTp[k] - yTm[k]) * inv2h;
                    J1(static_cast<long>(k), j) = (ypp[k] - ypm[k]) * inv2h;
                }
            }
            H = ev.w0 * (J0.transpose() * J0) + ev.w1 * (J1.transpose() * J1);
            grad = ev.w0 * (J0.transpose() * r0) + ev.w1 * (J1.transpose() * r1);
            model_dirty = false;
        }

        // Levenberg-style damping on the Gauss-Newton normal equations.
        Eigen::Matrix<double, NP, NP> Hd = H;
        const double diag_floor = 1e-12 * std::max(1.0, H.diagonal().maxCoeff());
        for (int j = 0; j < NP; ++j)
            Hd(j, j) += lambda * std::max(H(j, j), diag_floor);
        const Eigen::Matrix<double, NP, 1> step = Hd.ldlt().solve(-grad);

        // Effective step after projecting onto the bounds box.
        auto v = theta.to_array();
        std::array<double, NP> v_try{};
        Eigen::Matrix<double, NP, 1> eff;
        for (int j = 0; j < NP; ++j) {
            v_try[j] = std::clamp(v[j] + step(j), p.bounds.lo[j], p.bounds.hi[j]);
            eff(j) = v_try[j] - v[j];
        }
        // Predicted decrease of the quadratic model ||r + J eff||^2_W.
        const double predicted =
            -(2.0 * grad.dot(eff) + eff.dot(H * eff));

        ++iter;
        if (predicted <= opt.rel_improvement_tol * L) {
            out.converged = true;
            out.trace.push_back({iter, L, lambda, 0.0, false});
            break;
        }

        const IdentTheta theta_try = IdentTheta::from_array(v_try);
        const double L_try = ev.loss(theta_try);
        if (std::isfinite(L_try) && L_try < L) {
            theta = theta_try;
            L = L_try;
            lambda = std::max(lambda * kLambdaShrink, 1e-12);
            model_dirty = true;
            out.trace.push_back({iter, L, lambda, eff.norm(), true});
        } else {
            lambda *= kLambdaGrow;
            out.trace.push_back({iter, L, lambda, 0.0, false});
            if (lambda > kLambdaMax) break;  // stalled: no usable descent left
        }
    }

    out.theta = theta;
    out.loss = L;
    out.iterations = iter;
    return out;
}

// theta0 plus (starts-1) Latin-hypercube points inside the bounds box, drawn
// from a fixed-seed generator so runs are reproducible.
std::vector<IdentTheta> make_starts(const IdentProblem& p, const PemOptions& opt) {
    std::vector<IdentTheta> starts;
    starts.push_back(p.bounds.project(p.theta0));
    const int extra = std::max(0, opt.starts - 1);
    if (extra == 0) return starts;

    std::mt19937 gen(opt.rng_seed);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    std::array<std::vector<int>, IdentTheta::kCount> strata;
    for (int j = 0; j < IdentTheta::kCount; ++j) {
        strata[j].resize(static_cast<std::size_t>(extra));
        std::iota(strata[j].begin(), strata[j].end(), 0);
        std::shuffle(strata[j].begin(), strata[j].end(), gen);
    }
    for (int i = 0; i < extra; ++i) {
        std::array<double, IdentTheta::kCount> v{};
        for (int j = 0; j < IdentTheta::kCount; ++j) {
            const double width = p.bounds.hi[j] - p.bounds.lo[j];
            const double cell = (strata[j][static_cast<std::size_t>(i)] + unif(gen)) /
                                static_cast<double>(extra);
            v[j] = p.bounds.lo[j] + cell * width;
        }
        starts.push_back(IdentTheta::from_array(v));
    }
    return starts;
}

IdentResult aggregate(const Evaluator& ev, const IdentProblem& p,
                      std::vector<StartOutcome>& outcomes) {
    int best = -1;
    for (int i = 0; i < static_cast<int>(outcomes.size()); ++i) {
        if (!std::isfinite(outcomes[static_cast<std::size_t>(i)].loss)) continue;
        if (best < 0 || outcomes[static_cast<std::size_t>(i)].loss <
                            outcomes[static_cast<std::size_t>(best)].loss)
            best = i;  // strict <: ties resolve to the first start
    }
    if (best < 0)
        throw DynamicsError("prediction-error loss non-finite at every start", 0.0);

    StartOutcome& win = outcomes[static_cast<std::size_t>(best)];
    IdentResult res;
    res.theta_hat = win.theta;
    res.final_loss = win.loss;
    res.iterations = win.iterations;
    res.converged = win.converged;
    res.best_start = best;
    res.trace = std::move(win.trace);

    const StateSpace disc =
        discretize(realize_statespace(res.theta_hat, p.fixed), ev.dt);
    simulate_discrete(disc, p, res.pred_Td, res.pred_phi);
    res.fit_Td = fit_percent(p.T_d, res.pred_Td);
    res.fit_phi = fit_percent(p.phi_meas, res.pred_phi);
    return res;
}

Evaluator make_evaluator(const IdentProblem& p) {
    const double var_Td = series_variance(p.T_d);
    const double var_phi = series_variance(p.phi_meas);
    if (!(var_Td > 1e-30) || !(var_phi > 1e-30))
        throw ConfigError("degenerate data: an output channel is constant");
    const double w0 = p.output_weights[0] > 0.0 ? p.output_weights[0] : 1.0 / var_Td;
    const double w1 = p.output_weights[1] > 0.0 ? p.output_weights[1] : 1.0 / var_phi;
    return Evaluator{p, 1.0 / p.sample_rate, w0, w1, {}, {}};
}

}  // namespace

IdentResult pem_fit_serial(const IdentProblem& p, const PemOptions& opt) {
    p.validate();
    const Evaluator ev = make_evaluator(p);
    const std::vector<IdentTheta> starts = make_starts(p, opt);
    std::vector<StartOutcome> outcomes(starts.size());
    for (std::size_t i = 0; i < starts.size(); ++i)
        outcomes[i] = gauss_newton(ev, p, starts[i], opt);
    return aggregate(ev, p, outcomes);
}

IdentResult pem_fit(const IdentProblem& p, const PemOptions& opt) {
    p.validate();
    const Evaluator ev = make_evaluator(p);
    const std::vector<IdentTheta> starts = make_starts(p, opt);
    std::vector<StartOutcome> outcomes(starts.size());
    const int n_threads = resolve_threads(opt.threads);
#ifdef _OPENMP
#pragma omp parallel for num_threads(n_threads) schedule(dynamic)
#endif
    for (long long i = 0; i < static_cast<long long>(starts.size()); ++i) {
        // Each start owns a private evaluator so the scratch buffers do not race.
        Evaluator local = ev;
        outcomes[static_cast<std::size_t>(i)] =
            gauss_newton(local, p, starts[static_cast<std::size_t>(i)], opt);
    }
    (void)n_threads;
    return aggregate(ev, p, outcomes);
}

}  // namespace hgsim

#include "fallowopt/model.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <string>
#include <type_traits>

#include "fallowopt/errors.hpp"

namespace fallowopt {

namespace {

using State = std::array<double, 4>;  // P, S, X, Y

constexpr double kUndershootTolerance = 1e-9;

SeasonState to_state(const State& y) { return {y[0], y[1], y[2], y[3]}; }

// Phase-specific right-hand side with the parameter products folded in.
struct Rhs {
    Rhs(const ModelParams& p, bool growth)
        : params(p),
          in_growth(growth),
          beta(p.beta),
          births_out(p.alpha * p.a * (1.0 - p.gamma)),
          births_in(p.alpha * p.a * p.gamma),
          consumption(p.a),
          omega(p.omega),
          mu(p.mu),
          delta(p.delta),
          rho(growth ? p.rho : 0.0),
          inv_k(1.0 / p.cap_k),
          m(growth ? 0.0 : p.m) {}

    void operator()(const State& y, State& dydt) const {
        const double feeding = y[1] * y[2] / (y[1] + delta);
        const double infestation = beta * y[0] * y[1];
        dydt[0] = -infestation + births_out * feeding - omega * y[0];
        dydt[1] = rho * y[1] * (1.0 - y[1] * inv_k) - consumption * feeding;
        dydt[2] = infestation + births_in * feeding - mu * y[2];
        dydt[3] = m * y[1];
    }

    const ModelParams& params;
    bool in_growth;
    double beta, births_out, births_in, consumption, omega, mu, delta, rho, inv_k, m;
};

// Dormand-Prince 5(4) tableau.
namespace dp {
constexpr double a21 = 1.0 / 5.0;
constexpr double a31 = 3.0 / 40.0, a32 = 9.0 / 40.0;
constexpr double a41 = 44.0 / 45.0, a42 = -56.0 / 15.0, a43 = 32.0 / 9.0;
constexpr double a51 = 19372.0 / 6561.0, a52 = -25360.0 / 2187.0, a53 = 64448.0 / 6561.0,
                 a54 = -212.0 / 729.0;
constexpr double a61 = 9017.0 / 3168.0, a62 = -355.0 / 33.0, a63 = 46732.0 / 5247.0,
                 a64 = 49.0 / 176.0, a65 = -5103.0 / 18656.0;
constexpr double b1 = 35.0 / 384.0, b3 = 500.0 / 1113.0, b4 = 125.0 / 192.0,
                 b5 = -2187.0 / 6784.0, b6 = 11.0 / 84.0;
constexpr double e1 = 71.0 / 57600.0, e3 = -71.0 / 16695.0, e4 = 71.0 / 1920.0,
                 e5 = -17253.0 / 339200.0, e6 = 22.0 / 525.0, e7 = -1.0 / 40.0;
}  // namespace dp

// Clamps undershoots in (-tol, 0) to zero. Returns true if anything changed.
bool clamp_state(State& y, double t_prev) {
    bool changed = false;
    for (double& v : y) {
        if (!std::isfinite(v)) throw NumericalFailure("state became non-finite", t_prev);
        if (v < 0.0) {
            if (v < -kUndershootTolerance)
                throw NumericalFailure("state component dropped below zero (" + std::to_string(v) + ")",
                                       t_prev);
            v = 0.0;
            changed = true;
        }
    }
    return changed;
}

double error_norm(const State& err, const State& y0, const State& y1, const SolverConfig& solver) {
    double sum = 0.0;
    for (std::size_t i = 0; i < err.size(); ++i) {
        const double sc = solver.abs_tol + solver.rel_tol * std::max(std::abs(y0[i]), std::abs(y1[i]));
        sum += (err[i] / sc) * (err[i] / sc);
    }
    const double norm = std::sqrt(sum / static_cast<double>(err.size()));
    return std::isfinite(norm) ? norm : 1e10;
}

// Explicit Dormand-Prince 5(4) with first-same-as-last reuse.
class DormandPrince {
public:
    static constexpr double kErrorExponent = 0.2;

    explicit DormandPrince(const Rhs& rhs) : rhs_(rhs) {}

    void reset(const State& y) { rhs_(y, k1_); }

    double attempt(const State& y, double h, State& ynew, const SolverConfig& solver) {
        State tmp;
        for (int i = 0; i < 4; ++i) tmp[i] = y[i] + h * dp::a21 * k1_[i];
        rhs_(tmp, k2_);
        for (int i = 0; i < 4; ++i) tmp[i] = y[i] + h * (dp::a31 * k1_[i] + dp::a32 * k2_[i]);
        rhs_(tmp, k3_);
        for (int i = 0; i < 4; ++i)
            tmp[i] = y[i] + h * (dp::a41 * k1_[i] + dp::a42 * k2_[i] + dp::a43 * k3_[i]);
        rhs_(tmp, k4_);
        for (int i = 0; i < 4; ++i)
            tmp[i] = y[i] + h * (dp::a51 * k1_[i] + dp::a52 * k2_[i] + dp::a53 * k3_[i] +
                                 dp::a54 * k4_[i]);
        rhs_(tmp, k5_);
        for (int i = 0; i < 4; ++i)
            tmp[i] = y[i] + h * (dp::a61 * k1_[i] + dp::a62 * k2_[i] + dp::a63 * k3_[i] +
                                 dp::a64 * k4_[i] + dp::a65 * k5_[i]);
        rhs_(tmp, k6_);
        for (int i = 0; i < 4; ++i)
            ynew[i] = y[i] + h * (dp::b1 * k1_[i] + dp::b3 * k3_[i] + dp::b4 * k4_[i] +
                                  dp::b5 * k5_[i] + dp::b6 * k6_[i]);
        rhs_(ynew, k7_);
        State err;
        for (int i = 0; i < 4; ++i)
            err[i] = h * (dp::e1 * k1_[i] + dp::e3 * k3_[i] + dp::e4 * k4_[i] + dp::e5 * k5_[i] +
                          dp::e6 * k6_[i] + dp::e7 * k7_[i]);
        return error_norm(err, y, ynew, solver);
    }

    void accept() { k1_ = k7_; }

private:
    Rhs rhs_;
    State k1_{}, k2_{}, k3_{}, k4_{}, k5_{}, k6_{}, k7_{};
};

// Kaps-Rentrop / Shampine coefficients, order 4 with embedded order 3.
namespace ros {
constexpr double gam = 0.5;
constexpr double a21 = 2.0, a31 = 48.0 / 25.0, a32 = 6.0 / 25.0;
constexpr double c21 = -8.0, c31 = 372.0 / 25.0, c32 = 12.0 / 5.0;
constexpr double c41 = -112.0 / 125.0, c42 = -54.0 / 125.0, c43 = -2.0 / 5.0;
constexpr double b1 = 19.0 / 9.0, b2 = 0.5, b3 = 25.0 / 108.0, b4 = 125.0 / 108.0;
constexpr double e1 = 17.0 / 54.0, e2 = 7.0 / 36.0, e3 = 0.0, e4 = 125.0 / 108.0;
}  // namespace ros

// Linearly implicit Rosenbrock 4(3) with the analytic Jacobian. The yield
// column of the Jacobian is zero, so each stage solves a 3x3 system for
// (P, S, X) and back-substitutes the yield row.
class Rosenbrock {
public:
    static constexpr double kErrorExponent = 0.25;

    explicit Rosenbrock(const Rhs& rhs) : rhs_(rhs) {}

    void reset(const State& y) { rhs_(y, f0_); }

    double attempt(const State& y, double h, State& ynew, const SolverConfig& solver) {
        jacobian(y);
        factor(h);
        State g1, g2, g3, g4, tmp, f;

        g1 = f0_;
        solve(g1, h);
        for (int i = 0; i < 4; ++i) tmp[i] = y[i] + ros::a21 * g1[i];
        rhs_(tmp, f);
        for (int i = 0; i < 4; ++i) g2[i] = f[i] + ros::c21 * g1[i] / h;
        solve(g2, h);
        for (int i = 0; i < 4; ++i) tmp[i] = y[i] + ros::a31 * g1[i] + ros::a32 * g2[i];
        rhs_(tmp, f);
        for (int i = 0; i < 4; ++i) g3[i] = f[i] + (ros::c31 * g1[i] + ros::c32 * g2[i]) / h;
        solve(g3, h);
        for (int i = 0; i < 4; ++i)
            g4[i] = f[i] + (ros::c41 * g1[i] + ros::c42 * g2[i] + ros::c43 * g3[i]) / h;
        solve(g4, h);

        State err;
        for (int i = 0; i < 4; ++i) {
            ynew[i] = y[i] + ros::b1 * g1[i] + ros::b2 * g2[i] + ros::b3 * g3[i] + ros::b4 * g4[i];
            err[i] = ros::e1 * g1[i] + ros::e2 * g2[i] + ros::e3 * g3[i] + ros::e4 * g4[i];
        }
        return error_norm(err, y, ynew, solver);
    }

    void accept(const State& ynew) { rhs_(ynew, f0_); }

private:
    void jacobian(const State& y) {
        const ModelParams& p = rhs_.params;
        const double s = y[1];
        const double x = y[2];
        const double denom = s + p.delta;
        const double dfeed_ds = x * p.delta / (denom * denom);
        const double dfeed_dx = s / denom;
        const double aa = p.alpha * p.a;
        const double growth = rhs_.in_growth ? p.rho : 0.0;

        j_[0][0] = -p.beta * s - p.omega;
        j_[0][1] = -p.beta * y[0] + aa * (1.0 - p.gamma) * dfeed_ds;
        j_[0][2] = aa * (1.0 - p.gamma) * dfeed_dx;
        j_[1][0] = 0.0;
        j_[1][1] = growth * (1.0 - 2.0 * s / p.cap_k) - p.a * dfeed_ds;
        j_[1][2] = -p.a * dfeed_dx;
        j_[2][0] = p.beta * s;
        j_[2][1] = p.beta * y[0] + aa * p.gamma * dfeed_ds;
        j_[2][2] = aa * p.gamma * dfeed_dx - p.mu;
        j_y_s_ = rhs_.in_growth ? 0.0 : p.m;
    }

    // LU factorization with partial pivoting of (1 / (gam h)) I - J on the
    // (P, S, X) block.
    void factor(double h) {
        const double diag = 1.0 / (ros::gam * h);
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) lu_[i][j] = (i == j ? diag : 0.0) - j_[i][j];
        for (int i = 0; i < 3; ++i) perm_[i] = i;
        for (int col = 0; col < 3; ++col) {
            int pivot = col;
            for (int r = col + 1; r < 3; ++r)
                if (std::abs(lu_[r][col]) > std::abs(lu_[pivot][col])) pivot = r;
            if (pivot != col) {
                std::swap(lu_[pivot], lu_[col]);
                std::swap(perm_[pivot], perm_[col]);
            }
            if (lu_[col][col] == 0.0) throw NumericalFailure("singular Rosenbrock matrix", 0.0);
            for (int r = col + 1; r < 3; ++r) {
                lu_[r][col] /= lu_[col][col];
                for (int c = col + 1; c < 3; ++c) lu_[r][c] -= lu_[r][col] * lu_[col][c];
            }
        }
    }

    void solve(State& b, double h) const {
        const std::array<double, 3> rhs = {b[perm_[0]], b[perm_[1]], b[perm_[2]]};
        std::array<double, 3> z{};
        for (int i = 0; i < 3; ++i) {
            z[i] = rhs[i];
            for (int j = 0; j < i; ++j) z[i] -= lu_[i][j] * z[j];
        }
        for (int i = 2; i >= 0; --i) {
            for (int j = i + 1; j < 3; ++j) z[i] -= lu_[i][j] * z[j];
            z[i] /= lu_[i][i];
        }
        const double y_rhs = b[3];
        b[0] = z[0];
        b[1] = z[1];
        b[2] = z[2];
        b[3] = ros::gam * h * (y_rhs + j_y_s_ * z[1]);
    }

    Rhs rhs_;
    State f0_{};
    std::array<std::array<double, 3>, 3> j_{};
    std::array<std::array<double, 3>, 3> lu_{};
    std::array<int, 3> perm_{};
    double j_y_s_ = 0.0;
};

// Adaptive integration of one season. The step size carries over from the
// growth phase to the post-flowering phase.
class SeasonIntegrator {
public:
    SeasonIntegrator(const ModelParams& params, const SolverConfig& solver, bool record,
                     std::vector<TrajectoryPoint>* out)
        : params_(params), solver_(solver), record_(record), out_(out) {}

    void start(const State& y) {
        if (record_) {
            out_->push_back({0.0, y[0], y[1], y[2]});
            next_sample_ = std::min(solver_.sample_step, params_.cap_d);
        }
    }

    // Integrates y over (t0, t1] with the phase's right-hand side.
    void advance(State& y, double t0, double t1, bool in_growth) {
        const Rhs rhs(params_, in_growth);
        if (solver_.method == SolverMethod::rosenbrock) {
            Rosenbrock stepper(rhs);
            run(stepper, y, t0, t1);
        } else {
            DormandPrince stepper(rhs);
            run(stepper, y, t0, t1);
        }
    }

private:
    static constexpr double kSafety = 0.9;
    static constexpr double kFacMin = 0.2;
    static constexpr double kFacMax = 5.0;

    template <class Stepper>
    void run(Stepper& stepper, State& y, double t0, double t1) {
        constexpr double alpha = Stepper::kErrorExponent;
        stepper.reset(y);
        State ynew;
        double t = t0;
        while (t < t1) {
            double target = t1;
            if (record_ && next_sample_ < target) target = next_sample_;
            const double h = std::min(dt_, target - t);
            const bool clipped = h < dt_;
            if (++steps_ > solver_.max_steps) throw NumericalFailure("step limit exceeded", t);

            const double err = stepper.attempt(y, h, ynew, solver_);
            if (err > 1.0) {
                dt_ = h * std::max(kFacMin, kSafety * std::pow(err, -alpha));
                if (dt_ < solver_.min_step) throw NumericalFailure("step size underflow", t);
                continue;
            }

            const double t_prev = t;
            t = (target - (t + h) <= 1e-12 * std::max(1.0, target)) ? target : t + h;
            y = ynew;
            clamp_state(y, t_prev);
            check_bound(y, t_prev);
            if constexpr (std::is_same_v<Stepper, DormandPrince>) {
                if (y == ynew) stepper.accept();
                else stepper.reset(y);
            } else {
                stepper.accept(y);
            }

            const double fac =
                std::clamp(kSafety * std::pow(std::max(err, 1e-10), -alpha), kFacMin, kFacMax);
            dt_ = clipped ? std::max(dt_, h * fac) : h * fac;

            if (record_ && t == next_sample_) {
                out_->push_back({t, y[0], y[1], y[2]});
                next_sample_ = t >= params_.cap_d
                                   ? 2.0 * params_.cap_d
                                   : std::min(next_sample_ + solver_.sample_step, params_.cap_d);
            }
        }
    }

    void check_bound(const State& y, double t_prev) const {
        const double bound = std::max(params_.s0, params_.cap_k);
        if (y[1] > bound * (1.0 + 1e-8) + 1e-6)
            throw NumericalFailure("root biomass exceeded max(S0, K)", t_prev);
    }

    const ModelParams& params_;
    const SolverConfig& solver_;
    bool record_;
    std::vector<TrajectoryPoint>* out_;
    double dt_ = 0.1;
    double next_sample_ = 0.0;
    long steps_ = 0;
};

}  // namespace

StateRate derivative(const SeasonState& state, const ModelParams& params, bool in_growth) {
    if (!std::isfinite(state.p) || !std::isfinite(state.s) || !std::isfinite(state.x) ||
        !std::isfinite(state.y_acc))
        throw InvalidInput("derivative: non-finite state component");

    const double p = state.p;
    const double s = state.s;
    const double x = state.x;
    const double feeding = s * x / (s + params.delta);
    const double infestation = params.beta * p * s;
    const double growth = in_growth ? params.rho * s * (1.0 - s / params.cap_k) : 0.0;

    StateRate r;
    r.dp = -infestation + params.alpha * params.a * (1.0 - params.gamma) * feeding - params.omega * p;
    r.ds = growth - params.a * feeding;
    r.dx = infestation + params.alpha * params.a * params.gamma * feeding - params.mu * x;
    r.dy = in_growth ? 0.0 : params.m * s;
    return r;
}

SeasonOutcome integrate_season(double p_init, const ModelParams& params, bool record,
                               const SolverConfig& solver) {
    if (!std::isfinite(p_init) || p_init < 0.0)
        throw InvalidInput("integrate_season: initial infestation must be finite and >= 0");
    if (record && !(solver.sample_step > 0.0))
        throw InvalidInput("integrate_season: sample step must be > 0");

    SeasonOutcome out;
    State y = {p_init, params.s0, 0.0, 0.0};
    SeasonIntegrator integrator(params, solver, record, &out.trajectory);
    integrator.start(y);
    integrator.advance(y, 0.0, params.d, true);
    integrator.advance(y, params.d, params.cap_d, false);

    out.end_state = to_state(y);
    out.yield = y[3];
    out.profit = out.yield - params.c;
    out.p_after_harvest = apply_uprooting(y[0], y[2], params.q);
    return out;
}

double apply_fallow(double p, double omega, double tau) {
    if (!(tau >= 0.0)) throw InvalidInput("apply_fallow: fallow duration must be >= 0");
    if (!(p >= 0.0)) throw InvalidInput("apply_fallow: infestation must be >= 0");
    return p * std::exp(-omega * tau);
}

double apply_uprooting(double p, double x, double q) {
    if (!(q >= 0.0 && q <= 1.0)) throw InvalidInput("apply_uprooting: q must lie in [0, 1]");
    if (!(p >= 0.0 && x >= 0.0)) throw InvalidInput("apply_uprooting: populations must be >= 0");
    return p + q * x;
}

MultiSeasonOutcome simulate_schedule(const ModelParams& params, const FallowSchedule& schedule,
                                     bool record, const SolverConfig& solver) {
    params.validate();
    const double last = schedule.last_harvest(params.cap_d);
    if (last > schedule.t_max() + 1e-9 * std::max(1.0, schedule.t_max()))
        throw InvalidInput("schedule: last harvest at t = " + std::to_string(last) +
                           " exceeds the horizon " + std::to_string(schedule.t_max()));

    MultiSeasonOutcome out;
    out.season_starts = schedule.season_starts(params.cap_d);
    const auto taus = schedule.taus();
    out.seasons.reserve(schedule.season_count());
    double p = params.p0;
    for (std::size_t k = 0; k < schedule.season_count(); ++k) {
        out.initial_p.push_back(p);
        SeasonOutcome season = integrate_season(p, params, record, solver);
        out.total_profit += season.profit;
        if (k < taus.size()) p = apply_fallow(season.p_after_harvest, params.omega, taus[k]);
        out.final_infestation = season.p_after_harvest;
        out.seasons.push_back(std::move(season));
    }
    return out;
}

}  // namespace fallowopt

#include "ncdyn/doubled_mechanics.hpp"

#include "ncdyn/errors.hpp"

#include <cmath>
#include <stdexcept>

namespace ncdyn::mech {

namespace {

bool all_finite(const Vec& v) { return v.allFinite(); }

void require_dim(const SystemSpec& spec, const DoubledPhasePoint& state) {
    if (state.q1.size() != spec.dim() || state.q2.size() != spec.dim())
        throw std::invalid_argument("state dimension does not match system spec");
}

Vec checked(const Vec& v, double t, const char* what) {
    if (!v.allFinite())
        throw solver_error(std::string("non-finite evaluation of ") + what, t);
    return v;
}

} // namespace

bool DoubledPhasePoint::is_finite() const {
    bool ok = all_finite(q1) && all_finite(q2);
    if (p1.size() > 0) ok = ok && all_finite(p1);
    if (p2.size() > 0) ok = ok && all_finite(p2);
    if (v1) ok = ok && all_finite(*v1);
    if (v2) ok = ok && all_finite(*v2);
    return ok;
}

SystemSpec::SystemSpec(Mat mass, std::function<double(const Vec&)> potential,
                       std::function<Vec(const Vec&)> grad_potential)
    : mass_(std::move(mass)),
      potential_(std::move(potential)),
      grad_potential_(std::move(grad_potential)) {
    if (mass_.rows() != mass_.cols() || mass_.rows() < 1)
        throw std::invalid_argument("mass matrix must be square, N >= 1");
    if (!mass_.allFinite() || !mass_.isApprox(mass_.transpose(), 1e-12))
        throw std::invalid_argument("mass matrix must be finite and symmetric");
    mass_llt_.compute(mass_);
    if (mass_llt_.info() != Eigen::Success)
        throw std::invalid_argument("mass matrix must be positive definite");
}

SystemSpec::SystemSpec(Mat mass, std::function<double(const Vec&)> potential,
                       std::function<Vec(const Vec&)> grad_potential,
                       VelocityLinearCoupling coupling)
    : SystemSpec(std::move(mass), std::move(potential), std::move(grad_potential)) {
    coupling_ = std::move(coupling);
}

SystemSpec SystemSpec::harmonic(double mass, double stiffness) {
    Mat m(1, 1);
    m(0, 0) = mass;
    return SystemSpec(
        m, [stiffness](const Vec& q) { return 0.5 * stiffness * q[0] * q[0]; },
        [stiffness](const Vec& q) { return Vec::Constant(1, stiffness * q[0]); });
}

SystemSpec SystemSpec::damped_oscillator(double mass, double stiffness,
                                         double damping) {
    Mat m(1, 1);
    m(0, 0) = mass;
    const double half_c = 0.5 * damping;

    VelocityLinearCoupling k;
    k.f = [](const Vec&, const Vec&, double) { return 0.0; };
    k.df_dq1 = [](const Vec&, const Vec&, double) { return Vec::Zero(1); };
    k.df_dq2 = k.df_dq1;
    // g1 = g2 = -(c/2)(q1 - q2)
    k.g1 = [half_c](const Vec& q1, const Vec& q2, double) {
        return Vec::Constant(1, -half_c * (q1[0] - q2[0]));
    };
    k.g2 = k.g1;
    k.dg1_dq1 = [half_c](const Vec&, const Vec&, double) {
        return Mat::Constant(1, 1, -half_c);
    };
    k.dg1_dq2 = [half_c](const Vec&, const Vec&, double) {
        return Mat::Constant(1, 1, half_c);
    };
    k.dg2_dq1 = k.dg1_dq1;
    k.dg2_dq2 = k.dg1_dq2;
    k.dg1_dt = [](const Vec&, const Vec&, double) { return Vec::Zero(1); };
    k.dg2_dt = k.dg1_dt;

    return SystemSpec(
        m, [stiffness](const Vec& q) { return 0.5 * stiffness * q[0] * q[0]; },
        [stiffness](const Vec& q) { return Vec::Constant(1, stiffness * q[0]); },
        std::move(k));
}

double SystemSpec::copy_energy(const Vec& q, const Vec& p) const {
    return 0.5 * p.dot(mass_llt_.solve(p)) + potential_(q);
}

std::string to_string(Picture p) {
    return p == Picture::lagrangian ? "lagrangian" : "hamiltonian";
}

std::pair<Vec, Vec> lagrangian_accelerations(const SystemSpec& spec,
                                             const DoubledPhasePoint& state) {
    require_dim(spec, state);
    if (!state.has_velocities())
        throw std::invalid_argument("lagrangian_accelerations requires velocities");

    const Vec& q1 = state.q1;
    const Vec& q2 = state.q2;
    const Vec& v1 = *state.v1;
    const Vec& v2 = *state.v2;
    const double t = state.t;

    Vec rhs1 = -checked(spec.grad_potential(q1), t, "grad V(q1)");
    Vec rhs2 = -checked(spec.grad_potential(q2), t, "grad V(q2)");

    if (spec.has_coupling()) {
        const auto& k = spec.coupling();
        const Mat j1q1 = k.dg1_dq1(q1, q2, t);
        const Mat j1q2 = k.dg1_dq2(q1, q2, t);
        const Mat j2q1 = k.dg2_dq1(q1, q2, t);
        const Mat j2q2 = k.dg2_dq2(q1, q2, t);

        // dK/dq_a = df/dq_a + (dg1/dq_a)' v1 + (dg2/dq_a)' v2
        const Vec dk_dq1 =
            k.df_dq1(q1, q2, t) + j1q1.transpose() * v1 + j2q1.transpose() * v2;
        const Vec dk_dq2 =
            k.df_dq2(q1, q2, t) + j1q2.transpose() * v1 + j2q2.transpose() * v2;

        // d/dt g_a along the flow; K is velocity-linear, so no accelerations
        // enter here.
        const Vec g1_dot = j1q1 * v1 + j1q2 * v2 + k.dg1_dt(q1, q2, t);
        const Vec g2_dot = j2q1 * v1 + j2q2 * v2 + k.dg2_dt(q1, q2, t);

        rhs1 += dk_dq1 - g1_dot;
        rhs2 += -dk_dq2 + g2_dot;
    }

    Vec a1 = spec.apply_mass_inverse(checked(rhs1, t, "copy-1 force"));
    Vec a2 = spec.apply_mass_inverse(checked(rhs2, t, "copy-2 force"));
    return {std::move(a1), std::move(a2)};
}

std::array<Vec, 4> hamiltonian_rhs(const SystemSpec& spec,
                                   const DoubledPhasePoint& state) {
    require_dim(spec, state);
    if (spec.has_coupling())
        throw std::invalid_argument(
            "hamiltonian_rhs supports K = 0 only; nonzero coupling is a "
            "Lagrangian-picture feature");
    if (state.p1.size() != spec.dim() || state.p2.size() != spec.dim())
        throw std::invalid_argument("hamiltonian_rhs requires momenta");

    // H = H1 - H2 with qdot_a = eps_a dH/dp_a, pdot_a = -eps_a dH/dq_a;
    // the metric factors cancel per copy.
    Vec q1dot = spec.apply_mass_inverse(state.p1);
    Vec p1dot = -checked(spec.grad_potential(state.q1), state.t, "grad V(q1)");
    Vec q2dot = spec.apply_mass_inverse(state.p2);
    Vec p2dot = -checked(spec.grad_potential(state.q2), state.t, "grad V(q2)");
    return {std::move(q1dot), std::move(p1dot), std::move(q2dot), std::move(p2dot)};
}

double poisson_bracket(const Observable& a, const Observable& b,
                       const DoubledPhasePoint& at, double h) {
    if (!(h > 0.0)) throw std::invalid_argument("poisson_bracket requires h > 0");
    const Eigen::Index n = at.dim();
    if (at.p1.size() != n || at.p2.size() != n)
        throw std::invalid_argument("poisson_bracket requires momenta");

    auto eval = [&](const Observable& f, const DoubledPhasePoint& x) {
        const double y = f(x);
        if (!std::isfinite(y))
            throw std::runtime_error("non-finite observable value in poisson_bracket");
        return y;
    };

    // Central differences in each of the 4N phase coordinates.
    auto diff = [&](const Observable& f, int copy, bool momentum, Eigen::Index j) {
        DoubledPhasePoint plus = at, minus = at;
        Vec& vp = momentum ? (copy == 0 ? plus.p1 : plus.p2)
                           : (copy == 0 ? plus.q1 : plus.q2);
        Vec& vm = momentum ? (copy == 0 ? minus.p1 : minus.p2)
                           : (copy == 0 ? minus.q1 : minus.q2);
        vp[j] += h;
        vm[j] -= h;
        return (eval(f, plus) - eval(f, minus)) / (2.0 * h);
    };

    double sum = 0.0;
    for (int copy = 0; copy < 2; ++copy) {
        for (Eigen::Index j = 0; j < n; ++j) {
            const double da_dq = diff(a, copy, false, j);
            const double db_dp = diff(b, copy, true, j);
            const double da_dp = diff(a, copy, true, j);
            const double db_dq = diff(b, copy, false, j);
            sum += kMetric[copy] * (da_dq * db_dp - da_dp * db_dq);
        }
    }
    return sum;
}

double sample_deviation(const DoubledPhasePoint& state) {
    double dev = (state.q1 - state.q2).cwiseAbs().maxCoeff();
    if (state.has_velocities())
        dev += (*state.v1 - *state.v2).cwiseAbs().maxCoeff();
    else
        dev += (state.p1 - state.p2).cwiseAbs().maxCoeff();
    return dev;
}

std::vector<double> physical_limit_deviation(const Trajectory& traj) {
    if (traj.samples.empty())
        throw std::invalid_argument("physical_limit_deviation: empty trajectory");
    std::vector<double> out;
    out.reserve(traj.samples.size());
    for (const auto& s : traj.samples) out.push_back(sample_deviation(s));
    return out;
}

namespace {

// One classical RK4 step of y' = f(t, y).
Vec rk4_step(const std::function<Vec(double, const Vec&)>& f, double t,
             const Vec& y, double dt) {
    const Vec k1 = f(t, y);
    const Vec k2 = f(t + 0.5 * dt, y + 0.5 * dt * k1);
    const Vec k3 = f(t + 0.5 * dt, y + 0.5 * dt * k2);
    const Vec k4 = f(t + dt, y + dt * k3);
    return y + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

} // namespace

Trajectory integrate(const SystemSpec& spec, const DoubledPhasePoint& init,
                     double dt, double t_final, Picture picture,
                     const IntegrateOptions& options) {
    require_dim(spec, init);
    if (!(dt > 0.0)) throw std::invalid_argument("integrate requires dt > 0");
    if (!(t_final > init.t))
        throw std::invalid_argument("integrate requires t_final > initial time");
    if (!init.is_finite())
        throw std::invalid_argument("integrate requires finite initial data");

    const Eigen::Index n = spec.dim();
    const bool lagrangian = picture == Picture::lagrangian;
    if (lagrangian && !init.has_velocities())
        throw std::invalid_argument("lagrangian picture requires initial velocities");
    if (!lagrangian && (init.p1.size() != n || init.p2.size() != n))
        throw std::invalid_argument("hamiltonian picture requires initial momenta");

    // Packed state: (q1, v1, q2, v2) or (q1, p1, q2, p2).
    Vec y(4 * n);
    y.segment(0, n) = init.q1;
    y.segment(n, n) = lagrangian ? *init.v1 : init.p1;
    y.segment(2 * n, n) = init.q2;
    y.segment(3 * n, n) = lagrangian ? *init.v2 : init.p2;

    auto unpack = [&](double t, const Vec& packed) {
        DoubledPhasePoint s;
        s.t = t;
        s.q1 = packed.segment(0, n);
        s.q2 = packed.segment(2 * n, n);
        if (lagrangian) {
            s.v1 = packed.segment(n, n);
            s.v2 = packed.segment(3 * n, n);
            s.p1 = spec.mass() * *s.v1;
            s.p2 = spec.mass() * *s.v2;
        } else {
            s.p1 = packed.segment(n, n);
            s.p2 = packed.segment(3 * n, n);
        }
        return s;
    };

    std::function<Vec(double, const Vec&)> rhs;
    if (lagrangian) {
        rhs = [&spec, n](double t, const Vec& packed) {
            DoubledPhasePoint s;
            s.t = t;
            s.q1 = packed.segment(0, n);
            s.v1 = packed.segment(n, n);
            s.q2 = packed.segment(2 * n, n);
            s.v2 = packed.segment(3 * n, n);
            auto [a1, a2] = lagrangian_accelerations(spec, s);
            Vec dy(4 * n);
            dy.segment(0, n) = *s.v1;
            dy.segment(n, n) = a1;
            dy.segment(2 * n, n) = *s.v2;
            dy.segment(3 * n, n) = a2;
            return dy;
        };
    } else {
        rhs = [&spec, n](double t, const Vec& packed) {
            DoubledPhasePoint s;
            s.t = t;
            s.q1 = packed.segment(0, n);
            s.p1 = packed.segment(n, n);
            s.q2 = packed.segment(2 * n, n);
            s.p2 = packed.segment(3 * n, n);
            auto d = hamiltonian_rhs(spec, s);
            Vec dy(4 * n);
            dy.segment(0, n) = d[0];
            dy.segment(n, n) = d[1];
            dy.segment(2 * n, n) = d[2];
            dy.segment(3 * n, n) = d[3];
            return dy;
        };
    }

    const auto n_steps =
        static_cast<long>(std::llround((t_final - init.t) / dt));
    if (n_steps < 1) throw std::invalid_argument("integrate: horizon shorter than dt");

    Trajectory traj;
    traj.dt = dt;
    traj.picture = picture;
    traj.samples.reserve(static_cast<size_t>(n_steps) + 1);
    traj.samples.push_back(unpack(init.t, y));

    for (long j = 0; j < n_steps; ++j) {
        const double t = init.t + static_cast<double>(j) * dt;
        y = rk4_step(rhs, t, y, dt);
        const double t_next = init.t + static_cast<double>(j + 1) * dt;
        if (!y.allFinite() ||
            y.cwiseAbs().maxCoeff() > options.blow_up_bound)
            throw solver_error("trajectory blow-up: coordinate magnitude "
                               "exceeded bound",
                               t_next);
        traj.samples.push_back(unpack(t_next, y));
    }

    traj.deviation = physical_limit_deviation(traj);
    return traj;
}

} // namespace ncdyn::mech

#ifndef NCDYN_DOUBLED_MECHANICS_HPP
#define NCDYN_DOUBLED_MECHANICS_HPP

#include <Eigen/Dense>

#include <array>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace ncdyn::mech {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

// Metric weighting the two copies: epsilon_1 = +1, epsilon_2 = -1.
inline constexpr double kMetric[2] = {+1.0, -1.0};

// Classical state with doubled degrees of freedom. Velocities are carried
// in the Lagrangian picture only; momenta are the ordinary per-copy
// momenta p_alpha = M v_alpha.
struct DoubledPhasePoint {
    double t = 0.0;
    Vec q1, q2;
    Vec p1, p2;
    std::optional<Vec> v1, v2;

    Eigen::Index dim() const { return q1.size(); }
    bool has_velocities() const { return v1.has_value() && v2.has_value(); }
    bool is_finite() const;
};

// Nonconservative coupling restricted to velocity-linear form
//   K(q1, q2, v1, v2, t) = f(q1,q2,t) + g1(q1,q2,t).v1 + g2(q1,q2,t).v2,
// supplied together with the first partials the doubled Euler-Lagrange
// equations need. Jacobian convention: dgA_dqB(i,j) = d gA_i / d qB_j.
struct VelocityLinearCoupling {
    using ScalarFn = std::function<double(const Vec&, const Vec&, double)>;
    using VectorFn = std::function<Vec(const Vec&, const Vec&, double)>;
    using MatrixFn = std::function<Mat(const Vec&, const Vec&, double)>;

    ScalarFn f;
    VectorFn df_dq1, df_dq2;
    VectorFn g1, g2;
    MatrixFn dg1_dq1, dg1_dq2, dg2_dq1, dg2_dq2;
    VectorFn dg1_dt, dg2_dt;
};

// Natural-form system L = v'Mv/2 - V(q) with constant SPD mass matrix,
// optionally carrying a velocity-linear coupling K between the copies.
class SystemSpec {
public:
    SystemSpec(Mat mass, std::function<double(const Vec&)> potential,
               std::function<Vec(const Vec&)> grad_potential);
    SystemSpec(Mat mass, std::function<double(const Vec&)> potential,
               std::function<Vec(const Vec&)> grad_potential,
               VelocityLinearCoupling coupling);

    static SystemSpec harmonic(double mass, double stiffness);
    // Reference dissipative system, K = -(c/2)(q1-q2)(v1+v2). In the
    // physical limit the common trajectory obeys m q'' + c q' + k q = 0.
    static SystemSpec damped_oscillator(double mass, double stiffness,
                                        double damping);

    Eigen::Index dim() const { return mass_.rows(); }
    bool has_coupling() const { return coupling_.has_value(); }
    const Mat& mass() const { return mass_; }
    const VelocityLinearCoupling& coupling() const { return *coupling_; }

    double potential(const Vec& q) const { return potential_(q); }
    Vec grad_potential(const Vec& q) const { return grad_potential_(q); }
    Vec apply_mass_inverse(const Vec& rhs) const { return mass_llt_.solve(rhs); }

    // Per-copy energy H_alpha = p'M^{-1}p/2 + V(q).
    double copy_energy(const Vec& q, const Vec& p) const;

private:
    Mat mass_;
    Eigen::LLT<Mat> mass_llt_;
    std::function<double(const Vec&)> potential_;
    std::function<Vec(const Vec&)> grad_potential_;
    std::optional<VelocityLinearCoupling> coupling_;
};

enum class Picture { lagrangian, hamiltonian };

std::string to_string(Picture p);

struct Trajectory {
    std::vector<DoubledPhasePoint> samples;
    std::vector<double> deviation; // per-sample physical-limit deviation
    double dt = 0.0;
    Picture picture = Picture::lagrangian;
    std::string integrator = "rk4";
};

// Accelerations (a1, a2) of the doubled Euler-Lagrange system
//   M a1 = -grad V(q1) + dK/dq1 - d/dt g1,
//   M a2 = -grad V(q2) - dK/dq2 + d/dt g2,
// where d/dt g_a = (dg_a/dq1) v1 + (dg_a/dq2) v2 + dg_a/dt.
std::pair<Vec, Vec> lagrangian_accelerations(const SystemSpec& spec,
                                             const DoubledPhasePoint& state);

// Time derivative of (q1, p1, q2, p2) under the metric canonical equations
// for H = H1 - H2 with K = 0; the two metric factors cancel and each copy
// follows its ordinary flow. Throws if the spec carries a coupling.
std::array<Vec, 4> hamiltonian_rhs(const SystemSpec& spec,
                                   const DoubledPhasePoint& state);

using Observable = std::function<double(const DoubledPhasePoint&)>;

// Central-difference evaluation of the metric Poisson bracket
//   {A,B} = sum_{a,j} eps_a (dA/dq_a^j dB/dp_a^j - dA/dp_a^j dB/dq_a^j).
double poisson_bracket(const Observable& a, const Observable& b,
                       const DoubledPhasePoint& at, double h);

struct IntegrateOptions {
    double blow_up_bound = 1e6;
};

// Fixed-step classical RK4 over either picture.
Trajectory integrate(const SystemSpec& spec, const DoubledPhasePoint& init,
                     double dt, double t_final, Picture picture,
                     const IntegrateOptions& options = {});

// max_j|q1-q2| + max_j|v1-v2| per sample (momenta when velocities absent).
double sample_deviation(const DoubledPhasePoint& state);
std::vector<double> physical_limit_deviation(const Trajectory& traj);

} // namespace ncdyn::mech

#endif

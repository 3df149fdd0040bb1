#ifndef NCDYN_KINETIC_SOLVER_HPP
#define NCDYN_KINETIC_SOLVER_HPP

#include <complex>
#include <functional>
#include <vector>

namespace ncdyn::kinetic {

struct Mode {
    double omega;      // Omega_k
    double g;          // coupling g_k
    double occupation; // reservoir occupation N_k (held fixed)
};

// Reservoir band [center - width/2, center + width/2] with effective
// coupling gbar; discretization preserves sum_k g_k^2 = gbar^2.
struct ContinuumBand {
    double gbar = 0.0;
    double center = 0.0;
    double width = 0.0;
    std::function<double(double)> occupation; // N(Omega)

    static std::function<double(double)> flat(double nbar);
    static std::function<double(double)> bose(double beta);

    double gbar2() const { return gbar * gbar; }
    double omega_min() const { return center - 0.5 * width; }
    double omega_max() const { return center + 0.5 * width; }
};

struct ReservoirSpec {
    double omega0 = 0.0; // bare system frequency
    std::vector<Mode> modes;

    static ReservoirSpec from_modes(double omega0, std::vector<Mode> modes);
    static ReservoirSpec from_band(double omega0, const ContinuumBand& band,
                                   int n_modes);
};

// n_modes modes at midpoints of equal sub-intervals of the band,
// g_k = gbar/sqrt(N), N_k = N(Omega_k).
std::vector<Mode> discretize_band(const ContinuumBand& band, int n_modes);

// Markovian relaxation rate constant kappa = pi gbar^2 / width.
double kappa(const ContinuumBand& band);

// Long-time energy shift for a flat band,
//   delta_omega = (gbar^2/width) PV int dOmega / (omega - Omega);
// analytic principal value inside the band, ordinary integral outside.
// omega at a band edge is a logarithmic divergence and is rejected.
double delta_omega_flat_band(double omega, const ContinuumBand& band);

struct KineticSample {
    double t;
    double n;
    double ndot;
    double delta_omega;
    double theta; // accumulated phase int_{t_i}^t omega(s) ds
};

// Full solver state; exposed so the memory integrals can be re-evaluated
// directly from the sample history in tests.
struct KineticState {
    double t = 0.0;
    double n = 0.0;
    double theta = 0.0;
    double delta_omega = 0.0;
    std::vector<std::complex<double>> mem_occupation; // M_k
    std::vector<std::complex<double>> mem_phase;      // W_k
};

struct KineticSeries {
    std::vector<KineticSample> samples;
    KineticState final_state;
};

struct KineticOptions {
    double negative_n_tolerance = 1e-9;
};

// Non-Markovian transport equations
//   ndot(t)  = -2 Re sum_k g_k^2 int_{t_i}^t ds {n(s)-N_k} e^{i int_s^t [omega-Omega_k]},
//   domega(t) = Im sum_k g_k^2 int_{t_i}^t ds e^{i int_s^t [omega-Omega_k]},
//   omega(t) = omega0 + domega(t),
// advanced by a Heun predictor-corrector; the kernel is factorized through
// the accumulated phase so each step costs O(n_modes). domega enters omega
// explicitly (previous-step value).
KineticSeries nonmarkovian_solve(const ReservoirSpec& spec, double n0,
                                 double t_i, double t_f, double dt,
                                 const KineticOptions& options = {});

struct MarkovianSeries {
    std::vector<double> t;
    std::vector<double> n_rk4;
    std::vector<double> n_closed; // N_omega + (n0 - N_omega) e^{-2 kappa t}
};

// Markovian ansatz ndot = -2 kappa (n - n_eq): RK4 series plus the closed
// form, both returned for cross-validation.
MarkovianSeries markovian_solve(double n0, double n_eq, double kappa_value,
                                double dt, double t_f);

} // namespace ncdyn::kinetic

#endif

#include "ncdyn/kinetic_solver.hpp"

#include "ncdyn/errors.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace ncdyn::kinetic {

using Complex = std::complex<double>;

std::function<double(double)> ContinuumBand::flat(double nbar) {
    if (!(nbar >= 0.0))
        throw std::invalid_argument("flat occupation requires nbar >= 0");
    return [nbar](double) { return nbar; };
}

std::function<double(double)> ContinuumBand::bose(double beta) {
    if (!(beta > 0.0))
        throw std::invalid_argument("bose occupation requires beta > 0");
    return [beta](double omega) {
        if (!(omega > 0.0))
            throw std::invalid_argument("bose occupation requires Omega > 0");
        return 1.0 / std::expm1(beta * omega);
    };
}

namespace {

void require_band(const ContinuumBand& band) {
    if (!(band.width > 0.0))
        throw std::invalid_argument("band width must be > 0");
    if (!std::isfinite(band.gbar) || !std::isfinite(band.center))
        throw std::invalid_argument("band parameters must be finite");
    if (!band.occupation)
        throw std::invalid_argument("band occupation profile is unset");
}

} // namespace

ReservoirSpec ReservoirSpec::from_modes(double omega0, std::vector<Mode> modes) {
    for (const auto& m : modes) {
        if (!std::isfinite(m.omega) || !std::isfinite(m.g))
            throw std::invalid_argument("mode parameters must be finite");
        if (!(m.occupation >= 0.0))
            throw std::invalid_argument("mode occupation must be >= 0");
    }
    return {omega0, std::move(modes)};
}

ReservoirSpec ReservoirSpec::from_band(double omega0, const ContinuumBand& band,
                                       int n_modes) {
    return {omega0, discretize_band(band, n_modes)};
}

std::vector<Mode> discretize_band(const ContinuumBand& band, int n_modes) {
    require_band(band);
    if (n_modes < 1) throw std::invalid_argument("discretize_band requires N >= 1");
    const double delta = band.width / n_modes;
    const double g = band.gbar / std::sqrt(double(n_modes));
    std::vector<Mode> modes;
    modes.reserve(n_modes);
    for (int k = 0; k < n_modes; ++k) {
        const double omega = band.omega_min() + (k + 0.5) * delta;
        modes.push_back({omega, g, band.occupation(omega)});
    }
    return modes;
}

double kappa(const ContinuumBand& band) {
    if (!(band.width > 0.0))
        throw std::invalid_argument("kappa requires band width > 0");
    return std::numbers::pi * band.gbar2() / band.width;
}

double delta_omega_flat_band(double omega, const ContinuumBand& band) {
    require_band(band);
    const double lo = band.omega_min();
    const double hi = band.omega_max();
    const double edge_tol = 1e-12 * std::max(1.0, band.width);
    if (std::abs(omega - lo) <= edge_tol || std::abs(omega - hi) <= edge_tol)
        throw std::invalid_argument(
            "delta_omega_flat_band: omega at a band edge (logarithmic "
            "divergence)");
    // PV int_lo^hi dOmega/(omega-Omega) = ln |omega-lo| - ln |omega-hi|;
    // inside the band this is the symmetric principal value, outside the
    // ordinary integral.
    return band.gbar2() / band.width *
           std::log(std::abs(omega - lo) / std::abs(omega - hi));
}

KineticSeries nonmarkovian_solve(const ReservoirSpec& spec, double n0,
                                 double t_i, double t_f, double dt,
                                 const KineticOptions& options) {
    if (!(dt > 0.0)) throw std::invalid_argument("nonmarkovian_solve: dt must be > 0");
    if (!(n0 >= 0.0)) throw std::invalid_argument("nonmarkovian_solve: n0 must be >= 0");
    if (!(t_f > t_i)) throw std::invalid_argument("nonmarkovian_solve: t_f must exceed t_i");

    const size_t nm = spec.modes.size();
    std::vector<double> omega_k(nm), g2_k(nm), occ_k(nm);
    for (size_t k = 0; k < nm; ++k) {
        omega_k[k] = spec.modes[k].omega;
        g2_k[k] = spec.modes[k].g * spec.modes[k].g;
        occ_k[k] = spec.modes[k].occupation;
    }

    KineticState st;
    st.t = t_i;
    st.n = n0;
    st.theta = 0.0;
    st.delta_omega = 0.0;
    st.mem_occupation.assign(nm, Complex(0.0, 0.0));
    st.mem_phase.assign(nm, Complex(0.0, 0.0));

    // Kernel factorization: e^{i int_s^t [omega - Omega_k]} =
    // e^{i(theta(t)-Omega_k t)} e^{-i(theta(s)-Omega_k s)}. phi_k below is
    // the s-side factor at the current endpoint.
    std::vector<Complex> phi(nm), phi_end(nm);

    auto endpoint_phases = [&](double theta, double t, std::vector<Complex>& out) {
        for (size_t k = 0; k < nm; ++k)
            out[k] = std::polar(1.0, -(theta - omega_k[k] * t));
    };

    auto ndot_of = [&](const std::vector<Complex>& mem,
                       const std::vector<Complex>& phases) {
        double acc = 0.0;
        for (size_t k = 0; k < nm; ++k)
            acc += g2_k[k] * (std::conj(phases[k]) * mem[k]).real();
        return -2.0 * acc;
    };

    auto domega_of = [&](const std::vector<Complex>& mem,
                         const std::vector<Complex>& phases) {
        double acc = 0.0;
        for (size_t k = 0; k < nm; ++k)
            acc += g2_k[k] * (std::conj(phases[k]) * mem[k]).imag();
        return acc;
    };

    const auto n_steps = static_cast<long>(std::llround((t_f - t_i) / dt));
    if (n_steps < 1)
        throw std::invalid_argument("nonmarkovian_solve: horizon shorter than dt");

    KineticSeries out;
    out.samples.reserve(static_cast<size_t>(n_steps) + 1);
    out.samples.push_back({t_i, n0, 0.0, 0.0, 0.0});

    std::vector<Complex> mem_occ_pred(nm), mem_phase_pred(nm);

    for (long j = 0; j < n_steps; ++j) {
        const double t = t_i + static_cast<double>(j) * dt;
        const double t_next = t_i + static_cast<double>(j + 1) * dt;
        const double omega = spec.omega0 + st.delta_omega;

        endpoint_phases(st.theta, t, phi);
        const double f0 = ndot_of(st.mem_occupation, phi);

        // Heun predictor
        const double n_pred = st.n + dt * f0;
        const double theta_pred = st.theta + dt * omega;
        endpoint_phases(theta_pred, t_next, phi_end);
        for (size_t k = 0; k < nm; ++k) {
            const Complex psi0 = (st.n - occ_k[k]) * phi[k];
            const Complex psi1 = (n_pred - occ_k[k]) * phi_end[k];
            mem_occ_pred[k] = st.mem_occupation[k] + 0.5 * dt * (psi0 + psi1);
            mem_phase_pred[k] = st.mem_phase[k] + 0.5 * dt * (phi[k] + phi_end[k]);
        }
        const double f1 = ndot_of(mem_occ_pred, phi_end);
        const double domega_pred = domega_of(mem_phase_pred, phi_end);

        // corrector
        const double n_next = st.n + 0.5 * dt * (f0 + f1);
        const double theta_next =
            st.theta + 0.5 * dt * (omega + (spec.omega0 + domega_pred));
        endpoint_phases(theta_next, t_next, phi_end);
        for (size_t k = 0; k < nm; ++k) {
            const Complex psi0 = (st.n - occ_k[k]) * phi[k];
            const Complex psi1 = (n_next - occ_k[k]) * phi_end[k];
            st.mem_occupation[k] += 0.5 * dt * (psi0 + psi1);
            st.mem_phase[k] += 0.5 * dt * (phi[k] + phi_end[k]);
            if (!std::isfinite(st.mem_occupation[k].real()) ||
                !std::isfinite(st.mem_occupation[k].imag()) ||
                !std::isfinite(st.mem_phase[k].real()) ||
                !std::isfinite(st.mem_phase[k].imag()))
                throw solver_error("nonmarkovian_solve: accumulator overflow",
                                   t_next);
        }

        st.n = n_next;
        st.t = t_next;
        st.theta = theta_next;
        st.delta_omega = domega_of(st.mem_phase, phi_end);
        const double ndot_next = ndot_of(st.mem_occupation, phi_end);

        if (!std::isfinite(st.n) || st.n < -options.negative_n_tolerance)
            throw solver_error("nonmarkovian_solve: occupation left the "
                               "admissible region",
                               t_next);

        out.samples.push_back({t_next, st.n, ndot_next, st.delta_omega, st.theta});
    }

    out.final_state = std::move(st);
    return out;
}

MarkovianSeries markovian_solve(double n0, double n_eq, double kappa_value,
                                double dt, double t_f) {
    if (!(kappa_value > 0.0))
        throw std::invalid_argument("markovian_solve: kappa must be > 0");
    if (!(dt > 0.0)) throw std::invalid_argument("markovian_solve: dt must be > 0");
    if (!(t_f > 0.0)) throw std::invalid_argument("markovian_solve: t_f must be > 0");

    const auto n_steps = static_cast<long>(std::llround(t_f / dt));
    if (n_steps < 1)
        throw std::invalid_argument("markovian_solve: horizon shorter than dt");

    auto rhs = [&](double n) { return -2.0 * kappa_value * (n - n_eq); };

    MarkovianSeries out;
    out.t.reserve(n_steps + 1);
    out.n_rk4.reserve(n_steps + 1);
    out.n_closed.reserve(n_steps + 1);

    double n = n0;
    for (long j = 0; j <= n_steps; ++j) {
        const double t = static_cast<double>(j) * dt;
        out.t.push_back(t);
        out.n_rk4.push_back(n);
        out.n_closed.push_back(n_eq + (n0 - n_eq) * std::exp(-2.0 * kappa_value * t));
        if (j == n_steps) break;
        const double k1 = rhs(n);
        const double k2 = rhs(n + 0.5 * dt * k1);
        const double k3 = rhs(n + 0.5 * dt * k2);
        const double k4 = rhs(n + dt * k3);
        n += dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
    return out;
}

} // namespace ncdyn::kinetic

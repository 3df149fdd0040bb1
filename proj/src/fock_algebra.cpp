#include "ncdyn/fock_algebra.hpp"

#include <cmath>
#include <stdexcept>

namespace ncdyn::fock {

namespace {

void require_spec(const HuSpec& s) {
    if (!(s.n >= 0.0))
        throw std::invalid_argument("HuSpec: occupation n must be >= 0");
    if (!std::isfinite(s.omega) || !std::isfinite(s.n) ||
        !std::isfinite(s.ndot) || !std::isfinite(s.gamma))
        throw std::invalid_argument("HuSpec: parameters must be finite");
    if (!std::isfinite(s.zeta1()) || !std::isfinite(s.zeta2()) ||
        !std::isfinite(s.zeta3()))
        throw std::invalid_argument("HuSpec: non-finite zeta coefficients");
}

int side_of(Eigen::Index dim) {
    const int d = static_cast<int>(std::lround(std::sqrt(double(dim))));
    if (d < 1 || Eigen::Index(d) * d != dim)
        throw std::invalid_argument(
            "operator dimension is not a perfect square (not a doubled space)");
    return d;
}

} // namespace

DoubledOperators doubled_operators(int n_max) {
    if (n_max < 1)
        throw std::invalid_argument("doubled_operators requires n_max >= 1");
    const int d = n_max + 1;
    const int dim = fock_dim(n_max);
    CMat a1 = CMat::Zero(dim, dim);
    CMat a2 = CMat::Zero(dim, dim);
    for (int n1 = 0; n1 < d; ++n1) {
        for (int n2 = 0; n2 < d; ++n2) {
            const int col = fock_index(n_max, n1, n2);
            if (n1 >= 1)
                a1(fock_index(n_max, n1 - 1, n2), col) = std::sqrt(double(n1));
            if (n2 >= 1)
                a2(fock_index(n_max, n1, n2 - 1), col) = std::sqrt(double(n2));
        }
    }
    CMat a1d = a1.adjoint();
    CMat a2d = a2.adjoint();
    return {n_max, std::move(a1), std::move(a1d), std::move(a2), std::move(a2d)};
}

CMat tilde(const CMat& x) {
    if (x.rows() != x.cols())
        throw std::invalid_argument("tilde requires a square operator");
    const int d = side_of(x.rows());
    auto swapped = [d](Eigen::Index i) {
        const Eigen::Index n1 = i / d, n2 = i % d;
        return n2 * d + n1;
    };
    CMat y(x.rows(), x.cols());
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
        const Eigen::Index si = swapped(i);
        for (Eigen::Index j = 0; j < x.cols(); ++j)
            y(i, j) = std::conj(x(si, swapped(j)));
    }
    return y;
}

CRow bra_identity(int n_max) {
    CRow bra = CRow::Zero(fock_dim(n_max));
    for (int n = 0; n <= n_max; ++n) bra(fock_index(n_max, n, n)) = 1.0;
    return bra;
}

CVec thermal_ket(double n, int n_max) {
    if (!(n >= 0.0) || !std::isfinite(n))
        throw std::invalid_argument("thermal_ket requires finite n >= 0");
    if (n_max < 1) throw std::invalid_argument("thermal_ket requires n_max >= 1");
    const double ratio = n / (1.0 + n);
    CVec ket = CVec::Zero(fock_dim(n_max));
    double c = 1.0 / (1.0 + n);
    for (int m = 0; m <= n_max; ++m) {
        ket(fock_index(n_max, m, m)) = c;
        c *= ratio;
    }
    return ket;
}

CMat build_hu(const HuSpec& spec, int n_max) {
    require_spec(spec);
    if (n_max < 1) throw std::invalid_argument("build_hu requires n_max >= 1");
    const double z1 = spec.zeta1();
    const double z2 = spec.zeta2();
    const double z3 = spec.zeta3();
    const Complex i_unit(0.0, 1.0);

    const int dim = fock_dim(n_max);
    CMat h = CMat::Zero(dim, dim);
    for (int n1 = 0; n1 <= n_max; ++n1) {
        for (int n2 = 0; n2 <= n_max; ++n2) {
            const int col = fock_index(n_max, n1, n2);
            h(col, col) = spec.omega * double(n1 - n2) +
                          i_unit * (z3 * double(n1 + n2) - z2);
            if (n1 >= 1 && n2 >= 1)
                h(fock_index(n_max, n1 - 1, n2 - 1), col) =
                    i_unit * z1 * std::sqrt(double(n1) * double(n2));
            if (n1 < n_max && n2 < n_max)
                h(fock_index(n_max, n1 + 1, n2 + 1), col) =
                    i_unit * z2 * std::sqrt(double(n1 + 1) * double(n2 + 1));
        }
    }
    return h;
}

CMat build_hu_product_form(const HuSpec& spec, int n_max) {
    require_spec(spec);
    if (spec.gamma != 0.0)
        throw std::invalid_argument("product form is the gamma = 0 Hamiltonian");
    const auto ops = doubled_operators(n_max);
    const Complex i_unit(0.0, 1.0);
    const CMat number_part = ops.a1_dag * ops.a1 - ops.a2_dag * ops.a2;
    const CMat left = ops.a2 - ops.a1_dag;
    const CMat right = ops.a2_dag - ops.a1;
    return spec.omega * number_part - i_unit * spec.ndot * (left * right);
}

double masked_max_norm(const CRow& row, int n_max) {
    const int d = side_of(row.size());
    if (d != n_max + 1)
        throw std::invalid_argument("masked_max_norm: dimension mismatch");
    double best = 0.0;
    for (int n1 = 0; n1 < n_max; ++n1)
        for (int n2 = 0; n2 < n_max; ++n2)
            best = std::max(best, std::abs(row(fock_index(n_max, n1, n2))));
    return best;
}

double masked_max_norm(const CVec& col, int n_max) {
    CRow row = col.transpose();
    return masked_max_norm(row, n_max);
}

SubsidiaryResiduals subsidiary_residuals(const DoubledOperators& ops,
                                         const HuSpec& spec, const CVec& ket) {
    require_spec(spec);
    const int n_max = ops.n_max;
    if (ket.size() != fock_dim(n_max))
        throw std::invalid_argument("subsidiary_residuals: ket dimension mismatch");

    const CRow bra = bra_identity(n_max);
    const CMat hu = build_hu(spec, n_max);
    const double n = spec.n;

    const CRow r1 = bra * ops.a1 - bra * ops.a2_dag;
    const CRow r2 = bra * hu;
    const CVec r3 = (1.0 + n) * (ops.a1 * ket) - n * (ops.a2_dag * ket);
    const CVec r4 = (1.0 + n) * (ops.a2 * ket) - n * (ops.a1_dag * ket);

    return {masked_max_norm(r1, n_max), masked_max_norm(r2, n_max),
            masked_max_norm(r3, n_max), masked_max_norm(r4, n_max)};
}

SubsidiaryResiduals subsidiary_residuals(int n_max, const HuSpec& spec,
                                         const CVec& ket) {
    return subsidiary_residuals(doubled_operators(n_max), spec, ket);
}

Complex expectation(const CMat& x, double n, int n_max) {
    if (x.rows() != fock_dim(n_max) || x.cols() != fock_dim(n_max))
        throw std::invalid_argument("expectation: operator dimension mismatch");
    const CVec ket = thermal_ket(n, n_max);
    const CRow bra = bra_identity(n_max);
    return bra * (x * ket);
}

Complex expectation_word(std::span<const CMat* const> word, double n,
                         int n_max) {
    CVec ket = thermal_ket(n, n_max);
    for (auto it = word.rbegin(); it != word.rend(); ++it) {
        const CMat& op = **it;
        if (op.rows() != ket.size() || op.cols() != ket.size())
            throw std::invalid_argument("expectation_word: dimension mismatch");
        ket = op * ket;
    }
    const CRow bra = bra_identity(n_max);
    return bra * ket;
}

double thermal_causality_defect(const HuSpec& spec, int n_max) {
    if (n_max < 2)
        throw std::invalid_argument("thermal_causality_defect requires n_max >= 2");
    const auto ops = doubled_operators(n_max);
    const CMat hu = build_hu(spec, n_max);
    const CRow bra = bra_identity(n_max);

    const CRow base = bra * ops.a1;
    const CRow comm = (bra * ops.a1) * hu - (bra * hu) * ops.a1;

    // Least-squares coefficient lambda with comm = lambda * base over the
    // components below the truncation boundary.
    Complex num(0.0, 0.0);
    double den = 0.0;
    for (int n1 = 0; n1 < n_max; ++n1) {
        for (int n2 = 0; n2 < n_max; ++n2) {
            const int j = fock_index(n_max, n1, n2);
            num += comm(j) * std::conj(base(j));
            den += std::norm(base(j));
        }
    }
    if (den == 0.0)
        throw std::runtime_error("thermal_causality_defect: degenerate basis row");
    const Complex lambda = num / den;
    return std::abs(std::imag(lambda));
}

} // namespace ncdyn::fock

#ifndef NCDYN_FOCK_ALGEBRA_HPP
#define NCDYN_FOCK_ALGEBRA_HPP

#include <Eigen/Dense>

#include <complex>
#include <span>

namespace ncdyn::fock {

using Complex = std::complex<double>;
using CMat = Eigen::MatrixXcd;
using CVec = Eigen::VectorXcd;
using CRow = Eigen::RowVectorXcd;

// Truncated doubled Fock space spanned by |n1,n2>, n_a in [0, n_max],
// n1-major ordering: index = n1*(n_max+1) + n2.
inline int fock_dim(int n_max) { return (n_max + 1) * (n_max + 1); }
inline int fock_index(int n_max, int n1, int n2) {
    return n1 * (n_max + 1) + n2;
}

struct DoubledOperators {
    int n_max;
    CMat a1, a1_dag, a2, a2_dag;
};

// Ladder operators with exact matrix elements sqrt(n); a1 acts on the
// first index, a2 on the second. [a_a, a_a'^+] = delta on n_a < n_max.
DoubledOperators doubled_operators(int n_max);

// Antilinear tilde conjugation: tensor-factor swap combined with entrywise
// complex conjugation. Satisfies (AB)~ = A~ B~, (A^+)~ = (A~)^+,
// (cA)~ = c* A~ and tilde(tilde(X)) = X; maps a1 <-> a2.
CMat tilde(const CMat& x);

// <I| = sum_n <n,n|, unnormalized (unit entries).
CRow bra_identity(int n_max);

// |Psi_k> with components c_m = (n/(1+n))^m / (1+n) on |m,m>; encodes the
// occupation n. <I|Psi_k> = 1 - (n/(1+n))^{n_max+1}.
CVec thermal_ket(double n, int n_max);

struct HuSpec {
    double omega = 0.0;
    double n = 0.0;     // occupation, n >= 0
    double ndot = 0.0;  // occupation rate
    double gamma = 0.0; // free real function; thermal causality selects 0

    double zeta1() const { return ndot + gamma; }
    double zeta2() const { return ndot + n / (1.0 + n) * gamma; }
    double zeta3() const {
        return -ndot - (1.0 + 2.0 * n) / (2.0 * (1.0 + n)) * gamma;
    }
};

// H_u = omega (a1+a1 - a2+a2)
//       + i { zeta1 a1 a2 + zeta2 a1+ a2+ + zeta3 (a1+a1 + a2+a2) - zeta2 }.
// Assembled entrywise in the doubled number basis (identical to the ladder
// product expression on the truncated space).
CMat build_hu(const HuSpec& spec, int n_max);

// gamma = 0 reference form omega (a1+a1 - a2+a2) - i ndot (a2-a1+)(a2+-a1);
// coincides with build_hu on states below the truncation boundary.
CMat build_hu_product_form(const HuSpec& spec, int n_max);

struct SubsidiaryResiduals {
    double bra_ladder;        // r1 = ||<I|a1 - <I|a2+||
    double bra_hu;            // r2 = ||<I|H_u||
    double ket_annihilation1; // r3 = ||{(1+n)a1 - n a2+}|Psi_k>||
    double ket_annihilation2; // r4 = ||{(1+n)a2 - n a1+}|Psi_k>||
};

// Max-norm residuals over components with both indices < n_max; the ladder
// CCR is necessarily violated at the truncation boundary and that artifact
// must not enter the algebra checks. The ket conditions use spec.n.
SubsidiaryResiduals subsidiary_residuals(const DoubledOperators& ops,
                                         const HuSpec& spec, const CVec& ket);
SubsidiaryResiduals subsidiary_residuals(int n_max, const HuSpec& spec,
                                         const CVec& ket);

// <I| X |Psi_k(n)>; real for Hermitian physical observables.
Complex expectation(const CMat& x, double n, int n_max);

// <I| W[0] W[1] ... |Psi_k(n)> evaluated by successive matrix-vector
// products (no operator products are materialized).
Complex expectation_word(std::span<const CMat* const> word, double n,
                         int n_max);

// Magnitude of the damping part of the eigenvalue lambda in
// <I| [a1, H_u] = lambda <I| a1 (below the truncation boundary):
// |Im lambda| = gamma / (2(1+n)). Vanishes iff gamma = 0, realizing the
// thermal-causality selection; the remaining Re lambda = omega is the pure
// interaction-picture phase. Requires n_max >= 2.
double thermal_causality_defect(const HuSpec& spec, int n_max);

// Max |entry| over components with both indices < n_max.
double masked_max_norm(const CRow& row, int n_max);
double masked_max_norm(const CVec& col, int n_max);

} // namespace ncdyn::fock

#endif

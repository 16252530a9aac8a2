// SPDX-License-Identifier: Apache-2.0
//
// Small dense complex linear algebra: Hermitian matrices with exact
// symmetric storage and deterministic eigensolvers. Everything here is
// sized for arrays of a few dozen antennas, so dense O(M^3) routines are
// used throughout.

#ifndef MFDA_NUMERICS_HPP
#define MFDA_NUMERICS_HPP

#include <Eigen/Dense>
#include <complex>
#include <stdexcept>

namespace mfda {

using cxd = std::complex<double>;
using complex_vec = Eigen::VectorXcd;

/// Thrown when an input violates a documented precondition.
class validation_error : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Thrown when a numerical routine fails to converge or factorize.
class numerical_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Hermitian matrix with entry(i,j) == conj(entry(j,i)) guaranteed by
/// construction. The validating constructor rejects inputs whose
/// asymmetry exceeds 1e-12 relative to the matrix scale, then stores the
/// exact Hermitian part so downstream code never sees drift.
class herm_mat {
public:
    herm_mat() = default;

    /// Validates and symmetrizes a raw square complex matrix.
    explicit herm_mat(const Eigen::MatrixXcd& raw);

    /// scale * v v^H, Hermitian by construction (rank one).
    static herm_mat outer(const complex_vec& v, double scale = 1.0);

    static herm_mat zero(Eigen::Index m);
    static herm_mat identity(Eigen::Index m);

    const Eigen::MatrixXcd& mat() const { return m_; }
    Eigen::Index dim() const { return m_.rows(); }

    /// Real trace (imaginary part is zero for Hermitian storage).
    double trace_real() const { return m_.trace().real(); }

    herm_mat scaled(double s) const;
    herm_mat plus(const herm_mat& other) const;
    herm_mat plus_identity(double s) const;

    /// Real quadratic form v^H M v.
    double quad_form(const complex_vec& v) const;

private:
    struct exact_tag {};
    herm_mat(Eigen::MatrixXcd m, exact_tag) : m_(std::move(m)) {}
    Eigen::MatrixXcd m_;
};

struct eig_pair {
    double value = 0.0;
    complex_vec vector;
};

/// Rotates v by a global phase so its largest-magnitude entry is real and
/// non-negative (ties broken by lowest index). Makes eigenvectors
/// reproducible bit-for-bit across runs.
complex_vec canonical_phase(const complex_vec& v);

/// Largest eigenvalue and unit eigenvector of a Hermitian matrix, with the
/// canonical phase fix applied.
eig_pair leading_eigpair(const herm_mat& h);

/// Largest generalized eigenvalue lambda with A u = lambda B u for a
/// Hermitian pair with B positive definite, solved by Cholesky whitening.
/// Returns the unit eigenvector (in the original coordinates) with the
/// canonical phase fix.
eig_pair herm_gen_eig_max(const herm_mat& a_pd, const herm_mat& b_pd);

} // namespace mfda

#endif

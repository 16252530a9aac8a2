// SPDX-License-Identifier: Apache-2.0

#include "mfda/numerics.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

namespace mfda {

herm_mat::herm_mat(const Eigen::MatrixXcd& raw) {
    if (raw.rows() != raw.cols())
        throw validation_error("herm_mat: matrix must be square");
    const double scale = raw.cwiseAbs().maxCoeff();
    const double resid = (raw - raw.adjoint()).cwiseAbs().maxCoeff();
    if (scale > 0.0 && resid > 1e-12 * scale)
        throw validation_error("herm_mat: symmetry residual exceeds 1e-12 relative");
    m_ = 0.5 * (raw + raw.adjoint().eval());
    // Force exactly real diagonal; the average above can keep a tiny
    // imaginary residue on it.
    for (Eigen::Index i = 0; i < m_.rows(); ++i)
        m_(i, i) = cxd(m_(i, i).real(), 0.0);
}

herm_mat herm_mat::outer(const complex_vec& v, double scale) {
    Eigen::MatrixXcd m = scale * (v * v.adjoint());
    // v v^H is Hermitian up to rounding in the products; mirror the lower
    // triangle so storage is exact.
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        m(i, i) = cxd(m(i, i).real(), 0.0);
        for (Eigen::Index j = i + 1; j < m.cols(); ++j)
            m(j, i) = std::conj(m(i, j));
    }
    return herm_mat(std::move(m), exact_tag{});
}

herm_mat herm_mat::zero(Eigen::Index m) {
    return herm_mat(Eigen::MatrixXcd::Zero(m, m), exact_tag{});
}

herm_mat herm_mat::identity(Eigen::Index m) {
    return herm_mat(Eigen::MatrixXcd::Identity(m, m), exact_tag{});
}

herm_mat herm_mat::scaled(double s) const {
    return herm_mat(s * m_, exact_tag{});
}

herm_mat herm_mat::plus(const herm_mat& other) const {
    if (other.dim() != dim())
        throw validation_error("herm_mat::plus: dimension mismatch");
    return herm_mat(m_ + other.m_, exact_tag{});
}

herm_mat herm_mat::plus_identity(double s) const {
    Eigen::MatrixXcd m = m_;
    m.diagonal().array() += s;
    return herm_mat(std::move(m), exact_tag{});
}

double herm_mat::quad_form(const complex_vec& v) const {
    return (v.adjoint() * m_ * v)(0, 0).real();
}

complex_vec canonical_phase(const complex_vec& v) {
    Eigen::Index best = 0;
    double best_mag = -1.0;
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        const double mag = std::abs(v(i));
        if (mag > best_mag) {
            best_mag = mag;
            best = i;
        }
    }
    if (best_mag <= 0.0)
        return v; // zero vector, nothing to rotate
    const cxd rot = std::conj(v(best)) / best_mag;
    return rot * v;
}

eig_pair leading_eigpair(const herm_mat& h) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(h.mat());
    if (solver.info() != Eigen::Success)
        throw numerical_error("leading_eigpair: eigensolver did not converge");
    const Eigen::Index last = h.dim() - 1;
    eig_pair out;
    out.value = solver.eigenvalues()(last);
    complex_vec u = solver.eigenvectors().col(last);
    u.normalize();
    out.vector = canonical_phase(u);
    return out;
}

eig_pair herm_gen_eig_max(const herm_mat& a_pd, const herm_mat& b_pd) {
    if (a_pd.dim() != b_pd.dim())
        throw validation_error("herm_gen_eig_max: dimension mismatch");
    // Whiten with B = L L^H and solve the ordinary Hermitian problem on
    // L^-1 A L^-H; this keeps symmetry exactly, unlike forming B^-1 A.
    Eigen::LLT<Eigen::MatrixXcd> llt(b_pd.mat());
    if (llt.info() != Eigen::Success)
        throw numerical_error("herm_gen_eig_max: B is not positive definite");
    const Eigen::MatrixXcd l = llt.matrixL();
    Eigen::MatrixXcd w = l.triangularView<Eigen::Lower>().solve(a_pd.mat());
    w = l.triangularView<Eigen::Lower>().solve(w.adjoint().eval()).adjoint();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(0.5 * (w + w.adjoint().eval()));
    if (solver.info() != Eigen::Success)
        throw numerical_error("herm_gen_eig_max: eigensolver did not converge");
    const Eigen::Index last = a_pd.dim() - 1;
    eig_pair out;
    out.value = solver.eigenvalues()(last);
    // Back-transform u = L^-H y and renormalize in the original metric.
    complex_vec u = l.adjoint().triangularView<Eigen::Upper>().solve(
        solver.eigenvectors().col(last).eval());
    u.normalize();
    out.vector = canonical_phase(u);
    return out;
}

} // namespace mfda

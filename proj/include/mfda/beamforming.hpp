// SPDX-License-Identifier: Apache-2.0
//
// Closed-form transmit beamforming for the rank-one secrecy problem: the
// generalized-eigenvector optimum, an algebraic cross-check for its
// eigenvalue, the instantaneous secrecy capacity and the eavesdropper-free
// upper bound.

#ifndef MFDA_BEAMFORMING_HPP
#define MFDA_BEAMFORMING_HPP

#include "mfda/channel.hpp"

namespace mfda {

/// Transmit weight vector; entries carry sqrt(mW) so quadratic forms with
/// the noise-scaled SNR matrices are dimensionless.
struct beamformer {
    complex_vec w;
    double pmax_mw = 0.0;
};

/// Optimal beamformer w = sqrt(Pmax) u_max, where u_max is the leading
/// generalized eigenvector of (A + I/Pmax, B + I/Pmax). The achieved
/// capacity ratio equals the generalized eigenvalue.
beamformer optimal_abv(const channel_pair& pair, double pmax_mw);

/// Largest generalized eigenvalue of the beamforming problem in closed
/// form, via the two-dimensional reduction on span{h_e, h_e_perp}:
///   alpha^2 = |<h_ab, h_ae>|^2 / (sigma_b^2 ||h_ae||^2)
/// together with the noise-scaled channel gains. Agrees with
/// herm_gen_eig_max to solver precision and is strictly decreasing in
/// alpha^2 for fixed gains.
double lambda_max_closed_form(const channel_pair& pair, double pmax_mw);

/// log2((1 + w^H A w) / (1 + w^H B w)); negative for poor beamformers.
double secrecy_capacity_instant(const beamformer& bf, const channel_pair& pair);

/// Eavesdropper-free benchmark log2(1 + Lfs^2(r_b) Pmax M / sigma_b^2).
double upper_bound_bits(int m, const scenario& sc);

} // namespace mfda

#endif

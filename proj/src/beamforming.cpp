// SPDX-License-Identifier: Apache-2.0

#include "mfda/beamforming.hpp"

#include <cmath>

namespace mfda {

beamformer optimal_abv(const channel_pair& pair, double pmax_mw) {
    if (pmax_mw <= 0.0)
        throw validation_error("optimal_abv: Pmax must be positive");
    const double inv_p = 1.0 / pmax_mw;
    const eig_pair eig = herm_gen_eig_max(pair.a.plus_identity(inv_p),
                                          pair.b.plus_identity(inv_p));
    beamformer bf;
    bf.pmax_mw = pmax_mw;
    bf.w = std::sqrt(pmax_mw) * eig.vector;
    return bf;
}

double lambda_max_closed_form(const channel_pair& pair, double pmax_mw) {
    if (pmax_mw <= 0.0)
        throw validation_error("lambda_max_closed_form: Pmax must be positive");
    const double hae_norm2 = pair.h_ae.squaredNorm();
    if (hae_norm2 <= 0.0)
        throw validation_error("lambda_max_closed_form: degenerate Eve channel");

    // Noise-scaled gains and the projection of the Bob channel onto the
    // Eve direction. The rank-one structure makes both readable off the
    // SNR matrices directly.
    const double gain_bob = pair.a.trace_real();            // ||h_ab||^2 / sigma_b^2
    const double gain_eve = pair.b.trace_real();            // ||h_ae||^2 / sigma_e^2
    const double alpha2 = pair.a.quad_form(pair.h_ae) / hae_norm2;
    const double beta2 = std::max(0.0, gain_bob - alpha2);

    // Restricting the whitened pencil to span{h_e, h_e_perp} leaves a 2x2
    // quadratic whose larger root is the generalized eigenvalue:
    //   (mu - (1/P + E + q beta^2)) (mu - (1/P + alpha^2)) = q alpha^2 beta^2
    // with q = 1 + P E, and lambda = P mu / q.
    const double q = 1.0 + pmax_mw * gain_eve;
    const double a = 1.0 / pmax_mw + gain_eve + q * beta2;
    const double b = 1.0 / pmax_mw + alpha2;
    const double half_gap = 0.5 * (a - b);
    const double mu = 0.5 * (a + b) + std::sqrt(half_gap * half_gap + q * alpha2 * beta2);
    return pmax_mw * mu / q;
}

double secrecy_capacity_instant(const beamformer& bf, const channel_pair& pair) {
    const double num = 1.0 + pair.a.quad_form(bf.w);
    const double den = 1.0 + pair.b.quad_form(bf.w);
    return std::log2(num / den);
}

double upper_bound_bits(int m, const scenario& sc) {
    if (m <= 0)
        return 0.0;
    const double snr = path_loss_power(sc.bob.r_m, leg::bob, sc) * sc.pmax_mw *
                       static_cast<double>(m) / sc.noise_bob_mw;
    return std::log2(1.0 + snr);
}

} // namespace mfda

// SPDX-License-Identifier: Apache-2.0
//
// Array geometry, line-of-sight channel model and the rank-one SNR
// matrices of the transmit optimization. All angles are radians and all
// powers are milliwatts once data reaches this layer; the config layer is
// responsible for dB and degree conversions.

#ifndef MFDA_CHANNEL_HPP
#define MFDA_CHANNEL_HPP

#include "mfda/numerics.hpp"

#include <optional>
#include <vector>

namespace mfda {

enum class leg { bob, eve };

/// Polar coordinates of a receiver relative to the first array element.
struct polar_point {
    double r_m = 0.0;
    double theta_rad = 0.0;
};

/// Linear array of M elements on a 1D segment. Element 0 is pinned to the
/// origin; positions are strictly increasing with minimum spacing d0_m and
/// bounded by dmax_m. Per-element frequencies live in
/// [fc_hz, fc_hz + delta_f_hz].
struct array_config {
    int m = 0;
    std::vector<double> x;       // element positions [m]
    std::vector<double> f;       // element frequencies [Hz]
    double fc_hz = 10e9;         // carrier
    double delta_f_hz = 1e9;     // frequency increment budget
    double d0_m = 0.0;           // minimum element spacing
    double dmax_m = 0.0;         // movable boundary

    /// Throws validation_error naming the violated constraint.
    void validate() const;
};

/// Link geometry, noise levels and power budget of one experiment.
struct scenario {
    polar_point bob{1000.0, 0.0};
    polar_point eve{1000.0, 0.0};
    double noise_bob_mw = 1e-10;  // sigma_b^2
    double noise_eve_mw = 1e-10;  // sigma_e^2
    double pmax_mw = 10.0;
    double pathloss_c_db = -30.0; // power gain at the reference distance
    double pathloss_ref_m = 1.0;
    double alpha_bob = 2.0;       // path loss exponent, Alice->Bob
    double alpha_eve = 3.0;       // path loss exponent, Alice->Eve
    double c_mps = 299792458.0;   // propagation speed (overridable)

    void validate() const;
    double wavelength_m(double fc_hz) const { return c_mps / fc_hz; }
};

/// Delay-compensated rank-one SNR matrices A (Bob) and B (Eve) together
/// with the raw channel vectors they were built from.
struct channel_pair {
    complex_vec h_ab;
    complex_vec h_ae;
    herm_mat a;  // noise-scaled outer product of the Bob channel
    herm_mat b;  // noise-scaled outer product of the Eve channel
};

/// Squared path loss gain Lfs^2(r) = 10^(C_dB/10) * (r/R)^(-alpha).
/// The channel amplitude is its square root.
double path_loss_power(double r_m, leg which, const scenario& sc);

/// Per-element complex channel at time t for a receiver at (r, theta):
/// entry m is sqrt(Lfs^2(r)) * exp(-j 2 pi f_m (t - (r - x_m sin theta)/c)).
complex_vec steering_vector(double t_s, double r_m, double theta_rad, leg which,
                            const array_config& arr, const scenario& sc);

/// Differential delays tau_m = x_m (sin theta_e - sin theta_b)/c + (r_b - r_e)/c.
/// When eve_sample is set its coordinates replace the nominal Eve position.
std::vector<double> tau_vector(const array_config& arr, const scenario& sc,
                               std::optional<polar_point> eve_sample = std::nullopt);

/// Squared magnitude of the Bob/Eve channel inner product with path loss
/// stripped: M + sum_{m != n} cos(2 pi (f_m tau_m - f_n tau_n)). Time drops
/// out antenna by antenna, so no t argument is needed.
double inner_product_sq(const array_config& arr, const scenario& sc,
                        std::optional<polar_point> eve_sample = std::nullopt);

/// Builds the delay-compensated channels at time t and the SNR matrices
/// A = h_ab h_ab^H / sigma_b^2 and B = h_ae h_ae^H / sigma_e^2.
channel_pair channel_matrices(double t_s, const array_config& arr, const scenario& sc,
                              std::optional<polar_point> eve_sample = std::nullopt);

/// PA reference geometry: half-wavelength spacing, all elements on the
/// carrier. Throws if the half-wavelength grid violates the array bounds.
array_config make_reference_array(int m, double fc_hz, double delta_f_hz,
                                  double d0_m, double dmax_m, const scenario& sc);

} // namespace mfda

#endif

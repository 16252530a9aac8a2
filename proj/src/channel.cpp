// SPDX-License-Identifier: Apache-2.0

#include "mfda/channel.hpp"

#include <cmath>
#include <numbers>
#include <string>

namespace mfda {

namespace {
constexpr double two_pi = 2.0 * std::numbers::pi;
}

void array_config::validate() const {
    if (m < 1)
        throw validation_error("array: M must be at least 1");
    if (static_cast<int>(x.size()) != m || static_cast<int>(f.size()) != m)
        throw validation_error("array: x and f must both have M entries");
    if (x[0] != 0.0)
        throw validation_error("array: x[0] must be 0 (constraint 10c)");
    if (x[m - 1] > dmax_m + 1e-12 * std::max(1.0, dmax_m))
        throw validation_error("array: x[M-1] exceeds the movable boundary (constraint 10c)");
    for (int i = 1; i < m; ++i) {
        if (x[i] - x[i - 1] < d0_m - 1e-12 * std::max(1.0, d0_m))
            throw validation_error("array: spacing below D0 at element " + std::to_string(i) +
                                   " (constraint 10d)");
    }
    if (fc_hz <= 0.0 || delta_f_hz < 0.0)
        throw validation_error("array: carrier must be positive and the frequency budget non-negative");
    const double f_hi = fc_hz + delta_f_hz;
    for (int i = 0; i < m; ++i) {
        const double tol = 1e-9 * fc_hz;
        if (f[i] < fc_hz - tol || f[i] > f_hi + tol)
            throw validation_error("array: f[" + std::to_string(i) +
                                   "] outside [fc, fc + dF] (constraint 10e)");
    }
    if (d0_m < 0.0 || dmax_m < 0.0)
        throw validation_error("array: D0 and Dmax must be non-negative");
}

void scenario::validate() const {
    if (bob.r_m <= 0.0 || eve.r_m <= 0.0)
        throw validation_error("scenario: ranges must be positive");
    const double half_pi = std::numbers::pi / 2.0;
    if (std::abs(bob.theta_rad) >= half_pi || std::abs(eve.theta_rad) >= half_pi)
        throw validation_error("scenario: |theta| must be below 90 degrees");
    if (noise_bob_mw <= 0.0 || noise_eve_mw <= 0.0 || pmax_mw <= 0.0)
        throw validation_error("scenario: powers must be positive");
    if (pathloss_ref_m <= 0.0 || c_mps <= 0.0)
        throw validation_error("scenario: reference distance and propagation speed must be positive");
}

double path_loss_power(double r_m, leg which, const scenario& sc) {
    if (r_m <= 0.0)
        throw validation_error("path_loss_power: distance must be positive");
    const double alpha = (which == leg::bob) ? sc.alpha_bob : sc.alpha_eve;
    return std::pow(10.0, sc.pathloss_c_db / 10.0) *
           std::pow(r_m / sc.pathloss_ref_m, -alpha);
}

complex_vec steering_vector(double t_s, double r_m, double theta_rad, leg which,
                            const array_config& arr, const scenario& sc) {
    arr.validate();
    const double amp = std::sqrt(path_loss_power(r_m, which, sc));
    const double sin_theta = std::sin(theta_rad);
    complex_vec h(arr.m);
    for (int i = 0; i < arr.m; ++i) {
        const double phase = -two_pi * arr.f[i] * (t_s - (r_m - arr.x[i] * sin_theta) / sc.c_mps);
        h(i) = amp * std::polar(1.0, phase);
    }
    return h;
}

std::vector<double> tau_vector(const array_config& arr, const scenario& sc,
                               std::optional<polar_point> eve_sample) {
    const polar_point eve = eve_sample.value_or(sc.eve);
    const double slope = (std::sin(eve.theta_rad) - std::sin(sc.bob.theta_rad)) / sc.c_mps;
    const double offset = (sc.bob.r_m - eve.r_m) / sc.c_mps;
    std::vector<double> tau(arr.m);
    for (int i = 0; i < arr.m; ++i)
        tau[i] = arr.x[i] * slope + offset;
    return tau;
}

double inner_product_sq(const array_config& arr, const scenario& sc,
                        std::optional<polar_point> eve_sample) {
    const std::vector<double> tau = tau_vector(arr, sc, eve_sample);
    double sum = static_cast<double>(arr.m);
    for (int i = 0; i < arr.m; ++i) {
        const double pi_phase = arr.f[i] * tau[i];
        for (int j = 0; j < arr.m; ++j) {
            if (j == i)
                continue;
            sum += std::cos(two_pi * (pi_phase - arr.f[j] * tau[j]));
        }
    }
    return sum;
}

channel_pair channel_matrices(double t_s, const array_config& arr, const scenario& sc,
                              std::optional<polar_point> eve_sample) {
    const polar_point eve = eve_sample.value_or(sc.eve);
    channel_pair out;
    out.h_ab = steering_vector(t_s + sc.bob.r_m / sc.c_mps, sc.bob.r_m,
                               sc.bob.theta_rad, leg::bob, arr, sc);
    out.h_ae = steering_vector(t_s + eve.r_m / sc.c_mps, eve.r_m,
                               eve.theta_rad, leg::eve, arr, sc);
    out.a = herm_mat::outer(out.h_ab, 1.0 / sc.noise_bob_mw);
    out.b = herm_mat::outer(out.h_ae, 1.0 / sc.noise_eve_mw);
    return out;
}

array_config make_reference_array(int m, double fc_hz, double delta_f_hz,
                                  double d0_m, double dmax_m, const scenario& sc) {
    array_config arr;
    arr.m = m;
    arr.fc_hz = fc_hz;
    arr.delta_f_hz = delta_f_hz;
    arr.d0_m = d0_m;
    arr.dmax_m = dmax_m;
    const double half_lambda = 0.5 * sc.wavelength_m(fc_hz);
    arr.x.resize(m);
    arr.f.assign(m, fc_hz);
    for (int i = 0; i < m; ++i)
        arr.x[i] = i * half_lambda;
    arr.validate();
    return arr;
}

} // namespace mfda

#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "ris/numerics.hpp"

namespace ris {

using Vec3 = std::array<double, 3>;

// Unit helpers; powers are stored linearly in watts internally, dB/dBm only
// at the configuration boundary.
double db_to_linear(double db);
double linear_to_db(double lin);
double dbm_to_watts(double dbm);
double watts_to_dbm(double w);

constexpr double kSpeedOfLight = 2.99792458e8;

enum class LinkId {
    BsToRis1,   // H1
    BsToRis2,   // H2
    Ris1ToRis2, // G
    Ris1ToUser, // h1k
    Ris2ToUser, // h2k
};

const char* link_name(LinkId link);

struct Geometry {
    Vec3 bs_pos{0.0, 0.0, 15.0};
    Vec3 ris1_pos{20.0, 10.0, 2.0};
    Vec3 ris2_pos{40.0, 10.0, 2.0};
    Vec3 user_center{60.0, 0.0, 1.5};
    double user_radius = 5.0;
    index_t n_bs_antennas = 4;
    index_t m1_elements = 16;
    index_t m2_elements = 16;
    index_t n_users = 4;
    double carrier_freq = 2.4e9;
    // zero means lambda/2 derived from carrier_freq
    double antenna_spacing_bs = 0.0;
    double element_spacing_ris = 0.0;

    double wavelength() const { return kSpeedOfLight / carrier_freq; }
    double bs_spacing() const {
        return antenna_spacing_bs > 0.0 ? antenna_spacing_bs : wavelength() / 2.0;
    }
    double ris_spacing() const {
        return element_spacing_ris > 0.0 ? element_spacing_ris
                                         : wavelength() / 2.0;
    }
    void validate() const;
};

struct PathLossParams {
    double pl0_db = -30.0;
    double d0 = 1.0;
    double exponent_strong = 2.2;  // BS->RIS1, RIS1->RIS2, RIS2->user
    double exponent_weak = 3.0;    // BS->RIS2, RIS1->user
    double exponent_for(LinkId link) const;
    void validate() const;
};

struct RicianParams {
    double bs_to_ris1 = 10.0;
    double bs_to_ris2 = 1.0;
    double ris1_to_ris2 = 10.0;
    double ris1_to_user = 1.0;
    double ris2_to_user = 10.0;
    double factor_for(LinkId link) const;
    void validate() const;
};

struct ChannelSet {
    CMatrix h1;                // M1 x N
    CMatrix h2;                // M2 x N
    CMatrix g;                 // M2 x M1
    std::vector<CVector> h1k;  // K vectors, length M1
    std::vector<CVector> h2k;  // K vectors, length M2
    double noise_ris1 = 0.0;   // sigma_1^2, watts
    double noise_ris2 = 0.0;   // sigma_2^2, watts
    std::vector<double> noise_users;  // sigma_k^2, watts

    index_t n_users() const { return static_cast<index_t>(h1k.size()); }
    index_t m1() const { return h1.rows(); }
    index_t m2() const { return h2.rows(); }
    index_t n_bs() const { return h1.cols(); }
};

// linear power gain 10^((PL0 - 10 b log10(d/d0)) / 10)
double path_loss(const PathLossParams& params, LinkId link, double distance);

// ULA steering vector, entry i = exp(j 2 pi spacing/lambda * i * sin(angle))
CVector steering(index_t n, double spacing, double wavelength, double angle);

struct SynthesisOptions {
    double noise_power_w = 1e-11;  // -80 dBm
};

// Draws the five channel blocks. Identical (geometry, params, seed) give a
// bit-identical ChannelSet.
ChannelSet synthesize(const Geometry& geom, const PathLossParams& pl,
                      const RicianParams& rice, std::uint64_t seed,
                      const SynthesisOptions& opts = {});

}  // namespace ris

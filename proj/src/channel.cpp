#include "ris/channel.hpp"

#include <cmath>

#include "ris/rng.hpp"

namespace ris {

double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
double linear_to_db(double lin) { return 10.0 * std::log10(lin); }
double dbm_to_watts(double dbm) { return std::pow(10.0, (dbm - 30.0) / 10.0); }
double watts_to_dbm(double w) { return 10.0 * std::log10(w) + 30.0; }

const char* link_name(LinkId link) {
    switch (link) {
        case LinkId::BsToRis1: return "bs-ris1";
        case LinkId::BsToRis2: return "bs-ris2";
        case LinkId::Ris1ToRis2: return "ris1-ris2";
        case LinkId::Ris1ToUser: return "ris1-user";
        case LinkId::Ris2ToUser: return "ris2-user";
    }
    throw Error("link_name: unknown link id");
}

void Geometry::validate() const {
    if (n_bs_antennas < 1 || m1_elements < 1 || m2_elements < 1 || n_users < 1)
        throw ConfigError("geometry: counts must be >= 1");
    if (carrier_freq <= 0.0) throw ConfigError("geometry: carrier_freq <= 0");
    if (bs_spacing() <= 0.0 || ris_spacing() <= 0.0)
        throw ConfigError("geometry: spacings must be positive");
    if (user_radius < 0.0) throw ConfigError("geometry: negative user radius");
    auto same = [](const Vec3& a, const Vec3& b) {
        return a[0] == b[0] && a[1] == b[1] && a[2] == b[2];
    };
    if (same(bs_pos, ris1_pos) || same(bs_pos, ris2_pos) ||
        same(ris1_pos, ris2_pos))
        throw ConfigError("geometry: BS/RIS positions must be distinct");
}

double PathLossParams::exponent_for(LinkId link) const {
    switch (link) {
        case LinkId::BsToRis1:
        case LinkId::Ris1ToRis2:
        case LinkId::Ris2ToUser:
            return exponent_strong;
        case LinkId::BsToRis2:
        case LinkId::Ris1ToUser:
            return exponent_weak;
    }
    throw Error("path loss: unknown link id");
}

void PathLossParams::validate() const {
    if (exponent_strong <= 0.0 || exponent_weak <= 0.0)
        throw ConfigError("path loss: exponents must be positive");
    if (d0 <= 0.0) throw ConfigError("path loss: d0 must be positive");
}

double RicianParams::factor_for(LinkId link) const {
    switch (link) {
        case LinkId::BsToRis1: return bs_to_ris1;
        case LinkId::BsToRis2: return bs_to_ris2;
        case LinkId::Ris1ToRis2: return ris1_to_ris2;
        case LinkId::Ris1ToUser: return ris1_to_user;
        case LinkId::Ris2ToUser: return ris2_to_user;
    }
    throw Error("rician: unknown link id");
}

void RicianParams::validate() const {
    for (LinkId l : {LinkId::BsToRis1, LinkId::BsToRis2, LinkId::Ris1ToRis2,
                     LinkId::Ris1ToUser, LinkId::Ris2ToUser})
        if (factor_for(l) < 0.0)
            throw ConfigError("rician: factors must be nonnegative");
}

double path_loss(const PathLossParams& params, LinkId link, double distance) {
    if (distance <= 0.0) throw Error("path_loss: distance must be positive");
    const double beta = params.exponent_for(link);
    const double pl_db =
        params.pl0_db - 10.0 * beta * std::log10(distance / params.d0);
    return db_to_linear(pl_db);
}

CVector steering(index_t n, double spacing, double wavelength, double angle) {
    CVector v(n);
    const double phase_step =
        2.0 * M_PI * spacing / wavelength * std::sin(angle);
    for (index_t i = 0; i < n; ++i) {
        const double p = phase_step * static_cast<double>(i);
        v[i] = cplx(std::cos(p), std::sin(p));
    }
    return v;
}

namespace {

double distance(const Vec3& a, const Vec3& b) {
    const double dx = a[0] - b[0], dy = a[1] - b[1], dz = a[2] - b[2];
    return std::sqrt(dx * dx + dy * dy + dz * dz);
}

// Arrays lie along the x-axis: sin(angle) is the direction cosine of the
// link direction onto x, seen from the array at `from` toward `to`.
double axis_angle(const Vec3& from, const Vec3& to) {
    const double d = distance(from, to);
    return std::asin((to[0] - from[0]) / d);
}

constexpr double kPureLosFactor = 1e12;

// Rician block from tx array (n_tx, spacing_tx at pos_tx) to rx array.
CMatrix draw_block(Rng& rng, double beta, double rician, index_t n_rx,
                   double spacing_rx, const Vec3& pos_rx, index_t n_tx,
                   double spacing_tx, const Vec3& pos_tx, double wavelength) {
    const CVector a_r =
        steering(n_rx, spacing_rx, wavelength, axis_angle(pos_rx, pos_tx));
    const CVector a_t =
        steering(n_tx, spacing_tx, wavelength, axis_angle(pos_tx, pos_rx));
    CMatrix los = outer(a_r, a_t);
    const double amp = std::sqrt(beta);
    if (rician >= kPureLosFactor) return cplx(amp, 0.0) * std::move(los);
    const double w_los = std::sqrt(rician / (rician + 1.0));
    const double w_nlos = std::sqrt(1.0 / (rician + 1.0));
    CMatrix h(n_rx, n_tx);
    for (index_t i = 0; i < n_rx; ++i)
        for (index_t j = 0; j < n_tx; ++j)
            h(i, j) = amp * (w_los * los(i, j) + w_nlos * rng.cgaussian());
    return h;
}

}  // namespace

ChannelSet synthesize(const Geometry& geom, const PathLossParams& pl,
                      const RicianParams& rice, std::uint64_t seed,
                      const SynthesisOptions& opts) {
    geom.validate();
    pl.validate();
    rice.validate();

    const double lam = geom.wavelength();
    const double ds = geom.ris_spacing();
    const double dt = geom.bs_spacing();

    // user drops first, from their own stream
    std::vector<Vec3> users(static_cast<std::size_t>(geom.n_users));
    {
        Rng pos = Rng::stream(seed, "user-pos");
        for (auto& u : users) {
            const double r = geom.user_radius * std::sqrt(pos.uniform());
            const double a = 2.0 * M_PI * pos.uniform();
            u = {geom.user_center[0] + r * std::cos(a),
                 geom.user_center[1] + r * std::sin(a), geom.user_center[2]};
        }
    }

    auto block = [&](LinkId link, index_t n_rx, const Vec3& pos_rx,
                     index_t n_tx, double spacing_tx, const Vec3& pos_tx,
                     std::uint64_t user_index) {
        Rng rng = Rng::stream(seed, link_name(link), user_index);
        const double beta =
            path_loss(pl, link, distance(pos_tx, pos_rx));
        return draw_block(rng, beta, rice.factor_for(link), n_rx, ds, pos_rx,
                          n_tx, spacing_tx, pos_tx, lam);
    };

    ChannelSet ch{
        block(LinkId::BsToRis1, geom.m1_elements, geom.ris1_pos,
              geom.n_bs_antennas, dt, geom.bs_pos, 0),
        block(LinkId::BsToRis2, geom.m2_elements, geom.ris2_pos,
              geom.n_bs_antennas, dt, geom.bs_pos, 0),
        block(LinkId::Ris1ToRis2, geom.m2_elements, geom.ris2_pos,
              geom.m1_elements, ds, geom.ris1_pos, 0),
        {},
        {},
        opts.noise_power_w,
        opts.noise_power_w,
        std::vector<double>(static_cast<std::size_t>(geom.n_users),
                            opts.noise_power_w)};

    for (index_t k = 0; k < geom.n_users; ++k) {
        const Vec3& u = users[static_cast<std::size_t>(k)];
        // user side is a single antenna; represent the vector channel at the
        // RIS side (column of the 1-antenna block)
        CMatrix b1 = [&] {
            Rng rng = Rng::stream(seed, link_name(LinkId::Ris1ToUser),
                                  static_cast<std::uint64_t>(k) + 1);
            const double beta =
                path_loss(pl, LinkId::Ris1ToUser, distance(geom.ris1_pos, u));
            return draw_block(rng, beta, rice.factor_for(LinkId::Ris1ToUser),
                              geom.m1_elements, ds, geom.ris1_pos, 1, dt, u,
                              lam);
        }();
        CMatrix b2 = [&] {
            Rng rng = Rng::stream(seed, link_name(LinkId::Ris2ToUser),
                                  static_cast<std::uint64_t>(k) + 1);
            const double beta =
                path_loss(pl, LinkId::Ris2ToUser, distance(geom.ris2_pos, u));
            return draw_block(rng, beta, rice.factor_for(LinkId::Ris2ToUser),
                              geom.m2_elements, ds, geom.ris2_pos, 1, dt, u,
                              lam);
        }();
        CVector v1(geom.m1_elements), v2(geom.m2_elements);
        for (index_t i = 0; i < geom.m1_elements; ++i) v1[i] = b1(i, 0);
        for (index_t i = 0; i < geom.m2_elements; ++i) v2[i] = b2(i, 0);
        ch.h1k.push_back(std::move(v1));
        ch.h2k.push_back(std::move(v2));
    }
    return ch;
}

}  // namespace ris

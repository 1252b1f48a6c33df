#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "ris/channel.hpp"

using namespace ris;

namespace {

double dist(const Vec3& a, const Vec3& b) {
    return std::sqrt((a[0] - b[0]) * (a[0] - b[0]) +
                     (a[1] - b[1]) * (a[1] - b[1]) +
                     (a[2] - b[2]) * (a[2] - b[2]));
}

double mean_entry_power(const CMatrix& m) {
    double acc = 0.0;
    for (index_t i = 0; i < m.rows(); ++i)
        for (index_t j = 0; j < m.cols(); ++j) acc += std::norm(m(i, j));
    return acc / static_cast<double>(m.rows() * m.cols());
}

Geometry small_geometry() {
    Geometry g;
    g.n_bs_antennas = 2;
    g.m1_elements = 4;
    g.m2_elements = 4;
    g.n_users = 2;
    return g;
}

}  // namespace

TEST_CASE("unit conversions round-trip") {
    CHECK(db_to_linear(0.0) == doctest::Approx(1.0));
    CHECK(db_to_linear(10.0) == doctest::Approx(10.0));
    CHECK(dbm_to_watts(30.0) == doctest::Approx(1.0));
    CHECK(dbm_to_watts(-80.0) == doctest::Approx(1e-11));
    CHECK(linear_to_db(db_to_linear(7.3)) == doctest::Approx(7.3));
    CHECK(watts_to_dbm(dbm_to_watts(-12.5)) == doctest::Approx(-12.5));
}

TEST_CASE("path loss pinned values") {
    PathLossParams pl;  // PL0 = -30 dB at d0 = 1 m
    // weak link (b = 3) at 10 m: -30 - 30 = -60 dB
    CHECK(path_loss(pl, LinkId::BsToRis2, 10.0) == doctest::Approx(1e-6));
    // strong link (b = 2.2) at 1 m: just PL0
    CHECK(path_loss(pl, LinkId::BsToRis1, 1.0) == doctest::Approx(1e-3));
    // strong link at 100 m: -30 - 44 = -74 dB
    CHECK(path_loss(pl, LinkId::Ris1ToRis2, 100.0) ==
          doctest::Approx(db_to_linear(-74.0)).epsilon(1e-12));
    // exponent assignment per link class
    CHECK(pl.exponent_for(LinkId::BsToRis1) == 2.2);
    CHECK(pl.exponent_for(LinkId::Ris2ToUser) == 2.2);
    CHECK(pl.exponent_for(LinkId::BsToRis2) == 3.0);
    CHECK(pl.exponent_for(LinkId::Ris1ToUser) == 3.0);
}

TEST_CASE("steering vector modulus and phase progression") {
    const double lambda = 0.125;
    const double spacing = lambda / 2.0;
    const double angle = 0.7;
    CVector s = steering(8, spacing, lambda, angle);
    REQUIRE(s.len() == 8);
    CHECK(std::abs(s[0] - cplx(1.0, 0.0)) < 1e-14);
    const cplx step = s[1];
    CHECK(std::abs(std::abs(step) - 1.0) < 1e-14);
    CHECK(std::arg(step) ==
          doctest::Approx(2.0 * M_PI * 0.5 * std::sin(angle)));
    for (index_t i = 0; i < 8; ++i) {
        CHECK(std::abs(std::abs(s[i]) - 1.0) < 1e-14);
        if (i > 0) CHECK(std::abs(s[i] - s[i - 1] * step) < 1e-12);
    }
}

TEST_CASE("synthesize is bit-identical for identical inputs") {
    Geometry g = small_geometry();
    PathLossParams pl;
    RicianParams rc;
    ChannelSet a = synthesize(g, pl, rc, 77);
    ChannelSet b = synthesize(g, pl, rc, 77);
    CHECK(frobenius_norm(a.h1 - b.h1) == 0.0);
    CHECK(frobenius_norm(a.h2 - b.h2) == 0.0);
    CHECK(frobenius_norm(a.g - b.g) == 0.0);
    for (index_t k = 0; k < a.n_users(); ++k) {
        CHECK(norm2(a.h1k[k] - b.h1k[k]) == 0.0);
        CHECK(norm2(a.h2k[k] - b.h2k[k]) == 0.0);
    }
    ChannelSet c = synthesize(g, pl, rc, 78);
    CHECK(frobenius_norm(a.h1 - c.h1) > 0.0);
}

TEST_CASE("channel dimensions and noise bookkeeping") {
    Geometry g = small_geometry();
    SynthesisOptions opts;
    opts.noise_power_w = 3e-11;
    ChannelSet ch = synthesize(g, {}, {}, 5, opts);
    CHECK(ch.h1.rows() == 4);
    CHECK(ch.h1.cols() == 2);
    CHECK(ch.h2.rows() == 4);
    CHECK(ch.g.rows() == 4);   // M2 x M1
    CHECK(ch.g.cols() == 4);
    CHECK(ch.n_users() == 2);
    CHECK(ch.h1k[0].len() == 4);
    CHECK(ch.h2k[0].len() == 4);
    CHECK(ch.noise_ris1 == 3e-11);
    CHECK(ch.noise_ris2 == 3e-11);
    REQUIRE(ch.noise_users.size() == 2);
    CHECK(ch.noise_users[0] == 3e-11);
}

TEST_CASE("Monte-Carlo entry power matches the path-loss law within 2%") {
    Geometry g = small_geometry();
    PathLossParams pl;
    RicianParams rc;
    const double want_h1 =
        path_loss(pl, LinkId::BsToRis1, dist(g.bs_pos, g.ris1_pos));
    const double want_g =
        path_loss(pl, LinkId::Ris1ToRis2, dist(g.ris1_pos, g.ris2_pos));
    const double want_h2 =
        path_loss(pl, LinkId::BsToRis2, dist(g.bs_pos, g.ris2_pos));
    double acc_h1 = 0.0, acc_g = 0.0, acc_h2 = 0.0;
    const int trials = 400;
    for (int t = 0; t < trials; ++t) {
        ChannelSet ch = synthesize(g, pl, rc, 1000 + t);
        acc_h1 += mean_entry_power(ch.h1);
        acc_g += mean_entry_power(ch.g);
        acc_h2 += mean_entry_power(ch.h2);
    }
    CHECK(acc_h1 / trials == doctest::Approx(want_h1).epsilon(0.02));
    CHECK(acc_g / trials == doctest::Approx(want_g).epsilon(0.02));
    CHECK(acc_h2 / trials == doctest::Approx(want_h2).epsilon(0.02));
}

TEST_CASE("per-user links obey the law when users are pinned to the center") {
    Geometry g = small_geometry();
    g.user_radius = 0.0;
    PathLossParams pl;
    RicianParams rc;
    const double want =
        path_loss(pl, LinkId::Ris2ToUser, dist(g.ris2_pos, g.user_center));
    double acc = 0.0;
    const int trials = 400;
    for (int t = 0; t < trials; ++t) {
        ChannelSet ch = synthesize(g, pl, rc, 2000 + t);
        for (index_t k = 0; k < ch.n_users(); ++k)
            acc += norm2_sq(ch.h2k[k]) / static_cast<double>(ch.m2());
        }
    acc /= trials * 2.0;
    CHECK(acc == doctest::Approx(want).epsilon(0.02));
}

TEST_CASE("infinite Rician factor collapses to the deterministic LoS part") {
    Geometry g = small_geometry();
    PathLossParams pl;
    RicianParams rc;
    rc.bs_to_ris1 = 1e12;
    const double want =
        path_loss(pl, LinkId::BsToRis1, dist(g.bs_pos, g.ris1_pos));
    ChannelSet ch = synthesize(g, pl, rc, 3);
    // LoS is an outer product of unit-modulus steering vectors: every entry
    // has the same modulus sqrt(PL)
    for (index_t i = 0; i < ch.h1.rows(); ++i)
        for (index_t j = 0; j < ch.h1.cols(); ++j)
            CHECK(std::norm(ch.h1(i, j)) ==
                  doctest::Approx(want).epsilon(1e-5));
    // and two seeds agree on the modulus even though NLoS noise differs
    ChannelSet ch2 = synthesize(g, pl, rc, 4);
    CHECK(std::norm(ch2.h1(0, 0)) == doctest::Approx(want).epsilon(1e-5));
}

TEST_CASE("geometry validation rejects nonsense") {
    Geometry g = small_geometry();
    g.n_users = 0;
    CHECK_THROWS_AS(g.validate(), Error);
    Geometry g2 = small_geometry();
    g2.carrier_freq = -1.0;
    CHECK_THROWS_AS(g2.validate(), Error);
    PathLossParams pl;
    pl.d0 = 0.0;
    CHECK_THROWS_AS(pl.validate(), Error);
    RicianParams rc;
    rc.bs_to_ris1 = -2.0;
    CHECK_THROWS_AS(rc.validate(), Error);
}

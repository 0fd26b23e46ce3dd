#include <doctest.h>

#include "csl/fermion.hpp"

using namespace csl;

namespace {

SlaterState two_term_swap_1d() {
    // Two determinants differing in exactly one momentum: the densities of a
    // single swap interfere and the total is genuinely non-uniform.
    SlaterState st;
    st.d = 1;
    st.Nside = 3;
    st.Z = 2.0;
    st.terms = {{cd(1.0, 0.0), {{0}, {1}}}, {cd(0.7, 0.2), {{0}, {2}}}};
    return st;
}

} // namespace

TEST_CASE("density matches the brute-force oracle for a 1d swap pair") {
    auto st = two_term_swap_1d();
    auto dens = slater_density(st);
    std::vector<std::vector<double>> pts = {{0.0}, {0.31}, {1.07}, {2.5}, {2.9}};
    auto oracle = brute_force_density_oracle(st, pts, 9);
    for (std::size_t i = 0; i < pts.size(); ++i)
        CHECK(dens.eval(pts[i]) == doctest::Approx(oracle[i]).epsilon(1e-10));
    // The interference makes the density non-constant.
    CHECK(dens.max_deviation_from_constant() > 1e-3);
    CHECK_FALSE(check_pair_distance(st));
}

TEST_CASE("density matches the oracle in 2d including an unsorted term") {
    SlaterState st;
    st.d = 2;
    st.Nside = 2;
    st.Z = 2.0;
    // The second term lists its momenta out of sorted order: the density must
    // account for the row-permutation sign of the determinant.
    st.terms = {{cd(0.8, -0.1), {{0, 0}, {0, 1}}},
                {cd(0.5, 0.4), {{1, 1}, {0, 0}}}};
    auto dens = slater_density(st);
    std::vector<std::vector<double>> pts = {
        {0.0, 0.0}, {0.3, 1.1}, {1.7, 0.2}, {0.9, 1.9}};
    auto oracle = brute_force_density_oracle(st, pts, 8);
    for (std::size_t i = 0; i < pts.size(); ++i)
        CHECK(dens.eval(pts[i]) == doctest::Approx(oracle[i]).epsilon(1e-10));
    CHECK(dens.max_deviation_from_constant() > 1e-3);
}

TEST_CASE("density matches the oracle for three particles") {
    SlaterState st;
    st.d = 1;
    st.Nside = 4;
    st.Z = 3.0;
    st.terms = {{cd(1.0, 0.0), {{0}, {1}, {2}}},
                {cd(0.3, -0.6), {{0}, {1}, {3}}},
                {cd(-0.2, 0.5), {{0}, {2}, {3}}}};
    auto dens = slater_density(st);
    std::vector<std::vector<double>> pts = {{0.0}, {0.77}, {2.13}, {3.5}};
    auto oracle = brute_force_density_oracle(st, pts, 9);
    for (std::size_t i = 0; i < pts.size(); ++i)
        CHECK(dens.eval(pts[i]) == doctest::Approx(oracle[i]).epsilon(1e-9));
}

TEST_CASE("pair-distant superpositions have uniform density") {
    SlaterState st;
    st.d = 1;
    st.Nside = 4;
    st.Z = 2.0;
    // Every pair of terms differs in two momenta: all one-body cross terms
    // vanish and only the constant survives.
    st.terms = {{cd(1.0, 0.0), {{0}, {1}}},
                {cd(0.4, 0.7), {{2}, {3}}},
                {cd(-0.3, 0.2), {{-1}, {4}}}};
    CHECK(check_pair_distance(st));
    auto dens = slater_density(st);
    CHECK(dens.max_deviation_from_constant() < 1e-14);
    CHECK(dens.constant_term() == doctest::Approx(2.0 / 4.0));
    auto oracle = brute_force_density_oracle(st, {{0.0}, {1.3}, {2.71}}, 12);
    for (double v : oracle) CHECK(v == doctest::Approx(2.0 / 4.0).epsilon(1e-10));
}

TEST_CASE("density integrates to Z and stays nonnegative") {
    auto st = two_term_swap_1d();
    auto dens = slater_density(st);
    // The constant term is the mean: Z per torus volume.
    CHECK(dens.constant_term() == doctest::Approx(st.Z / st.Nside));
    for (int i = 0; i < 60; ++i)
        CHECK(dens.eval({st.Nside * i / 60.0}) >= -1e-12);
}

TEST_CASE("a global phase leaves the density unchanged") {
    auto st = two_term_swap_1d();
    auto base = slater_density(st);
    cd phase = std::exp(cd(0.0, 1.234));
    for (auto& t : st.terms) t.c *= phase;
    auto rot = slater_density(st);
    REQUIRE(rot.amp.size() == base.amp.size());
    for (const auto& [k, a] : base.amp)
        CHECK(std::abs(rot.amp.at(k) - a) < 1e-14);
}

TEST_CASE("json parsing fills the state and defaults Z to the particle count") {
    const char* text = R"({
        "d": 2, "N": 3,
        "terms": [
            {"c": [1.0, 0.0], "k": [[0, 0], [1, 0]]},
            {"c": [0.2, -0.5], "k": [[0, 1], [1, 1]]}
        ]
    })";
    auto st = slater_from_json(text);
    CHECK(st.d == 2);
    CHECK(st.Nside == 3);
    CHECK(st.Z == doctest::Approx(2.0));
    REQUIRE(st.terms.size() == 2);
    CHECK(st.terms[1].c == cd(0.2, -0.5));
    CHECK(st.terms[1].k[0] == std::vector<int>{0, 1});
    CHECK_THROWS(slater_from_json("{\"d\": 1}"));
    CHECK_THROWS(slater_from_json("not json"));
}

TEST_CASE("validation rejects malformed states") {
    SlaterState st;
    st.d = 1;
    st.Nside = 2;
    st.terms = {{cd(1.0, 0.0), {{0}, {1}}}};
    CHECK_NOTHROW(st.validate());

    SlaterState bad = st;
    bad.terms[0].k = {{0}, {0}};
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);

    bad = st;
    bad.terms.push_back({cd(0.5, 0.0), {{0}}});
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);

    bad = st;
    bad.d = 4;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);

    // The same momentum set in a different order is the same determinant.
    bad = st;
    bad.terms.push_back({cd(0.5, 0.0), {{1}, {0}}});
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);

    // Oracle cost guard.
    SlaterState big;
    big.d = 1;
    big.Nside = 8;
    big.terms = {{cd(1.0, 0.0), {{0}, {1}, {2}, {3}}}};
    CHECK_THROWS_AS(brute_force_density_oracle(big, {{0.0}}, 4),
                    std::invalid_argument);
}

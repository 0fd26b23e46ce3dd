// fermion.hpp
// Slater-determinant superpositions of plane waves on T^d and their exact
// one-particle densities: the pair-distance restriction between determinants
// guarantees a uniform electronic density.
#pragma once

#include <map>
#include <string>
#include "csl/types.hpp"

namespace csl {

// One determinant: coefficient and n pairwise-distinct momenta, each stored
// as a d-vector of integers in units of 2 pi / N.
struct SlaterTerm {
    cd c{1.0, 0.0};
    std::vector<std::vector<int>> k;
};

struct SlaterState {
    int d = 1;          // torus dimension
    int Nside = 2;      // torus side length
    double Z = 1.0;     // target charge; density integrates to Z
    std::vector<SlaterTerm> terms;

    int particles() const { return terms.empty() ? 0 : int(terms[0].k.size()); }
    void validate() const; // throws std::invalid_argument on malformed states
};

SlaterState slater_from_json(const std::string& json_text);

// True iff every pair of distinct terms differs in at least two momenta.
bool check_pair_distance(const SlaterState& state);

// The exact density as a trig polynomial: frequency (integer vector, units
// 2 pi / N) -> complex amplitude.  Real-valued by construction (conjugate
// frequencies paired); integrates to Z.
struct TrigPoly {
    int d = 1;
    double Nside = 2;
    std::map<std::vector<int>, cd> amp;

    double eval(const std::vector<double>& x) const;
    double constant_term() const;
    double max_deviation_from_constant(int samples_per_axis = 17) const;
};

TrigPoly slater_density(const SlaterState& state);

// Independent oracle: explicit antisymmetrization over all n! permutations
// and tensor trapezoid quadrature over the other n-1 coordinates (exact for
// trig polynomials at sufficient resolution).  Guarded to n <= 3, d <= 2.
std::vector<double> brute_force_density_oracle(
    const SlaterState& state, const std::vector<std::vector<double>>& points,
    int quad_res);

} // namespace csl

#include "csl/fermion.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace csl {

void SlaterState::validate() const {
    if (d < 1 || d > 3) throw std::invalid_argument("SlaterState: d must be 1, 2 or 3");
    if (Nside < 1) throw std::invalid_argument("SlaterState: N must be positive");
    if (terms.empty()) throw std::invalid_argument("SlaterState: no terms");
    std::size_t n = terms[0].k.size();
    if (n == 0) throw std::invalid_argument("SlaterState: empty momentum set");
    for (const auto& t : terms) {
        if (t.k.size() != n)
            throw std::invalid_argument("SlaterState: particle count differs between terms");
        for (const auto& kv : t.k)
            if (kv.size() != std::size_t(d))
                throw std::invalid_argument("SlaterState: momentum dimension mismatch");
        auto sorted = t.k;
        std::sort(sorted.begin(), sorted.end());
        if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
            throw std::invalid_argument("SlaterState: momenta within a term must be distinct");
    }
    // Terms with equal momentum sets are the same determinant up to sign and
    // must be merged by the caller instead.
    std::vector<std::vector<std::vector<int>>> sets;
    for (const auto& t : terms) {
        auto s = t.k;
        std::sort(s.begin(), s.end());
        sets.push_back(std::move(s));
    }
    std::sort(sets.begin(), sets.end());
    if (std::adjacent_find(sets.begin(), sets.end()) != sets.end())
        throw std::invalid_argument("SlaterState: momentum sets must differ between terms");
}

SlaterState slater_from_json(const std::string& json_text) {
    nlohmann::json j = nlohmann::json::parse(json_text);
    SlaterState st;
    st.d = j.at("d").get<int>();
    st.Nside = j.at("N").get<int>();
    for (const auto& jt : j.at("terms")) {
        SlaterTerm t;
        auto c = jt.at("c");
        t.c = cd(c.at(0).get<double>(), c.at(1).get<double>());
        for (const auto& jk : jt.at("k")) t.k.push_back(jk.get<std::vector<int>>());
        st.terms.push_back(std::move(t));
    }
    st.Z = j.value("Z", double(st.particles()));
    st.validate();
    return st;
}

namespace {

// Sorted copy of a momentum set.
std::vector<std::vector<int>> sorted_set(const SlaterTerm& t) {
    auto s = t.k;
    std::sort(s.begin(), s.end());
    return s;
}

// Parity of the permutation that sorts the momentum list: reordering the
// determinant rows flips the sign, so an unsorted term carries this factor
// relative to the sorted convention.
double sort_parity(const SlaterTerm& t) {
    int inv = 0;
    for (std::size_t i = 0; i < t.k.size(); ++i)
        for (std::size_t j = i + 1; j < t.k.size(); ++j)
            if (t.k[i] > t.k[j]) ++inv;
    return inv % 2 == 0 ? 1.0 : -1.0;
}

} // namespace

bool check_pair_distance(const SlaterState& state) {
    std::vector<std::vector<std::vector<int>>> sets;
    for (const auto& t : state.terms) sets.push_back(sorted_set(t));
    for (std::size_t a = 0; a < sets.size(); ++a)
        for (std::size_t b = a + 1; b < sets.size(); ++b) {
            std::vector<std::vector<int>> diff;
            std::set_difference(sets[a].begin(), sets[a].end(), sets[b].begin(),
                                sets[b].end(), std::back_inserter(diff));
            if (diff.size() < 2) return false;
        }
    return true;
}

double TrigPoly::eval(const std::vector<double>& x) const {
    cd s(0.0, 0.0);
    for (const auto& [k, a] : amp) {
        double ph = 0.0;
        for (std::size_t i = 0; i < k.size(); ++i) ph += k[i] * x[i];
        s += a * std::exp(cd(0.0, (two_pi / Nside) * ph));
    }
    return s.real();
}

double TrigPoly::constant_term() const {
    auto it = amp.find(std::vector<int>(d, 0));
    return it == amp.end() ? 0.0 : it->second.real();
}

double TrigPoly::max_deviation_from_constant(int samples_per_axis) const {
    double c0 = constant_term();
    double worst = 0.0;
    std::vector<double> x(d, 0.0);
    std::vector<int> idx(d, 0);
    while (true) {
        for (int i = 0; i < d; ++i) x[i] = Nside * double(idx[i]) / samples_per_axis;
        worst = std::max(worst, std::abs(eval(x) - c0));
        int i = 0;
        for (; i < d; ++i) {
            if (++idx[i] < samples_per_axis) break;
            idx[i] = 0;
        }
        if (i == d) break;
    }
    return worst;
}

TrigPoly slater_density(const SlaterState& state) {
    state.validate();
    TrigPoly out;
    out.d = state.d;
    out.Nside = state.Nside;
    const int n = state.particles();
    const double cellT = std::pow(double(state.Nside), state.d); // |T^d|
    double norm2 = 0.0;
    for (const auto& t : state.terms) norm2 += std::norm(t.c);

    std::vector<std::vector<std::vector<int>>> sets;
    std::vector<cd> ceff; // coefficient in the sorted-row convention
    for (const auto& t : state.terms) {
        sets.push_back(sorted_set(t));
        ceff.push_back(sort_parity(t) * t.c);
    }

    // Constant (diagonal) part: Z / |T^d|.
    out.amp[std::vector<int>(state.d, 0)] = cd(state.Z / cellT, 0.0);

    // Cross terms: ordered pairs of terms whose momentum sets differ in
    // exactly one element; the sign is the parity of aligning the two sorted
    // tuples, (-1)^{i + i'}.
    for (std::size_t a = 0; a < sets.size(); ++a)
        for (std::size_t b = 0; b < sets.size(); ++b) {
            if (a == b) continue;
            std::vector<std::vector<int>> da, db;
            std::set_difference(sets[a].begin(), sets[a].end(), sets[b].begin(),
                                sets[b].end(), std::back_inserter(da));
            std::set_difference(sets[b].begin(), sets[b].end(), sets[a].begin(),
                                sets[a].end(), std::back_inserter(db));
            if (da.size() != 1 || db.size() != 1) continue;
            const auto& k = da[0];
            const auto& kp = db[0];
            int i = int(std::lower_bound(sets[a].begin(), sets[a].end(), k) -
                        sets[a].begin());
            int ip = int(std::lower_bound(sets[b].begin(), sets[b].end(), kp) -
                         sets[b].begin());
            double sign = ((i + ip) % 2 == 0) ? 1.0 : -1.0;
            std::vector<int> freq(state.d);
            for (int t = 0; t < state.d; ++t) freq[t] = k[t] - kp[t];
            cd amp = state.Z * sign * ceff[a] * std::conj(ceff[b]) /
                     (double(n) * cellT * norm2);
            out.amp[freq] += amp;
        }
    return out;
}

std::vector<double> brute_force_density_oracle(
    const SlaterState& state, const std::vector<std::vector<double>>& points,
    int quad_res) {
    state.validate();
    const int n = state.particles();
    const int d = state.d;
    if (n > 3 || d > 2)
        throw std::invalid_argument("brute_force_density_oracle: cost guard (n<=3, d<=2)");

    const double h = double(state.Nside) / quad_res;
    const long cells1 = long(std::pow(double(quad_res), d));
    const double wcell = std::pow(h, d);

    // Wave function value via explicit antisymmetrization.
    double inv_sqrt_fact = 1.0;
    for (int i = 2; i <= n; ++i) inv_sqrt_fact *= i;
    inv_sqrt_fact = 1.0 / std::sqrt(inv_sqrt_fact);
    auto psi = [&](const std::vector<std::vector<double>>& xs) {
        cd total(0.0, 0.0);
        std::vector<int> perm(n);
        for (const auto& term : state.terms) {
            std::iota(perm.begin(), perm.end(), 0);
            cd acc(0.0, 0.0);
            // Iterate permutations in lexicographic order, tracking parity.
            std::vector<int> p = perm;
            std::sort(p.begin(), p.end());
            do {
                // Parity of p by counting inversions.
                int inv = 0;
                for (int i = 0; i < n; ++i)
                    for (int j = i + 1; j < n; ++j)
                        if (p[i] > p[j]) ++inv;
                cd prod(1.0, 0.0);
                for (int j = 0; j < n; ++j) {
                    double ph = 0.0;
                    for (int t = 0; t < d; ++t)
                        ph += term.k[p[j]][t] * xs[j][t];
                    prod *= std::exp(cd(0.0, (two_pi / state.Nside) * ph));
                }
                acc += (inv % 2 == 0 ? 1.0 : -1.0) * prod;
            } while (std::next_permutation(p.begin(), p.end()));
            total += term.c * acc;
        }
        return inv_sqrt_fact * total;
    };

    auto coord = [&](long cell, int which) {
        std::vector<double> x(d);
        long c = cell;
        for (int t = 0; t < d; ++t) {
            x[t] = h * double(c % quad_res);
            c /= quad_res;
        }
        (void)which;
        return x;
    };

    // Marginal integral over the other n-1 coordinates.
    auto marginal = [&](const std::vector<double>& x0) {
        long cells_rest = 1;
        for (int i = 1; i < n; ++i) cells_rest *= cells1;
        double acc = 0.0;
        std::vector<std::vector<double>> xs(n);
        xs[0] = x0;
        for (long rest = 0; rest < cells_rest; ++rest) {
            long r = rest;
            for (int i = 1; i < n; ++i) {
                xs[i] = coord(r % cells1, i);
                r /= cells1;
            }
            acc += std::norm(psi(xs));
        }
        return acc * std::pow(wcell, n - 1);
    };

    // ||psi||^2 by the same quadrature.
    double norm2 = 0.0;
    for (long c0 = 0; c0 < cells1; ++c0) norm2 += marginal(coord(c0, 0)) * wcell;

    std::vector<double> out;
    out.reserve(points.size());
    for (const auto& x : points) out.push_back(state.Z * marginal(x) / norm2);
    return out;
}

} // namespace csl

#ifndef OFF_TESTS_SUPPORT_HPP
#define OFF_TESTS_SUPPORT_HPP

// Generators and independent oracles shared by the unit tests and the
// acceptance binary.

#include "off/models.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <random>
#include <vector>

namespace off::testing {

inline std::vector<int> bits_of(unsigned value, Index width)
{
    std::vector<int> out(static_cast<std::size_t>(width));
    for (Index i = 0; i < width; ++i) {
        out[static_cast<std::size_t>(i)] = static_cast<int>((value >> i) & 1U);
    }
    return out;
}

// Every observable (b, a, z) triple of a binary distribution; z is 0 where a is 0.
struct Point {
    std::vector<int> b, a, z;
};

inline std::vector<Point> all_points(Index n, Index r)
{
    std::vector<Point> out;
    for (unsigned bb = 0; bb < (1U << n); ++bb) {
        for (unsigned aa = 0; aa < (1U << r); ++aa) {
            for (unsigned zz = 0; zz < (1U << r); ++zz) {
                if ((zz & ~aa) != 0) {
                    continue;
                }
                out.push_back({bits_of(bb, n), bits_of(aa, r), bits_of(zz, r)});
            }
        }
    }
    return out;
}

// Arbitrary weights over the enumerated atoms, with roughly a fifth set to 0 so
// that zero-mass events and fallbacks show up.
inline FiniteDistribution random_distribution(std::mt19937_64& rng, Index max_n = 2, Index max_r = 2)
{
    std::uniform_int_distribution<Index> pick_n(1, max_n);
    std::uniform_int_distribution<Index> pick_r(1, max_r);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    FiniteDistribution d;
    d.n = pick_n(rng);
    d.r = pick_r(rng);
    double total = 0.0;
    for (const auto& p : all_points(d.n, d.r)) {
        for (int y = 0; y < 2; ++y) {
            double w = unit(rng) < 0.2 ? 0.0 : unit(rng);
            d.atoms.push_back({p.b, p.a, p.z, y, w});
            total += w;
        }
    }
    if (total == 0.0) {
        d.atoms.front().weight = 1.0;
        total = 1.0;
    }
    for (auto& atom : d.atoms) {
        atom.weight /= total;
    }
    return d;
}

// Direct re-derivation of the conditional mean by summation, independent of
// brute_force_off. Returns NaN on a zero-mass event.
inline double direct_off(const FiniteDistribution& d, const Point& p)
{
    double mass = 0.0;
    double positive = 0.0;
    for (const auto& atom : d.atoms) {
        bool match = atom.b == p.b;
        for (Index i = 0; match && i < d.r; ++i) {
            const auto k = static_cast<std::size_t>(i);
            if (p.a[k] == 1) {
                match = atom.a[k] == 1 && atom.z[k] == p.z[k];
            }
        }
        if (match) {
            mass += atom.weight;
            positive += atom.weight * atom.y;
        }
    }
    return mass > 0.0 ? positive / mass : std::nan("");
}

struct ExactLosses {
    double off = 0.0;
    double base = 0.0;
};

// Expected squared error of the OFF target and of E[Y | b] under d.
inline ExactLosses exact_losses(const FiniteDistribution& d)
{
    ExactLosses out;
    for (const auto& atom : d.atoms) {
        if (atom.weight == 0.0) {
            continue;
        }
        const double f_off = brute_force_off(d, atom.b, atom.a, atom.z);
        const double f_base = brute_force_base(d, atom.b);
        out.off += atom.weight * (atom.y - f_off) * (atom.y - f_off);
        out.base += atom.weight * (atom.y - f_base) * (atom.y - f_base);
    }
    return out;
}

// Binary naive Bayes law: b_i and (A_i, z_i) independent given y, availability
// free to depend on (y, z_i). All cell probabilities are bounded away from 0.
struct NbLaw {
    Index n = 0;
    Index r = 0;
    double p1 = 0.5;
    std::vector<std::array<double, 2>> pb;               // p(b_i = 1 | y)
    std::vector<std::array<double, 2>> pz;               // p(z_i = 1 | y)
    std::vector<std::array<std::array<double, 2>, 2>> pa; // p(A_i = 1 | y, z_i)

    double posterior(const Point& p) const
    {
        double l1 = p1;
        double l0 = 1.0 - p1;
        for (Index i = 0; i < n; ++i) {
            const auto k = static_cast<std::size_t>(i);
            l1 *= p.b[k] ? pb[k][1] : 1.0 - pb[k][1];
            l0 *= p.b[k] ? pb[k][0] : 1.0 - pb[k][0];
        }
        for (Index i = 0; i < r; ++i) {
            const auto k = static_cast<std::size_t>(i);
            if (p.a[k] == 0) {
                continue;
            }
            const int v = p.z[k];
            l1 *= (v ? pz[k][1] : 1.0 - pz[k][1]) * pa[k][1][static_cast<std::size_t>(v)];
            l0 *= (v ? pz[k][0] : 1.0 - pz[k][0]) * pa[k][0][static_cast<std::size_t>(v)];
        }
        return l1 / (l1 + l0);
    }
};

inline NbLaw random_nb_law(std::mt19937_64& rng, Index n, Index r)
{
    std::uniform_real_distribution<double> cell(0.1, 0.9);
    NbLaw law;
    law.n = n;
    law.r = r;
    law.p1 = cell(rng);
    for (Index i = 0; i < n; ++i) {
        law.pb.push_back({cell(rng), cell(rng)});
    }
    for (Index i = 0; i < r; ++i) {
        law.pz.push_back({cell(rng), cell(rng)});
        law.pa.push_back({{{cell(rng), cell(rng)}, {cell(rng), cell(rng)}}});
    }
    return law;
}

// Exact joint over observable atoms.
inline FiniteDistribution enumerate(const NbLaw& law)
{
    FiniteDistribution d;
    d.n = law.n;
    d.r = law.r;
    for (const auto& p : all_points(law.n, law.r)) {
        for (int y = 0; y < 2; ++y) {
            const auto ky = static_cast<std::size_t>(y);
            double w = y ? law.p1 : 1.0 - law.p1;
            for (Index i = 0; i < law.n; ++i) {
                const auto k = static_cast<std::size_t>(i);
                w *= p.b[k] ? law.pb[k][ky] : 1.0 - law.pb[k][ky];
            }
            for (Index i = 0; i < law.r; ++i) {
                const auto k = static_cast<std::size_t>(i);
                const double q1 = law.pz[k][ky];
                if (p.a[k] == 1) {
                    const int v = p.z[k];
                    w *= (v ? q1 : 1.0 - q1) * law.pa[k][ky][static_cast<std::size_t>(v)];
                } else {
                    w *= q1 * (1.0 - law.pa[k][ky][1]) + (1.0 - q1) * (1.0 - law.pa[k][ky][0]);
                }
            }
            d.atoms.push_back({p.b, p.a, p.z, y, w});
        }
    }
    return d;
}

// Availability driven by b only (missing at random). Returns the distribution
// and p(y = 1 | b) per base pattern.
struct MarInstance {
    FiniteDistribution dist;
    std::vector<double> p_y_given_b;
};

inline MarInstance random_mar(std::mt19937_64& rng, Index max_n = 2, Index max_r = 2)
{
    std::uniform_int_distribution<Index> pick_n(1, max_n);
    std::uniform_int_distribution<Index> pick_r(1, max_r);
    std::uniform_real_distribution<double> unit(0.05, 1.0);
    MarInstance m;
    auto& d = m.dist;
    d.n = pick_n(rng);
    d.r = pick_r(rng);
    const unsigned nb = 1U << d.n;
    const unsigned nr = 1U << d.r;
    auto normalized = [&](unsigned count) {
        std::vector<double> p(count);
        double s = 0.0;
        for (auto& x : p) {
            x = unit(rng);
            s += x;
        }
        for (auto& x : p) {
            x /= s;
        }
        return p;
    };
    const auto pb = normalized(nb);
    for (unsigned bb = 0; bb < nb; ++bb) {
        const double py = std::uniform_real_distribution<double>(0.05, 0.95)(rng);
        m.p_y_given_b.push_back(py);
        const auto pa = normalized(nr);
        const std::array<std::vector<double>, 2> pz{normalized(nr), normalized(nr)};
        for (unsigned aa = 0; aa < nr; ++aa) {
            for (int y = 0; y < 2; ++y) {
                // observed z_I: marginalize the unobserved coordinates
                std::vector<double> observed(nr, 0.0);
                for (unsigned zz = 0; zz < nr; ++zz) {
                    observed[zz & aa] += pz[static_cast<std::size_t>(y)][zz];
                }
                for (unsigned zz = 0; zz < nr; ++zz) {
                    if ((zz & ~aa) != 0) {
                        continue;
                    }
                    const double w = pb[bb] * (y ? py : 1.0 - py) * pa[aa] * observed[zz];
                    d.atoms.push_back({bits_of(bb, d.n), bits_of(aa, d.r), bits_of(zz, d.r), y, w});
                }
            }
        }
    }
    return m;
}

// O(N^2) pair count with ties worth one half.
inline double pair_count_auc(const Vector& scores, const Vector& labels)
{
    double wins = 0.0;
    double pairs = 0.0;
    for (Index i = 0; i < scores.size(); ++i) {
        if (labels(i) != 1.0) {
            continue;
        }
        for (Index j = 0; j < scores.size(); ++j) {
            if (labels(j) != 0.0) {
                continue;
            }
            pairs += 1.0;
            wins += scores(i) > scores(j) ? 1.0 : (scores(i) == scores(j) ? 0.5 : 0.0);
        }
    }
    return wins / pairs;
}

// Norm-wise relative error of the analytic logistic gradient against central
// differences with step 1e-5, on a random small weighted instance.
inline double gradient_check(std::mt19937_64& rng)
{
    std::normal_distribution<double> normal(0.0, 1.0);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const Index N = std::uniform_int_distribution<Index>(5, 40)(rng);
    const Index d = std::uniform_int_distribution<Index>(1, 4)(rng);
    Matrix X(N, d);
    Vector y(N), w(N);
    for (Index j = 0; j < N; ++j) {
        for (Index i = 0; i < d; ++i) {
            X(j, i) = normal(rng);
        }
        y(j) = unit(rng) < 0.5 ? 1.0 : 0.0;
        w(j) = 0.2 + unit(rng);
    }
    LogisticParams p = LogisticParams::zeros(d);
    for (Index i = 0; i < d; ++i) {
        p.weights(i) = normal(rng);
    }
    p.intercept = normal(rng);
    const double l2 = unit(rng) < 0.5 ? 0.0 : 0.05;
    const Vector g = logistic_gradient(p, X, y, w, l2);
    Vector fd(d + 1);
    const double h = 1e-5;
    for (Index k = 0; k <= d; ++k) {
        LogisticParams up = p, down = p;
        if (k < d) {
            up.weights(k) += h;
            down.weights(k) -= h;
        } else {
            up.intercept += h;
            down.intercept -= h;
        }
        fd(k) = (logistic_objective(up, X, y, w, l2) - logistic_objective(down, X, y, w, l2)) / (2 * h);
    }
    return (g - fd).norm() / std::max(g.norm(), 1e-12);
}

} // namespace off::testing

#endif // OFF_TESTS_SUPPORT_HPP

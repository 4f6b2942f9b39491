#ifndef QPMUT_REDUCTION_HPP
#define QPMUT_REDUCTION_HPP

#include <cstddef>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include <qpmut/error.hpp>
#include <qpmut/exactlin.hpp>
#include <qpmut/pathalg.hpp>
#include <qpmut/qp.hpp>

namespace qpmut
{

// Matched arrows a: i -> j and b: j -> i contributing the term b a.
struct trivial_pair {
    std::string a;
    std::string b;

    friend bool operator==(const trivial_pair &, const trivial_pair &) = default;
};

// Splitting of a QP into trivial and reduced parts. The witness is an
// automorphism of the input's path algebra with
//   witness(S) ~ sum_k b_k a_k + S_red   (mod m^N, cyclically).
struct split_result {
    std::vector<trivial_pair> trivial;
    qp reduced;
    substitution witness;
    substitution basis_change;
    int passes = 0;
};

namespace detail
{

// Rank factorization D = P C Q with D a partial permutation matrix of
// ones. Pivots are taken row by row at the first usable column, so a C
// that is already a partial permutation of ones is left alone.
struct pair_factorization {
    rat_matrix p;
    rat_matrix q;
    std::vector<std::pair<std::size_t, std::size_t>> pivots; // (row, col)
};

inline pair_factorization factor_pairing(const rat_matrix &c)
{
    const auto m = c.rows();
    const auto n = c.cols();
    pair_factorization f{rat_matrix::identity(m), rat_matrix::identity(n), {}};
    rat_matrix d = c;
    std::vector<bool> col_used(n, false);
    rational t;
    for (std::size_t r = 0; r < m; ++r) {
        std::size_t col = n;
        for (std::size_t j = 0; j < n; ++j) {
            if (!col_used[j] && sgn(d(r, j)) != 0) {
                col = j;
                break;
            }
        }
        if (col == n) {
            continue;
        }
        const rational inv = 1 / d(r, col);
        if (inv != 1) {
            for (std::size_t j = 0; j < n; ++j) {
                d(r, j) *= inv;
            }
            for (std::size_t j = 0; j < m; ++j) {
                f.p(r, j) *= inv;
            }
        }
        // Clear row r outside the pivot column (column operations).
        for (std::size_t j = 0; j < n; ++j) {
            if (j == col || sgn(d(r, j)) == 0) {
                continue;
            }
            t = d(r, j);
            for (std::size_t i = 0; i < m; ++i) {
                d(i, j) -= t * d(i, col);
            }
            for (std::size_t i = 0; i < n; ++i) {
                f.q(i, j) -= t * f.q(i, col);
            }
        }
        // Clear the pivot column outside row r (row operations).
        for (std::size_t i = 0; i < m; ++i) {
            if (i == r || sgn(d(i, col)) == 0) {
                continue;
            }
            t = d(i, col);
            for (std::size_t j = 0; j < n; ++j) {
                d(i, j) -= t * d(r, j);
            }
            for (std::size_t j = 0; j < m; ++j) {
                f.p(i, j) -= t * f.p(r, j);
            }
        }
        col_used[col] = true;
        f.pivots.emplace_back(r, col);
    }
    return f;
}

inline path two_cycle(const quiver &q, std::size_t b, std::size_t a)
{
    return canonical_cycle(q, make_path(q, std::vector<std::uint32_t>{static_cast<std::uint32_t>(b),
                                                                       static_cast<std::uint32_t>(a)}));
}

} // namespace detail

// Splits (A, S) into a trivial part on matched 2-cycles and a reduced part.
//
// Stage 1 changes the arrow basis, independently for every vertex pair, so
// that the quadratic part of S becomes sum_k b_k a_k. Stage 2 repeatedly
// removes the higher-degree terms that involve a trivial arrow: every such
// term is assigned to its first trivial-arrow occurrence, giving
// S' = sum_k (b_k U_k + V_k a_k) + (terms free of trivial arrows), and the
// substitution a_k -> a_k - U_k, b_k -> b_k - V_k is applied. The minimal
// degree of the remaining contamination rises with every pass, so the loop
// ends after fewer than N passes modulo m^N.
inline split_result split(const qp &input)
{
    const auto &qptr = input.graph;
    const auto &q = *qptr;
    const int n = input.order();
    const auto nv = q.num_vertices();

    split_result res;

    // Stage 1.
    std::map<std::pair<std::size_t, std::size_t>, rat_matrix> blocks;
    std::vector<std::pair<std::size_t, std::size_t>> pairs; // (a, b) arrow indices
    for (std::size_t i = 0; i < nv; ++i) {
        for (std::size_t j = i + 1; j < nv; ++j) {
            const auto fwd = q.arrows_between(i, j);
            const auto bwd = q.arrows_between(j, i);
            if (fwd.empty() || bwd.empty()) {
                continue;
            }
            rat_matrix c(bwd.size(), fwd.size());
            for (std::size_t r = 0; r < bwd.size(); ++r) {
                for (std::size_t s = 0; s < fwd.size(); ++s) {
                    c(r, s) = input.pot.as_element().coeff(detail::two_cycle(q, bwd[r], fwd[s]));
                }
            }
            const auto f = detail::factor_pairing(c);
            if (f.pivots.empty()) {
                continue;
            }
            // phi(alpha) = Q alpha, phi(beta) = P^T beta.
            blocks.emplace(std::pair(i, j), f.q.transpose());
            blocks.emplace(std::pair(j, i), f.p);
            for (const auto &[r, s] : f.pivots) {
                pairs.emplace_back(fwd[s], bwd[r]);
            }
        }
    }
    for (std::size_t i = 0; i < nv; ++i) {
        for (std::size_t j = 0; j < nv; ++j) {
            if (q.multiplicity(i, j) > 0 && !blocks.count({i, j})) {
                blocks.emplace(std::pair(i, j), rat_matrix::identity(q.multiplicity(i, j)));
            }
        }
    }
    res.basis_change = linear_substitution(qptr, n, blocks);
    potential s = apply_substitution(res.basis_change, input.pot);
    res.witness = res.basis_change;

    {
        const auto quad = s.as_element().degree_part(2);
        element expected(qptr, n);
        for (const auto &[a, b] : pairs) {
            expected.add(detail::two_cycle(q, b, a), 1);
        }
        if (n > 2 && !(quad == expected)) {
            throw_invariant("SplitStage1", "basis change failed to normalize the quadratic part");
        }
    }

    // Stage 2.
    enum class role { none, a, b };
    std::vector<role> roles(q.num_arrows(), role::none);
    std::vector<std::size_t> pair_of(q.num_arrows(), 0);
    for (std::size_t l = 0; l < pairs.size(); ++l) {
        roles[pairs[l].first] = role::a;
        roles[pairs[l].second] = role::b;
        pair_of[pairs[l].first] = l;
        pair_of[pairs[l].second] = l;
    }

    const int max_passes = n + 2;
    for (int pass = 0; !pairs.empty(); ++pass) {
        std::vector<element> u(pairs.size(), element(qptr, n));
        std::vector<element> v(pairs.size(), element(qptr, n));
        bool contaminated = false;
        for (const auto &[p, c] : s.terms()) {
            const auto d = p.degree();
            if (d < 3) {
                continue;
            }
            std::size_t pos = d;
            for (std::size_t t = 0; t < d; ++t) {
                if (roles[p.arrows[t]] != role::none) {
                    pos = t;
                    break;
                }
            }
            if (pos == d) {
                continue;
            }
            contaminated = true;
            const auto x = p.arrows[pos];
            const auto &xa = q.arrow_at(x);
            path rest;
            rest.head = xa.tail;
            rest.tail = xa.head;
            for (std::size_t t = 1; t < d; ++t) {
                rest.arrows.push_back(p.arrows[(pos + t) % d]);
            }
            // x = b: term ~ b * rest. x = a: term ~ rest * a.
            if (roles[x] == role::b) {
                u[pair_of[x]].add(std::move(rest), c);
            } else {
                v[pair_of[x]].add(std::move(rest), c);
            }
        }
        if (!contaminated) {
            res.passes = pass;
            break;
        }
        if (pass >= max_passes) {
            throw_invariant("SplitDiverged", "trivial arrows still present after " + std::to_string(pass) + " passes");
        }
        std::vector<element> imgs;
        for (std::size_t a = 0; a < q.num_arrows(); ++a) {
            auto img = element::arrow(qptr, a, n);
            if (roles[a] == role::a) {
                img -= u[pair_of[a]];
            } else if (roles[a] == role::b) {
                img -= v[pair_of[a]];
            }
            imgs.push_back(std::move(img));
        }
        const substitution step(qptr, std::move(imgs));
        s = apply_substitution(step, s);
        res.witness = compose(step, res.witness);
    }

    // Reduced part: arrows outside the matched pairs.
    std::vector<arrow> kept;
    std::vector<std::size_t> new_index(q.num_arrows(), 0);
    for (std::size_t a = 0; a < q.num_arrows(); ++a) {
        if (roles[a] == role::none) {
            new_index[a] = kept.size();
            kept.push_back(q.arrow_at(a));
        }
    }
    auto rq = share(quiver::from_resolved(q.vertices(), kept));
    element red(rq, n);
    for (const auto &[p, c] : s.terms()) {
        if (p.degree() == 2) {
            continue;
        }
        path np{p.head, p.tail, {}};
        for (auto a : p.arrows) {
            if (roles[a] != role::none) {
                throw_invariant("SplitStage2", "trivial arrow left in reduced potential");
            }
            np.arrows.push_back(static_cast<std::uint32_t>(new_index[a]));
        }
        red.add(std::move(np), c);
    }
    res.reduced = qp(rq, canonicalize_potential(red));
    for (const auto &[a, b] : pairs) {
        res.trivial.push_back({q.arrow_at(a).id, q.arrow_at(b).id});
    }
    return res;
}

// Lifts a potential on a subquiver (same vertices, arrow ids a subset) to
// the bigger quiver.
inline potential embed_potential(const potential &s, const quiver_ptr &into)
{
    const auto &from = s.graph();
    element e(into, s.order());
    for (const auto &[p, c] : s.terms()) {
        path np{p.head, p.tail, {}};
        for (auto a : p.arrows) {
            np.arrows.push_back(static_cast<std::uint32_t>(into->arrow_index(from.arrow_at(a).id)));
        }
        e.add(std::move(np), c);
    }
    return canonicalize_potential(e);
}

// witness(S) is cyclically equivalent to sum b_k a_k + S_red modulo m^N,
// and the witness is invertible.
inline bool verify_split(const qp &input, const split_result &sr)
{
    if (!same_quiver(sr.witness.quiver_ref(), input.graph) || !sr.witness.is_invertible()) {
        return false;
    }
    const int n = std::min({input.order(), sr.witness.order(), sr.reduced.order()});
    const auto &q = *input.graph;
    element target(input.graph, n);
    for (const auto &tp : sr.trivial) {
        target.add(detail::two_cycle(q, q.arrow_index(tp.b), q.arrow_index(tp.a)), 1);
    }
    target += embed_potential(sr.reduced.pot, input.graph).as_element();
    const auto image = apply_substitution(sr.witness, input.pot.truncated(n));
    if (!sr.reduced.is_reduced()) {
        return false;
    }
    return equal_mod(image.as_element(), canonicalize_potential(target).as_element(), n);
}

} // namespace qpmut

#endif

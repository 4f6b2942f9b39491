#pragma once

#include <cstdint>
#include <map>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include <qpmut/decorated.hpp>
#include <qpmut/exactlin.hpp>
#include <qpmut/jacobian.hpp>
#include <qpmut/mutation.hpp>
#include <qpmut/pathalg.hpp>
#include <qpmut/qp.hpp>
#include <qpmut/quiver.hpp>

namespace support
{

using namespace qpmut;

using word_term = std::pair<std::vector<std::string>, long>;

inline quiver_ptr make_q(std::vector<std::string> vertices, std::vector<arrow_spec> arrows)
{
    return share(quiver(std::move(vertices), std::move(arrows)));
}

inline element make_element(const quiver_ptr &q, const std::vector<word_term> &terms, int order)
{
    element e(q, order);
    for (const auto &[w, c] : terms) {
        e.add(make_path(*q, w), c);
    }
    return e;
}

inline qp make_qp(const quiver_ptr &q, const std::vector<word_term> &terms, int order)
{
    return qp(q, canonicalize_potential(make_element(q, terms, order)));
}

inline quiver_ptr triangle()
{
    return make_q({"1", "2", "3"}, {{"a", "1", "2"}, {"b", "2", "3"}, {"c", "3", "1"}});
}

inline qp triangle_qp(int order)
{
    return make_qp(triangle(), {{{"c", "b", "a"}, 1}}, order);
}

inline quiver_ptr two_cycle()
{
    return make_q({"1", "2"}, {{"a", "1", "2"}, {"b", "2", "1"}});
}

// Disjoint union of `count` oriented 2-cycles with T = sum b_k a_k.
inline qp trivial_qp(std::size_t count, int order)
{
    std::vector<std::string> verts;
    std::vector<arrow_spec> arrows;
    std::vector<word_term> terms;
    for (std::size_t k = 0; k < count; ++k) {
        const auto i = std::to_string(2 * k + 1);
        const auto j = std::to_string(2 * k + 2);
        verts.push_back(i);
        verts.push_back(j);
        const auto a = "a" + std::to_string(k);
        const auto b = "b" + std::to_string(k);
        arrows.push_back({a, i, j});
        arrows.push_back({b, j, i});
        terms.push_back({{b, a}, 1});
    }
    return make_qp(make_q(verts, arrows), terms, order);
}

// Quiver from an exchange-matrix-like multiplicity table: mult[i][j] arrows i -> j.
inline quiver_ptr from_multiplicities(const std::vector<std::vector<int>> &mult)
{
    std::vector<std::string> verts;
    for (std::size_t i = 0; i < mult.size(); ++i) {
        verts.push_back(std::to_string(i + 1));
    }
    std::vector<arrow_spec> arrows;
    int next = 0;
    for (std::size_t i = 0; i < mult.size(); ++i) {
        for (std::size_t j = 0; j < mult.size(); ++j) {
            for (int t = 0; t < mult[i][j]; ++t) {
                arrows.push_back({"x" + std::to_string(next++), verts[i], verts[j]});
            }
        }
    }
    return make_q(verts, arrows);
}

// Random 2-acyclic quiver on n vertices with at most max_mult parallel
// arrows. With `plant_cycle` an oriented cycle through all vertices is
// forced, since most random orientations are acyclic.
inline quiver_ptr random_quiver(std::mt19937_64 &rng, std::size_t n, int max_mult, bool plant_cycle = true)
{
    std::vector<std::vector<int>> mult(n, std::vector<int>(n, 0));
    std::uniform_int_distribution<int> m(0, max_mult);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            const int c = m(rng);
            if (rng() % 2) {
                mult[i][j] = c;
            } else {
                mult[j][i] = c;
            }
        }
    }
    if (plant_cycle && n >= 3) {
        for (std::size_t i = 0; i < n; ++i) {
            const auto j = (i + 1) % n;
            if (mult[i][j] == 0) {
                mult[i][j] = 1;
                mult[j][i] = 0;
            }
        }
    }
    return from_multiplicities(mult);
}

inline rat_matrix random_matrix(std::mt19937_64 &rng, std::size_t r, std::size_t c, int lo = -3, int hi = 3)
{
    std::uniform_int_distribution<int> d(lo, hi);
    rat_matrix m(r, c);
    for (std::size_t i = 0; i < r; ++i) {
        for (std::size_t j = 0; j < c; ++j) {
            m(i, j) = d(rng);
        }
    }
    return m;
}

inline representation random_rep(std::mt19937_64 &rng, const quiver_ptr &q, std::size_t max_dim)
{
    std::uniform_int_distribution<std::size_t> d(0, max_dim);
    std::vector<std::size_t> dims(q->num_vertices());
    for (auto &x : dims) {
        x = d(rng);
    }
    std::vector<rat_matrix> maps;
    for (const auto &a : q->arrows()) {
        // Low rank now and then, so kernels and cokernels are nontrivial.
        if (rng() % 3 == 0 && dims[a.head] > 0 && dims[a.tail] > 0) {
            const auto u = random_matrix(rng, dims[a.head], 1);
            const auto v = random_matrix(rng, 1, dims[a.tail]);
            maps.push_back(u * v);
        } else {
            maps.push_back(random_matrix(rng, dims[a.head], dims[a.tail]));
        }
    }
    return representation(q, dims, std::move(maps));
}

// Random invertible substitution a -> L(a) + (degree 2..3 terms); L is
// the identity when `unitriangular`.
inline substitution random_substitution(std::mt19937_64 &rng, const quiver_ptr &q, int order, bool unitriangular)
{
    std::map<std::pair<std::size_t, std::size_t>, rat_matrix> blocks;
    for (std::size_t i = 0; i < q->num_vertices(); ++i) {
        for (std::size_t j = 0; j < q->num_vertices(); ++j) {
            const auto m = q->multiplicity(i, j);
            if (m == 0) {
                continue;
            }
            rat_matrix b = rat_matrix::identity(m);
            if (!unitriangular) {
                do {
                    b = random_matrix(rng, m, m);
                } while (rank(b) != m);
            }
            blocks.emplace(std::pair(i, j), b);
        }
    }
    const auto lin = linear_substitution(q, order, blocks);
    const auto paths = detail::enumerate_paths(*q, 4);
    std::vector<element> imgs;
    std::uniform_int_distribution<int> coef(-2, 2);
    for (std::size_t a = 0; a < q->num_arrows(); ++a) {
        auto img = lin.image(a);
        const auto &ar = q->arrow_at(a);
        for (std::size_t d = 2; d < paths.size(); ++d) {
            for (const auto &p : paths[d]) {
                if (p.head == ar.head && p.tail == ar.tail && rng() % 2) {
                    img.add(p, coef(rng));
                }
            }
        }
        imgs.push_back(std::move(img));
    }
    return substitution(q, std::move(imgs));
}

} // namespace support

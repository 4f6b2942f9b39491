#ifndef QPMUT_JACOBIAN_HPP
#define QPMUT_JACOBIAN_HPP

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <map>
#include <utility>
#include <vector>

#include <qpmut/exactlin.hpp>
#include <qpmut/pathalg.hpp>
#include <qpmut/qp.hpp>
#include <qpmut/reduction.hpp>

namespace qpmut
{

// One generator d_a S per arrow, in arrow order, each valid modulo m^(N-1).
inline std::vector<element> jacobian_generators(const qp &x)
{
    std::vector<element> gens;
    for (std::size_t a = 0; a < x.graph->num_arrows(); ++a) {
        gens.push_back(cyclic_derivative(x.pot, a));
    }
    return gens;
}

// Graded dimensions of R<<A>> / (J(A,S) + m^M) with M = N - 1, the highest
// power for which the generators are known. Degrees >= M are not reported.
struct truncated_quotient {
    int order = 0;
    int trusted_below_degree = 0;
    std::vector<std::size_t> dims;
    // Paths whose classes form a basis of each graded layer.
    std::vector<std::vector<path>> basis;

    std::size_t total() const
    {
        std::size_t t = 0;
        for (auto d : dims) {
            t += d;
        }
        return t;
    }
};

namespace detail
{

using sparse_row = std::vector<std::pair<std::uint32_t, rational>>;

// Incremental echelon basis keyed by leading column.
class echelon
{
public:
    explicit echelon(std::size_t cols) : m_pivot(cols) {}

    void insert(sparse_row row)
    {
        sparse_row tmp;
        rational f;
        while (!row.empty()) {
            const auto lead = row.front().first;
            auto &piv = m_pivot[lead];
            if (piv.empty()) {
                if (row.front().second != 1) {
                    const rational inv = 1 / row.front().second;
                    for (auto &e : row) {
                        e.second *= inv;
                    }
                }
                piv = std::move(row);
                ++m_rank;
                return;
            }
            // row -= row[lead] * piv
            f = row.front().second;
            tmp.clear();
            std::size_t i = 1;
            std::size_t j = 1;
            while (i < row.size() || j < piv.size()) {
                if (j == piv.size() || (i < row.size() && row[i].first < piv[j].first)) {
                    tmp.push_back(std::move(row[i++]));
                } else if (i == row.size() || piv[j].first < row[i].first) {
                    tmp.emplace_back(piv[j].first, -f * piv[j].second);
                    ++j;
                } else {
                    row[i].second -= f * piv[j].second;
                    if (sgn(row[i].second) != 0) {
                        tmp.push_back(std::move(row[i]));
                    }
                    ++i;
                    ++j;
                }
            }
            row.swap(tmp);
        }
    }

    bool is_pivot(std::size_t col) const
    {
        return !m_pivot[col].empty();
    }
    std::size_t rank() const noexcept
    {
        return m_rank;
    }

private:
    std::vector<sparse_row> m_pivot;
    std::size_t m_rank = 0;
};

// All paths of degree < max_degree, grouped by degree.
inline std::vector<std::vector<path>> enumerate_paths(const quiver &q, std::size_t max_degree)
{
    std::vector<std::vector<path>> by_degree;
    if (max_degree == 0) {
        return by_degree;
    }
    by_degree.emplace_back();
    for (std::size_t v = 0; v < q.num_vertices(); ++v) {
        by_degree[0].push_back(idempotent_path(v));
    }
    for (std::size_t d = 1; d < max_degree; ++d) {
        std::vector<path> next;
        for (const auto &p : by_degree[d - 1]) {
            // Extend on the left: x * p with t(x) = h(p).
            for (std::size_t x = 0; x < q.num_arrows(); ++x) {
                const auto &ar = q.arrow_at(x);
                if (ar.tail != p.head) {
                    continue;
                }
                path r;
                r.head = ar.head;
                r.tail = p.tail;
                r.arrows.reserve(d);
                r.arrows.push_back(static_cast<std::uint32_t>(x));
                r.arrows.insert(r.arrows.end(), p.arrows.begin(), p.arrows.end());
                next.push_back(std::move(r));
            }
        }
        std::sort(next.begin(), next.end());
        by_degree.push_back(std::move(next));
    }
    return by_degree;
}

} // namespace detail

// Sandwiches p * g * q over all generators g and paths p, q with
// deg p + deg q + val(g) < M are reduced into one echelon basis per
// (head, tail) block; columns are ordered by degree, so the number of
// pivot columns of degree d is the rank of the ideal in layer d.
inline truncated_quotient jacobian_dims(const qp &x)
{
    const auto &qptr = x.graph;
    const auto &q = *qptr;
    const int m = std::max(0, x.order() - 1);
    truncated_quotient res;
    res.order = x.order();
    res.trusted_below_degree = m;
    if (m == 0) {
        return res;
    }

    const auto nv = q.num_vertices();
    const auto paths = detail::enumerate_paths(q, static_cast<std::size_t>(m));

    // Column index of every path inside its (head, tail) block.
    std::map<path, std::uint32_t> column;
    std::vector<std::uint32_t> block_size(nv * nv, 0);
    for (const auto &layer : paths) {
        for (const auto &p : layer) {
            column.emplace(p, block_size[p.head * nv + p.tail]++);
        }
    }
    std::vector<detail::echelon> blocks;
    blocks.reserve(nv * nv);
    for (std::size_t b = 0; b < nv * nv; ++b) {
        blocks.emplace_back(block_size[b]);
    }

    std::vector<std::vector<const path *>> by_head(nv);
    std::vector<std::vector<const path *>> by_tail(nv);
    for (const auto &layer : paths) {
        for (const auto &p : layer) {
            by_head[p.head].push_back(&p);
            by_tail[p.tail].push_back(&p);
        }
    }

    for (const auto &g0 : jacobian_generators(x)) {
        const auto g = g0.truncated(m);
        const auto val = g.valuation();
        if (!val) {
            continue;
        }
        const auto gh = g.terms().begin()->first.head;
        const auto gt = g.terms().begin()->first.tail;
        for (const auto *rq : by_head[gt]) {
            if (*val + rq->degree() >= static_cast<std::size_t>(m)) {
                break;
            }
            element gq(qptr, m);
            detail::multiply_into(gq, g, element::of_path(qptr, *rq, m));
            if (gq.is_zero()) {
                continue;
            }
            for (const auto *lp : by_tail[gh]) {
                if (*val + rq->degree() + lp->degree() >= static_cast<std::size_t>(m)) {
                    break;
                }
                element row(qptr, m);
                detail::multiply_into(row, element::of_path(qptr, *lp, m), gq);
                if (row.is_zero()) {
                    continue;
                }
                const auto &first = row.terms().begin()->first;
                auto &ech = blocks[first.head * nv + first.tail];
                detail::sparse_row sr;
                sr.reserve(row.size());
                for (const auto &[p, c] : row.terms()) {
                    sr.emplace_back(column.at(p), c);
                }
                std::sort(sr.begin(), sr.end(), [](const auto &l, const auto &r) { return l.first < r.first; });
                ech.insert(std::move(sr));
            }
        }
    }

    res.dims.assign(static_cast<std::size_t>(m), 0);
    res.basis.assign(static_cast<std::size_t>(m), {});
    for (std::size_t d = 0; d < paths.size(); ++d) {
        for (const auto &p : paths[d]) {
            if (!blocks[p.head * nv + p.tail].is_pivot(column.at(p))) {
                ++res.dims[d];
                res.basis[d].push_back(p);
            }
        }
    }
    return res;
}

// Up to a change of arrows, the QP is a disjoint union of 2-cycles with
// T = sum b_k a_k: splitting leaves no reduced arrows.
inline bool is_trivial_qp(const qp &x)
{
    const auto sr = split(x);
    return sr.reduced.graph->num_arrows() == 0 && sr.reduced.pot.is_zero();
}

} // namespace qpmut

#endif

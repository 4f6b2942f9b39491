#ifndef QPMUT_DECORATED_HPP
#define QPMUT_DECORATED_HPP

#include <cstddef>
#include <cstdint>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include <qpmut/error.hpp>
#include <qpmut/exactlin.hpp>
#include <qpmut/jacobian.hpp>
#include <qpmut/pathalg.hpp>
#include <qpmut/qp.hpp>
#include <qpmut/quiver.hpp>

namespace qpmut
{

// Finite-dimensional representation: M(a) has shape dim(h a) x dim(t a).
struct representation {
    quiver_ptr graph;
    std::vector<std::size_t> dims;
    std::vector<rat_matrix> maps;

    representation() = default;
    representation(quiver_ptr g, std::vector<std::size_t> d, std::vector<rat_matrix> m)
        : graph(std::move(g)), dims(std::move(d)), maps(std::move(m))
    {
        validate();
    }

    static representation zero(quiver_ptr g)
    {
        std::vector<std::size_t> d(g->num_vertices(), 0);
        std::vector<rat_matrix> m(g->num_arrows());
        return representation(std::move(g), std::move(d), std::move(m));
    }

    void validate() const
    {
        if (dims.size() != graph->num_vertices() || maps.size() != graph->num_arrows()) {
            throw_input("ShapeMismatch", "representation does not match its quiver");
        }
        for (std::size_t a = 0; a < maps.size(); ++a) {
            const auto &ar = graph->arrow_at(a);
            if (maps[a].rows() != dims[ar.head] || maps[a].cols() != dims[ar.tail]) {
                throw_input("ShapeMismatch", "map of arrow '" + ar.id + "' is " + maps[a].shape() + ", expected "
                                                 + std::to_string(dims[ar.head]) + "x"
                                                 + std::to_string(dims[ar.tail]));
            }
        }
    }

    std::size_t total_dim() const
    {
        std::size_t t = 0;
        for (auto d : dims) {
            t += d;
        }
        return t;
    }
};

// (M, V): V only records dimensions; it carries no maps.
struct decorated_rep {
    representation rep;
    std::vector<std::size_t> decoration;

    decorated_rep() = default;
    decorated_rep(representation m, std::vector<std::size_t> v) : rep(std::move(m)), decoration(std::move(v))
    {
        if (decoration.size() != rep.graph->num_vertices()) {
            throw_input("ShapeMismatch", "decoration needs one dimension per vertex");
        }
    }
};

// Product M(a_1) ... M(a_d); the identity of M(v) for e_v.
inline rat_matrix evaluate_path(const representation &m, const path &p)
{
    if (p.arrows.empty()) {
        return rat_matrix::identity(m.dims[p.head]);
    }
    rat_matrix r = m.maps[p.arrows.back()];
    for (std::size_t i = p.arrows.size() - 1; i-- > 0;) {
        r = m.maps[p.arrows[i]] * r;
    }
    return r;
}

inline rat_matrix evaluate(const representation &m, const element &x, std::size_t head, std::size_t tail)
{
    rat_matrix r(m.dims[head], m.dims[tail]);
    for (const auto &[p, c] : x.terms()) {
        if (p.head != head || p.tail != tail) {
            throw_input("ShapeMismatch", "element is not homogeneous in its endpoints");
        }
        auto pm = evaluate_path(m, p);
        for (std::size_t i = 0; i < pm.rows(); ++i) {
            for (std::size_t j = 0; j < pm.cols(); ++j) {
                if (sgn(pm(i, j)) != 0) {
                    r(i, j) += c * pm(i, j);
                }
            }
        }
    }
    return r;
}

// Whether every path of length `bound` acts by zero: the images
// U_L(v) = sum over paths p of length L ending at v of im M(p) must vanish
// at L = bound.
inline bool is_nilpotent_of_length(const representation &m, std::size_t bound)
{
    const auto &q = *m.graph;
    std::vector<rat_matrix> span(q.num_vertices());
    for (std::size_t v = 0; v < q.num_vertices(); ++v) {
        span[v] = rat_matrix::identity(m.dims[v]);
    }
    for (std::size_t l = 0; l < bound; ++l) {
        std::vector<rat_matrix> next(q.num_vertices());
        for (std::size_t v = 0; v < q.num_vertices(); ++v) {
            next[v] = rat_matrix(m.dims[v], 0);
        }
        for (std::size_t a = 0; a < q.num_arrows(); ++a) {
            const auto &ar = q.arrow_at(a);
            if (span[ar.tail].cols() == 0) {
                continue;
            }
            next[ar.head] = hstack(next[ar.head], m.maps[a] * span[ar.tail]);
        }
        for (auto &s : next) {
            s = image_basis(s);
        }
        span = std::move(next);
    }
    for (const auto &s : span) {
        if (s.cols() != 0) {
            return false;
        }
    }
    return true;
}

// M is a module over the Jacobian algebra: paths of length `bound` act by
// zero and every d_a S evaluates to zero. Generator terms at or beyond the
// truncation are unknown; with bound <= N - 1 they act by zero anyway.
inline bool check_relations(const representation &m, const qp &x, std::size_t bound)
{
    if (!same_quiver(m.graph, x.graph)) {
        throw_input("ShapeMismatch", "representation and QP use different quivers");
    }
    m.validate();
    if (!is_nilpotent_of_length(m, bound)) {
        return false;
    }
    const auto &q = *x.graph;
    for (std::size_t a = 0; a < q.num_arrows(); ++a) {
        const auto g = cyclic_derivative(x.pot, a);
        const auto &ar = q.arrow_at(a);
        // d_a S runs from h(a) to t(a).
        if (!evaluate(m, g, ar.tail, ar.head).is_zero()) {
            return false;
        }
    }
    return true;
}

inline std::size_t default_nilpotency_bound(const representation &m)
{
    return m.total_dim() + 1;
}

// The quiver with every arrow at k reversed and starred.
inline quiver reverse_at(const quiver &q, std::size_t k)
{
    std::vector<arrow> out;
    for (const auto &a : q.arrows()) {
        if (a.head == k || a.tail == k) {
            out.push_back({starred(a.id), a.head, a.tail});
        } else {
            out.push_back(a);
        }
    }
    return quiver::from_resolved(q.vertices(), std::move(out));
}

namespace detail
{

// Copies the spaces and maps away from k onto the reversed quiver.
inline decorated_rep carry_over(const decorated_rep &dm, const quiver_ptr &rq, std::size_t k)
{
    const auto &q = *dm.rep.graph;
    decorated_rep out;
    out.rep.graph = rq;
    out.rep.dims = dm.rep.dims;
    out.rep.maps.assign(rq->num_arrows(), rat_matrix{});
    out.decoration = dm.decoration;
    for (const auto &a : q.arrows()) {
        if (a.head != k && a.tail != k) {
            out.rep.maps[rq->arrow_index(a.id)] = dm.rep.maps[q.arrow_index(a.id)];
        }
    }
    return out;
}

} // namespace detail

// Reflection at a sink k: alpha = [M(a_1) | M(a_2) | ...] over arrows into k
// in ascending id order, new M(k) = ker alpha (+) V(k), new V(k) = coker
// alpha. M(a*) is the kernel inclusion followed by the projection onto the
// M(t a) block, and zero on the V(k) summand.
inline decorated_rep reflect_sink(const decorated_rep &dm, std::size_t k)
{
    const auto &q = *dm.rep.graph;
    if (k >= q.num_vertices()) {
        throw_input("UnknownVertex", "vertex index out of range");
    }
    if (!q.is_sink(k)) {
        throw_precondition("NotASink", "vertex '" + q.vertices()[k] + "' has outgoing arrows");
    }
    const auto rq = share(reverse_at(q, k));
    auto out = detail::carry_over(dm, rq, k);

    const auto ins = q.arrows_into(k);
    std::size_t in_dim = 0;
    for (auto a : ins) {
        in_dim += dm.rep.dims[q.arrow_at(a).tail];
    }
    rat_matrix alpha(dm.rep.dims[k], 0);
    for (auto a : ins) {
        alpha = hstack(alpha, dm.rep.maps[a]);
    }
    if (alpha.cols() != in_dim) {
        throw_invariant("ShapeMismatch", "assembled map has the wrong width");
    }
    const auto ker = kernel_basis(alpha); // in_dim x kdim
    const auto kdim = ker.cols();
    const auto rk = in_dim - kdim;
    const auto vk = dm.decoration[k];

    out.rep.dims[k] = kdim + vk;
    out.decoration[k] = dm.rep.dims[k] - rk;
    std::size_t offset = 0;
    for (auto a : ins) {
        const auto &ar = q.arrow_at(a);
        const auto w = dm.rep.dims[ar.tail];
        rat_matrix m(w, kdim + vk);
        for (std::size_t i = 0; i < w; ++i) {
            for (std::size_t j = 0; j < kdim; ++j) {
                m(i, j) = ker(offset + i, j);
            }
        }
        out.rep.maps[rq->arrow_index(starred(ar.id))] = std::move(m);
        offset += w;
    }
    out.rep.validate();
    return out;
}

// Reflection at a source k: beta stacks M(b) over arrows out of k in
// ascending id order; new M(k) = coker beta (+) V(k), new V(k) = ker beta.
// The cokernel is M_out modulo im beta, with the complement spanned by the
// standard basis vectors that extend image_basis(beta) in index order.
inline decorated_rep reflect_source(const decorated_rep &dm, std::size_t k)
{
    const auto &q = *dm.rep.graph;
    if (k >= q.num_vertices()) {
        throw_input("UnknownVertex", "vertex index out of range");
    }
    if (!q.is_source(k)) {
        throw_precondition("NotASource", "vertex '" + q.vertices()[k] + "' has incoming arrows");
    }
    const auto rq = share(reverse_at(q, k));
    auto out = detail::carry_over(dm, rq, k);

    const auto outs = q.arrows_out_of(k);
    rat_matrix beta(0, dm.rep.dims[k]);
    for (auto b : outs) {
        beta = vstack(beta, dm.rep.maps[b]);
    }
    const auto out_dim = beta.rows();
    const auto im = image_basis(beta); // out_dim x r
    const auto r = im.cols();
    const auto cdim = out_dim - r;
    const auto vk = dm.decoration[k];

    // Basis [im | e_J] of M_out; the last cdim rows of its inverse project
    // onto the complement, i.e. realize M_out -> coker beta.
    const auto ext = rref(hstack(im, rat_matrix::identity(out_dim)));
    rat_matrix basis = im;
    for (auto p : ext.pivots) {
        if (p >= r) {
            rat_matrix e(out_dim, 1);
            e(p - r, 0) = 1;
            basis = hstack(basis, e);
        }
    }
    const auto inv = invert(basis);
    if (!inv) {
        throw_invariant("SingularBasis", "cokernel complement is not a basis");
    }
    const auto proj = inv->row_block(r, cdim); // cdim x out_dim

    out.rep.dims[k] = cdim + vk;
    out.decoration[k] = dm.rep.dims[k] - r;
    std::size_t offset = 0;
    for (auto b : outs) {
        const auto &br = q.arrow_at(b);
        const auto w = dm.rep.dims[br.head];
        rat_matrix m(cdim + vk, w);
        for (std::size_t i = 0; i < cdim; ++i) {
            for (std::size_t j = 0; j < w; ++j) {
                m(i, j) = proj(i, offset + j);
            }
        }
        out.rep.maps[rq->arrow_index(starred(br.id))] = std::move(m);
        offset += w;
    }
    out.rep.validate();
    return out;
}

// Sink/source dispatch. A vertex that is both (isolated) is treated as a sink.
inline decorated_rep mutate_decorated(const decorated_rep &dm, std::size_t k)
{
    const auto &q = *dm.rep.graph;
    if (k >= q.num_vertices()) {
        throw_input("UnknownVertex", "vertex index out of range");
    }
    if (q.is_sink(k)) {
        return reflect_sink(dm, k);
    }
    if (q.is_source(k)) {
        return reflect_source(dm, k);
    }
    throw_precondition("NotSinkOrSource", "vertex '" + q.vertices()[k]
                                              + "' is neither a sink nor a source; decorated mutation at "
                                                "other vertices is not implemented");
}

// Randomized isomorphism test. Intertwiners phi = (phi_v) solve
// M2(a) phi(t a) = phi(h a) M1(a); a random element of that space is an
// isomorphism with probability 1 whenever one exists. One-sided: `true` is
// certain, `false` may (rarely) be wrong.
inline bool is_isomorphic(const representation &m1, const representation &m2, std::size_t trials = 8,
                          std::uint64_t seed = 0x5eed)
{
    if (!same_quiver(m1.graph, m2.graph)) {
        throw_input("ShapeMismatch", "representations live over different quivers");
    }
    m1.validate();
    m2.validate();
    if (m1.dims != m2.dims) {
        return false;
    }
    const auto &q = *m1.graph;
    const auto nv = q.num_vertices();
    std::vector<std::size_t> offset(nv + 1, 0);
    for (std::size_t v = 0; v < nv; ++v) {
        offset[v + 1] = offset[v] + m1.dims[v] * m1.dims[v];
    }
    const auto unknowns = offset[nv];
    if (unknowns == 0) {
        return true;
    }
    auto var = [&](std::size_t v, std::size_t i, std::size_t j) { return offset[v] + i * m1.dims[v] + j; };

    std::size_t eqs = 0;
    for (const auto &a : q.arrows()) {
        eqs += m1.dims[a.head] * m1.dims[a.tail];
    }
    rat_matrix sys(eqs, unknowns);
    std::size_t row = 0;
    for (std::size_t ai = 0; ai < q.num_arrows(); ++ai) {
        const auto &a = q.arrow_at(ai);
        const auto h = a.head;
        const auto t = a.tail;
        const auto &x1 = m1.maps[ai];
        const auto &x2 = m2.maps[ai];
        // (M2(a) phi_t - phi_h M1(a))(i, j) = 0
        for (std::size_t i = 0; i < m1.dims[h]; ++i) {
            for (std::size_t j = 0; j < m1.dims[t]; ++j) {
                for (std::size_t l = 0; l < m1.dims[t]; ++l) {
                    sys(row, var(t, l, j)) += x2(i, l);
                }
                for (std::size_t l = 0; l < m1.dims[h]; ++l) {
                    sys(row, var(h, i, l)) -= x1(l, j);
                }
                ++row;
            }
        }
    }
    const auto basis = kernel_basis(sys);
    if (basis.cols() == 0) {
        return false;
    }
    std::mt19937_64 gen(seed);
    for (std::size_t t = 0; t < trials; ++t) {
        std::vector<rational> coeffs(basis.cols());
        for (auto &c : coeffs) {
            c = static_cast<long>(gen() % 201) - 100;
        }
        bool ok = true;
        for (std::size_t v = 0; v < nv && ok; ++v) {
            const auto d = m1.dims[v];
            rat_matrix phi(d, d);
            for (std::size_t i = 0; i < d; ++i) {
                for (std::size_t j = 0; j < d; ++j) {
                    for (std::size_t b = 0; b < basis.cols(); ++b) {
                        phi(i, j) += coeffs[b] * basis(var(v, i, j), b);
                    }
                }
            }
            ok = rank(phi) == d;
        }
        if (ok) {
            return true;
        }
    }
    return false;
}

// Moves m onto `target`, arrow `id` of m becoming arrow rename(id).
// Endpoints must agree.
template <typename F>
representation transport(const representation &m, const quiver_ptr &target, F &&rename)
{
    const auto &q = *m.graph;
    if (q.vertices() != target->vertices() || q.num_arrows() != target->num_arrows()) {
        throw_input("QuiverMismatch", "transport needs the same vertices and arrow count");
    }
    std::vector<rat_matrix> maps(target->num_arrows());
    for (std::size_t a = 0; a < q.num_arrows(); ++a) {
        const auto &src = q.arrow_at(a);
        const auto t = target->arrow_index(rename(src.id));
        const auto &dst = target->arrow_at(t);
        if (dst.tail != src.tail || dst.head != src.head) {
            throw_input("QuiverMismatch", "arrow '" + src.id + "' and '" + dst.id + "' have different endpoints");
        }
        maps[t] = m.maps[a];
    }
    return representation(target, m.dims, std::move(maps));
}

// Direct sum of representations over the same quiver.
inline representation direct_sum(const representation &x, const representation &y)
{
    if (!same_quiver(x.graph, y.graph)) {
        throw_input("ShapeMismatch", "direct sum over different quivers");
    }
    const auto &q = *x.graph;
    std::vector<std::size_t> dims(q.num_vertices());
    for (std::size_t v = 0; v < dims.size(); ++v) {
        dims[v] = x.dims[v] + y.dims[v];
    }
    std::vector<rat_matrix> maps;
    for (std::size_t a = 0; a < q.num_arrows(); ++a) {
        const auto &ar = q.arrow_at(a);
        rat_matrix m(dims[ar.head], dims[ar.tail]);
        for (std::size_t i = 0; i < x.maps[a].rows(); ++i) {
            for (std::size_t j = 0; j < x.maps[a].cols(); ++j) {
                m(i, j) = x.maps[a](i, j);
            }
        }
        for (std::size_t i = 0; i < y.maps[a].rows(); ++i) {
            for (std::size_t j = 0; j < y.maps[a].cols(); ++j) {
                m(x.dims[ar.head] + i, x.dims[ar.tail] + j) = y.maps[a](i, j);
            }
        }
        maps.push_back(std::move(m));
    }
    return representation(x.graph, std::move(dims), std::move(maps));
}

} // namespace qpmut

#endif

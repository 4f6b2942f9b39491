#ifndef QPMUT_QP_HPP
#define QPMUT_QP_HPP

#include <utility>

#include <qpmut/error.hpp>
#include <qpmut/pathalg.hpp>
#include <qpmut/quiver.hpp>

namespace qpmut
{

// Quiver with potential; the truncation order is the potential's.
struct qp {
    quiver_ptr graph;
    potential pot;

    qp() = default;
    qp(quiver_ptr g, potential s) : graph(std::move(g)), pot(std::move(s))
    {
        if (!same_quiver(graph, pot.quiver_ref())) {
            throw_input("QuiverMismatch", "potential lives over a different quiver");
        }
    }

    static qp with_zero_potential(quiver_ptr g, int order)
    {
        auto s = potential::zero(g, order);
        return qp(std::move(g), std::move(s));
    }

    int order() const noexcept
    {
        return pot.order();
    }

    // S in m^3.
    bool is_reduced() const
    {
        const auto v = pot.valuation();
        return !v || *v >= 3;
    }

    qp truncated(int n) const
    {
        return qp(graph, pot.truncated(n));
    }
    qp with_order(int n) const
    {
        return qp(graph, pot.with_order(n));
    }
};

} // namespace qpmut

#endif

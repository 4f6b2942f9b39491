#ifndef QPMUT_EXACTLIN_HPP
#define QPMUT_EXACTLIN_HPP

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <gmpxx.h>

#include <qpmut/error.hpp>

namespace qpmut
{

// Exact rationals. mpq_class keeps values canonical (lowest terms,
// positive denominator) as long as every constructor path goes through
// canonicalize(), which make_rational() and parse_rational() do.
using rational = mpq_class;

inline rational make_rational(long num, long den = 1)
{
    rational r(num, den);
    r.canonicalize();
    return r;
}

// "p/q", or "p" when q == 1.
inline std::string to_string(const rational &r)
{
    if (r.get_den() == 1) {
        return r.get_num().get_str();
    }
    return r.get_num().get_str() + "/" + r.get_den().get_str();
}

inline rational parse_rational(std::string_view s)
{
    std::string str(s);
    auto trim = [](std::string &x) {
        const auto b = x.find_first_not_of(" \t");
        const auto e = x.find_last_not_of(" \t");
        x = (b == std::string::npos) ? std::string{} : x.substr(b, e - b + 1);
    };
    trim(str);
    if (!str.empty() && str.front() == '+') {
        str.erase(0, 1);
    }
    rational r;
    if (str.empty() || r.set_str(str, 10) != 0) {
        throw_input("ParseError", "invalid rational literal '" + std::string(s) + "'");
    }
    if (r.get_den() == 0) {
        throw_input("ParseError", "zero denominator in '" + std::string(s) + "'");
    }
    r.canonicalize();
    return r;
}

// Dense row-major rational matrix.
class rat_matrix
{
public:
    rat_matrix() = default;
    rat_matrix(std::size_t rows, std::size_t cols) : m_rows(rows), m_cols(cols), m_data(rows * cols) {}

    static rat_matrix identity(std::size_t n)
    {
        rat_matrix m(n, n);
        for (std::size_t i = 0; i < n; ++i) {
            m(i, i) = 1;
        }
        return m;
    }

    static rat_matrix from_rows(const std::vector<std::vector<rational>> &rows)
    {
        const std::size_t r = rows.size();
        const std::size_t c = r == 0 ? 0 : rows.front().size();
        rat_matrix m(r, c);
        for (std::size_t i = 0; i < r; ++i) {
            if (rows[i].size() != c) {
                throw_input("ShapeMismatch", "ragged matrix rows");
            }
            for (std::size_t j = 0; j < c; ++j) {
                m(i, j) = rows[i][j];
            }
        }
        return m;
    }

    std::size_t rows() const noexcept
    {
        return m_rows;
    }
    std::size_t cols() const noexcept
    {
        return m_cols;
    }

    rational &operator()(std::size_t i, std::size_t j)
    {
        return m_data[i * m_cols + j];
    }
    const rational &operator()(std::size_t i, std::size_t j) const
    {
        return m_data[i * m_cols + j];
    }

    bool is_zero() const
    {
        for (const auto &x : m_data) {
            if (sgn(x) != 0) {
                return false;
            }
        }
        return true;
    }

    rat_matrix transpose() const
    {
        rat_matrix t(m_cols, m_rows);
        for (std::size_t i = 0; i < m_rows; ++i) {
            for (std::size_t j = 0; j < m_cols; ++j) {
                t(j, i) = (*this)(i, j);
            }
        }
        return t;
    }

    // Columns [first, first + count).
    rat_matrix col_block(std::size_t first, std::size_t count) const
    {
        rat_matrix b(m_rows, count);
        for (std::size_t i = 0; i < m_rows; ++i) {
            for (std::size_t j = 0; j < count; ++j) {
                b(i, j) = (*this)(i, first + j);
            }
        }
        return b;
    }

    rat_matrix row_block(std::size_t first, std::size_t count) const
    {
        rat_matrix b(count, m_cols);
        for (std::size_t i = 0; i < count; ++i) {
            for (std::size_t j = 0; j < m_cols; ++j) {
                b(i, j) = (*this)(first + i, j);
            }
        }
        return b;
    }

    friend bool operator==(const rat_matrix &a, const rat_matrix &b)
    {
        return a.m_rows == b.m_rows && a.m_cols == b.m_cols && a.m_data == b.m_data;
    }

    friend rat_matrix operator*(const rat_matrix &a, const rat_matrix &b)
    {
        if (a.m_cols != b.m_rows) {
            throw_input("ShapeMismatch", "matrix product of " + a.shape() + " and " + b.shape());
        }
        rat_matrix c(a.m_rows, b.m_cols);
        rational tmp;
        for (std::size_t i = 0; i < a.m_rows; ++i) {
            for (std::size_t k = 0; k < a.m_cols; ++k) {
                const auto &aik = a(i, k);
                if (sgn(aik) == 0) {
                    continue;
                }
                for (std::size_t j = 0; j < b.m_cols; ++j) {
                    if (sgn(b(k, j)) != 0) {
                        tmp = aik * b(k, j);
                        c(i, j) += tmp;
                    }
                }
            }
        }
        return c;
    }

    friend rat_matrix operator+(rat_matrix a, const rat_matrix &b)
    {
        a.check_same_shape(b);
        for (std::size_t i = 0; i < a.m_data.size(); ++i) {
            a.m_data[i] += b.m_data[i];
        }
        return a;
    }

    friend rat_matrix operator-(rat_matrix a, const rat_matrix &b)
    {
        a.check_same_shape(b);
        for (std::size_t i = 0; i < a.m_data.size(); ++i) {
            a.m_data[i] -= b.m_data[i];
        }
        return a;
    }

    std::string shape() const
    {
        return std::to_string(m_rows) + "x" + std::to_string(m_cols);
    }

private:
    void check_same_shape(const rat_matrix &b) const
    {
        if (m_rows != b.m_rows || m_cols != b.m_cols) {
            throw_input("ShapeMismatch", "matrix sum of " + shape() + " and " + b.shape());
        }
    }

    std::size_t m_rows = 0;
    std::size_t m_cols = 0;
    std::vector<rational> m_data;
};

// Horizontal concatenation [a | b].
inline rat_matrix hstack(const rat_matrix &a, const rat_matrix &b)
{
    if (a.rows() != b.rows()) {
        throw_input("ShapeMismatch", "hstack of " + a.shape() + " and " + b.shape());
    }
    rat_matrix r(a.rows(), a.cols() + b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i) {
        for (std::size_t j = 0; j < a.cols(); ++j) {
            r(i, j) = a(i, j);
        }
        for (std::size_t j = 0; j < b.cols(); ++j) {
            r(i, a.cols() + j) = b(i, j);
        }
    }
    return r;
}

// Vertical concatenation.
inline rat_matrix vstack(const rat_matrix &a, const rat_matrix &b)
{
    if (a.cols() != b.cols()) {
        throw_input("ShapeMismatch", "vstack of " + a.shape() + " and " + b.shape());
    }
    rat_matrix r(a.rows() + b.rows(), a.cols());
    for (std::size_t i = 0; i < a.rows(); ++i) {
        for (std::size_t j = 0; j < a.cols(); ++j) {
            r(i, j) = a(i, j);
        }
    }
    for (std::size_t i = 0; i < b.rows(); ++i) {
        for (std::size_t j = 0; j < b.cols(); ++j) {
            r(a.rows() + i, j) = b(i, j);
        }
    }
    return r;
}

struct rref_result {
    rat_matrix reduced;
    std::vector<std::size_t> pivots;
    std::size_t rank = 0;
};

inline rref_result rref(rat_matrix m)
{
    rref_result res;
    const std::size_t rows = m.rows();
    const std::size_t cols = m.cols();
    std::size_t r = 0;
    rational factor;
    for (std::size_t c = 0; c < cols && r < rows; ++c) {
        std::size_t p = r;
        while (p < rows && sgn(m(p, c)) == 0) {
            ++p;
        }
        if (p == rows) {
            continue;
        }
        if (p != r) {
            for (std::size_t j = c; j < cols; ++j) {
                std::swap(m(p, j), m(r, j));
            }
        }
        const rational inv = 1 / m(r, c);
        for (std::size_t j = c; j < cols; ++j) {
            m(r, j) *= inv;
        }
        for (std::size_t i = 0; i < rows; ++i) {
            if (i == r || sgn(m(i, c)) == 0) {
                continue;
            }
            factor = m(i, c);
            for (std::size_t j = c; j < cols; ++j) {
                if (sgn(m(r, j)) != 0) {
                    m(i, j) -= factor * m(r, j);
                }
            }
        }
        res.pivots.push_back(c);
        ++r;
    }
    res.rank = r;
    res.reduced = std::move(m);
    return res;
}

inline std::size_t rank(const rat_matrix &m)
{
    return rref(m).rank;
}

// Columns form a basis of {x : m x = 0}; one column per free variable,
// ordered by free-column index.
inline rat_matrix kernel_basis(const rat_matrix &m)
{
    const auto rr = rref(m);
    const std::size_t cols = m.cols();
    std::vector<bool> is_pivot(cols, false);
    for (auto p : rr.pivots) {
        is_pivot[p] = true;
    }
    std::vector<std::size_t> free_cols;
    for (std::size_t c = 0; c < cols; ++c) {
        if (!is_pivot[c]) {
            free_cols.push_back(c);
        }
    }
    rat_matrix k(cols, free_cols.size());
    for (std::size_t f = 0; f < free_cols.size(); ++f) {
        const auto fc = free_cols[f];
        k(fc, f) = 1;
        for (std::size_t i = 0; i < rr.rank; ++i) {
            k(rr.pivots[i], f) = -rr.reduced(i, fc);
        }
    }
    return k;
}

// Columns of m at its pivot positions: a basis of the column space.
inline rat_matrix image_basis(const rat_matrix &m)
{
    const auto rr = rref(m);
    rat_matrix b(m.rows(), rr.rank);
    for (std::size_t j = 0; j < rr.rank; ++j) {
        for (std::size_t i = 0; i < m.rows(); ++i) {
            b(i, j) = m(i, rr.pivots[j]);
        }
    }
    return b;
}

// Some x with m x = rhs, or nullopt when inconsistent. Free variables are 0.
inline std::optional<std::vector<rational>> solve(const rat_matrix &m, std::span<const rational> rhs)
{
    if (rhs.size() != m.rows()) {
        throw_input("ShapeMismatch", "solve: rhs length " + std::to_string(rhs.size()) + " vs " + m.shape());
    }
    rat_matrix aug(m.rows(), m.cols() + 1);
    for (std::size_t i = 0; i < m.rows(); ++i) {
        for (std::size_t j = 0; j < m.cols(); ++j) {
            aug(i, j) = m(i, j);
        }
        aug(i, m.cols()) = rhs[i];
    }
    const auto rr = rref(std::move(aug));
    if (!rr.pivots.empty() && rr.pivots.back() == m.cols()) {
        return std::nullopt;
    }
    std::vector<rational> x(m.cols());
    for (std::size_t i = 0; i < rr.rank; ++i) {
        x[rr.pivots[i]] = rr.reduced(i, m.cols());
    }
    return x;
}

inline std::optional<rat_matrix> invert(const rat_matrix &m)
{
    if (m.rows() != m.cols()) {
        throw_input("ShapeMismatch", "invert: matrix " + m.shape() + " is not square");
    }
    const std::size_t n = m.rows();
    const auto rr = rref(hstack(m, rat_matrix::identity(n)));
    if (rr.rank < n || (n > 0 && rr.pivots[n - 1] != n - 1)) {
        return std::nullopt;
    }
    return rr.reduced.col_block(n, n);
}

} // namespace qpmut

#endif

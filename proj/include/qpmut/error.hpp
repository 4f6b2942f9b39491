#ifndef QPMUT_ERROR_HPP
#define QPMUT_ERROR_HPP

#include <stdexcept>
#include <string>
#include <utility>

namespace qpmut
{

// Coarse classification used for CLI exit codes and HTTP status mapping.
enum class error_kind {
    input,        // malformed data, unknown ids, shape mismatches
    precondition, // mathematically invalid request (loop, 2-cycle at k, ...)
    invariant     // a checked invariant failed
};

class error : public std::runtime_error
{
public:
    error(std::string code, error_kind kind, const std::string &detail)
        : std::runtime_error(detail), m_code(std::move(code)), m_kind(kind)
    {
    }

    const std::string &code() const noexcept
    {
        return m_code;
    }
    error_kind kind() const noexcept
    {
        return m_kind;
    }

private:
    std::string m_code;
    error_kind m_kind;
};

[[noreturn]] inline void throw_input(const std::string &code, const std::string &detail)
{
    throw error(code, error_kind::input, detail);
}

[[noreturn]] inline void throw_precondition(const std::string &code, const std::string &detail)
{
    throw error(code, error_kind::precondition, detail);
}

[[noreturn]] inline void throw_invariant(const std::string &code, const std::string &detail)
{
    throw error(code, error_kind::invariant, detail);
}

} // namespace qpmut

#endif

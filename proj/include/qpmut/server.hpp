#ifndef QPMUT_SERVER_HPP
#define QPMUT_SERVER_HPP

#include <string>

#include <httplib.h>
#include <json.hpp>

#include <qpmut/error.hpp>
#include <qpmut/json_io.hpp>
#include <qpmut/session.hpp>

namespace qpmut
{

namespace detail
{

inline void reply(httplib::Response &res, int status, const nlohmann::json &body)
{
    res.status = status;
    res.set_content(body.dump(), "application/json");
}

inline int status_for(const error &e)
{
    if (e.code() == "UnknownSession" || e.code() == "UnknownNode") {
        return 404;
    }
    switch (e.kind()) {
        case error_kind::input:
            return 400;
        case error_kind::precondition:
            return 409;
        case error_kind::invariant:
            return 500;
    }
    return 500;
}

template <typename F>
void guarded(httplib::Response &res, F &&f)
{
    try {
        f();
    } catch (const error &e) {
        reply(res, status_for(e), io::error_json(e));
    } catch (const nlohmann::json::exception &e) {
        reply(res, 400, {{"error", "ParseError"}, {"detail", e.what()}});
    }
}

inline nlohmann::json parse_body(const httplib::Request &req)
{
    try {
        return nlohmann::json::parse(req.body);
    } catch (const nlohmann::json::exception &e) {
        throw_input("ParseError", std::string("request body: ") + e.what());
    }
}

inline std::shared_ptr<session> lookup(session_store &store, const httplib::Request &req)
{
    const auto &id = req.path_params.at("id");
    auto s = store.find(id);
    if (!s) {
        throw_input("UnknownSession", "no session '" + id + "'");
    }
    return s;
}

} // namespace detail

// Routes:
//   POST /sessions                {"qp": QP, "order"?: N} or a bare QP -> 201 {"id"}
//   GET  /sessions/:id            -> state
//   POST /sessions/:id/mutate     {"vertex": v} -> state, 409 on a precondition error
//   POST /sessions/:id/checkout   {"node": n} -> state
// An empty POST /sessions body starts from `initial` when one is given.
inline void install_routes(httplib::Server &srv, session_store &store, std::optional<qp> initial = std::nullopt)
{
    srv.Post("/sessions", [&store, initial](const httplib::Request &req, httplib::Response &res) {
        detail::guarded(res, [&] {
            qp x;
            if (req.body.empty()) {
                if (!initial) {
                    throw_input("ParseError", "empty body and no initial QP configured");
                }
                x = *initial;
            } else {
                const auto body = detail::parse_body(req);
                const int order = body.contains("order") ? io::field<int>(body, "order") : -1;
                x = io::qp_from_json(body.contains("qp") ? body.at("qp") : body, order);
            }
            detail::reply(res, 201, {{"id", store.create(std::move(x))}});
        });
    });
    srv.Get("/sessions/:id", [&store](const httplib::Request &req, httplib::Response &res) {
        detail::guarded(res, [&] { detail::reply(res, 200, detail::lookup(store, req)->state()); });
    });
    srv.Post("/sessions/:id/mutate", [&store](const httplib::Request &req, httplib::Response &res) {
        detail::guarded(res, [&] {
            auto s = detail::lookup(store, req);
            const auto body = detail::parse_body(req);
            detail::reply(res, 200, s->mutate(io::field<std::string>(body, "vertex")));
        });
    });
    srv.Post("/sessions/:id/checkout", [&store](const httplib::Request &req, httplib::Response &res) {
        detail::guarded(res, [&] {
            auto s = detail::lookup(store, req);
            const auto body = detail::parse_body(req);
            detail::reply(res, 200, s->checkout(io::field<std::string>(body, "node")));
        });
    });
}

} // namespace qpmut

#endif

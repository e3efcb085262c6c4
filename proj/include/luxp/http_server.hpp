#pragma once

#include "luxp/study.hpp"

#include <filesystem>
#include <memory>
#include <string>

namespace httplib {
class Server;
}

namespace luxp {

/// JSON API over a StudyService:
///   POST /api/session                  {study_id, observer_id} -> {token, n_trials}
///   GET  /api/session/{token}          -> {cursor, n_trials, complete}
///   GET  /api/session/{token}/trial/{i}
///   POST /api/session/{token}/choice   {index, side, elapsed_ms} -> {next, complete}
///   GET  /api/study/{id}/export        operator token required, JSON Lines
///   GET  /stimuli/{token}/{i}/{left|right|reference}
/// The operator token is accepted as `Authorization: Bearer <token>`.
class StudyHttpServer {
public:
    StudyHttpServer(StudyService& service, std::string operator_token,
                    std::filesystem::path static_dir = {});
    ~StudyHttpServer();

    /// Binds and returns the port (a free one when `port` is 0).
    int bind(const std::string& host, int port);
    /// Blocks until stop() is called.
    bool listen();
    void stop();
    void wait_until_ready() const;

private:
    void install_routes();

    StudyService& service_;
    std::string operator_token_;
    std::unique_ptr<httplib::Server> server_;
};

} // namespace luxp

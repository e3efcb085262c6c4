#include "luxp/http_server.hpp"

#include "luxp/records.hpp"

#include <httplib.h>
#include <json.hpp>

#include <charconv>
#include <fstream>
#include <sstream>

namespace luxp {

namespace {

// Runs over the whole presented string so timing does not reveal a prefix match.
bool same_secret(const std::string& presented, const std::string& expected) {
    unsigned char diff = presented.size() == expected.size() ? 0 : 1;
    for (std::size_t i = 0; i < presented.size(); ++i)
        diff |= static_cast<unsigned char>(presented[i] ^ expected[i % expected.size()]);
    return diff == 0;
}

using nlohmann::json;

void send_json(httplib::Response& res, int status, const json& body) {
    res.status = status;
    res.set_content(body.dump(), "application/json; charset=utf-8");
}

void send_error(httplib::Response& res, int status, const std::string& message) {
    send_json(res, status, {{"error", message}});
}

std::size_t parse_index(const std::string& text) {
    std::size_t v = 0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc{} || ptr != text.data() + text.size()) throw StudyError(400, "invalid trial index");
    return v;
}

json parse_body(const httplib::Request& req) {
    try {
        json body = json::parse(req.body);
        if (!body.is_object()) throw StudyError(400, "request body must be a JSON object");
        return body;
    } catch (const json::exception&) {
        throw StudyError(400, "request body is not valid JSON");
    }
}

template <class T>
T field(const json& body, const char* name) {
    if (!body.contains(name)) throw StudyError(400, std::string("missing field '") + name + "'");
    try {
        return body.at(name).get<T>();
    } catch (const json::exception&) {
        throw StudyError(400, std::string("field '") + name + "' has the wrong type");
    }
}

std::string content_type(const std::filesystem::path& p) {
    const auto ext = p.extension().string();
    if (ext == ".png") return "image/png";
    if (ext == ".jpg" || ext == ".jpeg") return "image/jpeg";
    return "application/octet-stream";
}

// Runs a handler and maps service errors onto status codes.
template <class F>
httplib::Server::Handler guarded(F f) {
    return [f](const httplib::Request& req, httplib::Response& res) {
        try {
            f(req, res);
        } catch (const StudyError& e) {
            send_error(res, e.status(), e.what());
        } catch (const ValidationError& e) {
            send_error(res, 400, e.what());
        } catch (const std::exception& e) {
            send_error(res, 500, e.what());
        }
    };
}

} // namespace

StudyHttpServer::StudyHttpServer(StudyService& service, std::string operator_token,
                                 std::filesystem::path static_dir)
    : service_(service), operator_token_(std::move(operator_token)), server_(std::make_unique<httplib::Server>()) {
    if (operator_token_.empty()) fail_validation("an operator token is required");
    install_routes();
    if (!static_dir.empty() && !server_->set_mount_point("/", static_dir.string()))
        fail_io("cannot serve static files from " + static_dir.string());
}

StudyHttpServer::~StudyHttpServer() { stop(); }

void StudyHttpServer::install_routes() {
    auto& s = *server_;

    s.Post("/api/session", guarded([this](const httplib::Request& req, httplib::Response& res) {
        const json body = parse_body(req);
        const bool screening = body.contains("screening_passed") ? field<bool>(body, "screening_passed") : false;
        const auto info = service_.create_session(field<std::string>(body, "study_id"),
                                                  field<std::string>(body, "observer_id"), screening);
        send_json(res, 201, {{"token", info.token}, {"n_trials", info.n_trials}});
    }));

    s.Get("/api/session/:token", guarded([this](const httplib::Request& req, httplib::Response& res) {
        const auto st = service_.status(req.path_params.at("token"));
        send_json(res, 200, {{"cursor", st.cursor}, {"n_trials", st.n_trials}, {"complete", st.complete}});
    }));

    s.Get("/api/session/:token/trial/:index", guarded([this](const httplib::Request& req, httplib::Response& res) {
        const auto v = service_.get_trial(req.path_params.at("token"), parse_index(req.path_params.at("index")));
        json images = {{"left", v.left_url}, {"right", v.right_url}};
        if (v.reference_url) images["reference"] = *v.reference_url;
        send_json(res, 200,
                  {{"index", v.index}, {"n_trials", v.n_trials}, {"layout", to_string(v.layout)}, {"images", images}});
    }));

    s.Post("/api/session/:token/choice", guarded([this](const httplib::Request& req, httplib::Response& res) {
        const json body = parse_body(req);
        const auto side_text = field<std::string>(body, "side");
        if (side_text != "left" && side_text != "right") throw StudyError(400, "side must be 'left' or 'right'");
        const double elapsed = body.contains("elapsed_ms") ? field<double>(body, "elapsed_ms") : 0.0;
        const auto ack = service_.post_choice(req.path_params.at("token"), field<std::size_t>(body, "index"),
                                              side_text == "left" ? Side::Left : Side::Right, elapsed);
        send_json(res, 200, {{"next", ack.next}, {"complete", ack.complete}});
    }));

    s.Get("/api/study/:id/export", guarded([this](const httplib::Request& req, httplib::Response& res) {
        if (!same_secret(req.get_header_value("Authorization"), "Bearer " + operator_token_))
            throw StudyError(403, "operator token required");
        const bool all = req.get_param_value("include_incomplete") == "true";
        const auto result = service_.export_choices(req.path_params.at("id"), all);
        std::string body;
        for (const auto& r : result.records) body += to_jsonl_line(r) + "\n";
        res.status = 200;
        res.set_header("X-Incomplete-Sessions", std::to_string(result.incomplete_sessions));
        res.set_content(body, "application/x-ndjson; charset=utf-8");
    }));

    s.Get("/stimuli/:token/:index/:role", guarded([this](const httplib::Request& req, httplib::Response& res) {
        const auto path = service_.stimulus_file(req.path_params.at("token"), parse_index(req.path_params.at("index")),
                                                 req.path_params.at("role"));
        std::ifstream in(path, std::ios::binary);
        if (!in) throw StudyError(404, "image not available");
        std::ostringstream buffer;
        buffer << in.rdbuf();
        res.status = 200;
        res.set_header("Cache-Control", "no-store");
        res.set_content(buffer.str(), content_type(path));
    }));
}

int StudyHttpServer::bind(const std::string& host, int port) {
    const int bound = port == 0 ? server_->bind_to_any_port(host) : (server_->bind_to_port(host, port) ? port : -1);
    if (bound < 0) fail_io("cannot listen on " + host + ":" + std::to_string(port));
    return bound;
}

bool StudyHttpServer::listen() { return server_->listen_after_bind(); }

void StudyHttpServer::stop() {
    if (server_ && server_->is_running()) server_->stop();
}

void StudyHttpServer::wait_until_ready() const { server_->wait_until_ready(); }

} // namespace luxp

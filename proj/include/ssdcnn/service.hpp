#pragma once

#include <filesystem>
#include <memory>
#include <string>
#include <thread>

#include "httplib.h"
#include "json.hpp"
#include "ssdcnn/error.hpp"
#include "ssdcnn/recognize.hpp"

namespace ssdcnn {

/// HTTP front end over a shared read-only Recognizer.
///
///   POST /api/recognize    RecognizeRequest -> RecognizeResponse
///   POST /api/featuremaps  RecognizeRequest -> stroke maps + 512-vector
///   GET  /api/featuremaps  same, JSON in the body or in ?request=
///   GET  /api/model        variant, class count, alphabet size, hash
///   GET  /api/health       "ok"
class Service {
 public:
  explicit Service(std::shared_ptr<const Recognizer> recognizer, std::filesystem::path static_dir = {})
      : rec_(std::move(recognizer)) {
    routes();
    if (!static_dir.empty()) {
      if (!std::filesystem::is_directory(static_dir) || !server_.set_mount_point("/", static_dir.string())) {
        throw Error(ErrorCode::Io, "static directory '" + static_dir.string() + "' is not readable");
      }
    }
  }

  ~Service() { stop(); }
  Service(const Service&) = delete;
  Service& operator=(const Service&) = delete;

  /// Binds and returns the port; port 0 picks a free one.
  int bind(const std::string& host, int port) {
    const int bound = port == 0 ? server_.bind_to_any_port(host) : (server_.bind_to_port(host, port) ? port : -1);
    if (bound < 0) throw Error(ErrorCode::Io, "cannot bind " + host + ":" + std::to_string(port));
    return bound;
  }

  /// Serves on the calling thread until stop().
  void run() { server_.listen_after_bind(); }

  /// Serves on a background thread.
  void start() {
    thread_ = std::thread([this] { run(); });
    server_.wait_until_ready();
  }

  void stop() {
    server_.stop();
    if (thread_.joinable()) thread_.join();
  }

 private:
  static void send_json(httplib::Response& res, int status, const nlohmann::json& body) {
    res.status = status;
    res.set_content(body.dump(), "application/json");
  }

  template <class Fn>
  void with_ink(const httplib::Request& req, httplib::Response& res, Fn&& fn) const {
    // the server does not read GET bodies, so GET may carry the JSON in ?request=
    const std::string& body =
        req.body.empty() && req.has_param("request") ? req.get_param_value("request") : req.body;
    RecognizeRequest parsed;
    if (auto err = parse_request(body, parsed)) {
      send_json(res, err->status, err->to_json());
      return;
    }
    try {
      send_json(res, 200, fn(parsed));
    } catch (const Error& e) {
      send_json(res, 422, RequestError{422, "strokes", e.what()}.to_json());
    }
  }

  void routes() {
    server_.Get("/api/health", [](const httplib::Request&, httplib::Response& res) {
      res.set_content("ok", "text/plain");
    });
    server_.Get("/api/model", [this](const httplib::Request&, httplib::Response& res) {
      send_json(res, 200, rec_->model_json());
    });
    server_.Post("/api/recognize", [this](const httplib::Request& req, httplib::Response& res) {
      with_ink(req, res, [&](const RecognizeRequest& r) { return rec_->to_json(rec_->recognize(r.ink, r.k)); });
    });
    auto featuremaps = [this](const httplib::Request& req, httplib::Response& res) {
      with_ink(req, res, [&](const RecognizeRequest& r) { return rec_->featuremaps_json(r.ink); });
    };
    server_.Post("/api/featuremaps", featuremaps);
    server_.Get("/api/featuremaps", featuremaps);
    server_.set_exception_handler([](const httplib::Request&, httplib::Response& res, std::exception_ptr ep) {
      std::string what = "internal error";
      try {
        std::rethrow_exception(ep);
      } catch (const std::exception& e) {
        what = e.what();
      } catch (...) {
      }
      send_json(res, 500, {{"error", what}});
    });
  }

  std::shared_ptr<const Recognizer> rec_;
  httplib::Server server_;
  std::thread thread_;
};

}  // namespace ssdcnn

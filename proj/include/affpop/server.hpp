/**
 * @file server.hpp
 * @brief HTTP + WebSocket front end over SessionRegistry (Boost.Beast).
 *
 * Routes:
 *   GET  /health               {status, version, uptime_s, sessions}
 *   POST /session              {session_id, ws_url, seed}; optional body {seed, valence, arousal}
 *   WS   /session/{id}/stream  server pushes frame lines, client sends control messages
 */
#pragma once

#include <chrono>
#include <cstdlib>
#include <deque>
#include <memory>
#include <string>
#include <thread>
#include <vector>

#include <boost/asio.hpp>
#include <boost/beast/core.hpp>
#include <boost/beast/http.hpp>
#include <boost/beast/websocket.hpp>
#include <nlohmann/json.hpp>

#include "affpop/service.hpp"

namespace affpop::net {

namespace beast = boost::beast;
namespace http = beast::http;
namespace websocket = beast::websocket;
namespace asio = boost::asio;
using tcp = asio::ip::tcp;

struct ServerOptions {
  std::string address = "127.0.0.1";
  unsigned short port = 8080;
  double keepalive_seconds = 60.0;
  std::size_t queue_limit = 512;  // frames buffered per client before the stepper waits
  std::chrono::milliseconds tick{20};
  unsigned threads = 2;
};

/// "host:port", ":port" or "port". Throws InputError.
inline void apply_bind(ServerOptions& opts, const std::string& bind) {
  const auto colon = bind.rfind(':');
  std::string host = colon == std::string::npos ? "" : bind.substr(0, colon);
  std::string port = colon == std::string::npos ? bind : bind.substr(colon + 1);
  if (host.size() >= 2 && host.front() == '[' && host.back() == ']') host = host.substr(1, host.size() - 2);
  char* end = nullptr;
  const long p = std::strtol(port.c_str(), &end, 10);
  if (port.empty() || *end != '\0' || p < 0 || p > 65535) throw InputError("bad bind address '" + bind + "'");
  if (!host.empty()) opts.address = host;
  opts.port = static_cast<unsigned short>(p);
}

class Server;

class StreamConnection : public std::enable_shared_from_this<StreamConnection> {
 public:
  StreamConnection(tcp::socket&& socket, std::shared_ptr<Session> session, Server& server);

  void run(http::request<http::string_body> req) {
    ws_.set_option(websocket::stream_base::timeout::suggested(beast::role_type::server));
    ws_.async_accept(req, beast::bind_front_handler(&StreamConnection::on_accept, shared_from_this()));
  }

 private:
  void on_accept(beast::error_code ec) {
    if (ec) return fail();
    read();
    tick({});
  }

  void read() { ws_.async_read(buffer_, beast::bind_front_handler(&StreamConnection::on_read, shared_from_this())); }

  void on_read(beast::error_code ec, std::size_t);

  void tick(beast::error_code ec);

  void flush() {
    if (writing_ || queue_.empty() || closed_) return;
    writing_ = true;
    ws_.text(true);
    ws_.async_write(asio::buffer(queue_.front()),
                    beast::bind_front_handler(&StreamConnection::on_write, shared_from_this()));
  }

  void on_write(beast::error_code ec, std::size_t) {
    writing_ = false;
    if (ec) return fail();
    queue_.pop_front();
    flush();
  }

  void fail();

  websocket::stream<beast::tcp_stream> ws_;
  asio::steady_timer timer_;
  std::shared_ptr<Session> session_;
  Server& server_;
  beast::flat_buffer buffer_;
  std::deque<std::string> queue_;
  bool writing_ = false;
  bool closed_ = false;
};

class HttpConnection : public std::enable_shared_from_this<HttpConnection> {
 public:
  HttpConnection(tcp::socket&& socket, Server& server) : stream_(std::move(socket)), server_(server) {}

  void run() {
    asio::dispatch(stream_.get_executor(), beast::bind_front_handler(&HttpConnection::read, shared_from_this()));
  }

 private:
  void read() {
    req_ = {};
    stream_.expires_after(std::chrono::seconds(30));
    http::async_read(stream_, buffer_, req_, beast::bind_front_handler(&HttpConnection::on_read, shared_from_this()));
  }

  void on_read(beast::error_code ec, std::size_t);

  void send(http::response<http::string_body> res) {
    res_ = std::make_shared<http::response<http::string_body>>(std::move(res));
    http::async_write(stream_, *res_, beast::bind_front_handler(&HttpConnection::on_write, shared_from_this()));
  }

  void on_write(beast::error_code ec, std::size_t) {
    if (ec) return;
    if (!res_->keep_alive()) {
      stream_.socket().shutdown(tcp::socket::shutdown_send, ec);
      return;
    }
    res_.reset();
    read();
  }

  beast::tcp_stream stream_;
  Server& server_;
  beast::flat_buffer buffer_;
  http::request<http::string_body> req_;
  std::shared_ptr<http::response<http::string_body>> res_;
};

class Server {
 public:
  Server(std::shared_ptr<const EngineConfig> config, ServerOptions opts)
      : opts_(std::move(opts)), registry_(std::move(config), opts_.keepalive_seconds), acceptor_(ioc_),
        reaper_(ioc_), start_(std::chrono::steady_clock::now()) {}

  ~Server() { stop(); }
  Server(const Server&) = delete;
  Server& operator=(const Server&) = delete;

  /// Binds and starts serving on background threads. Port 0 picks a free port.
  void start() {
    const tcp::endpoint ep(asio::ip::make_address(opts_.address), opts_.port);
    acceptor_.open(ep.protocol());
    acceptor_.set_option(asio::socket_base::reuse_address(true));
    acceptor_.bind(ep);
    acceptor_.listen(asio::socket_base::max_listen_connections);
    accept();
    reap();
    for (unsigned i = 0; i < std::max(1u, opts_.threads); ++i) threads_.emplace_back([this] { ioc_.run(); });
  }

  void stop() {
    ioc_.stop();
    for (auto& t : threads_)
      if (t.joinable()) t.join();
    threads_.clear();
  }

  /// Blocks until stop() is called from another thread or a signal handler.
  void wait() {
    for (auto& t : threads_)
      if (t.joinable()) t.join();
  }

  unsigned short port() const { return acceptor_.local_endpoint().port(); }
  const ServerOptions& options() const noexcept { return opts_; }
  SessionRegistry& registry() noexcept { return registry_; }
  asio::io_context& io_context() noexcept { return ioc_; }

  /// Seconds since construction on the steady clock.
  double now() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

  http::response<http::string_body> handle(const http::request<http::string_body>& req) {
    const std::string target(req.target());
    const std::string path = target.substr(0, target.find('?'));
    if (req.method() == http::verb::options) return reply(req, http::status::no_content, nullptr);
    if (path == "/health") {
      if (req.method() != http::verb::get) return error(req, http::status::method_not_allowed, "use GET");
      return reply(req, http::status::ok,
                   {{"status", "ok"}, {"version", kVersion}, {"uptime_s", now()}, {"sessions", registry_.size()}});
    }
    if (path == "/session") {
      if (req.method() != http::verb::post) return error(req, http::status::method_not_allowed, "use POST");
      SessionOptions so;
      if (!req.body().empty()) {
        try {
          const auto j = nlohmann::json::parse(req.body());
          if (j.contains("seed")) so.seed = j.at("seed").get<std::uint64_t>();
          so.initial = EmotionPoint(j.value("valence", 0.5), j.value("arousal", 0.5));
        } catch (const nlohmann::json::exception& e) {
          return error(req, http::status::bad_request, std::string("bad session request: ") + e.what());
        }
      }
      auto s = registry_.create(so, now());
      std::string host(req[http::field::host]);
      if (host.empty()) host = opts_.address + ":" + std::to_string(port());
      return reply(req, http::status::ok,
                   {{"session_id", s->id()},
                    {"ws_url", "ws://" + host + "/session/" + s->id() + "/stream"},
                    {"seed", s->seed()}});
    }
    if (session_id(path)) return error(req, http::status::upgrade_required, "connect with a WebSocket");
    return error(req, http::status::not_found, "no route for " + path);
  }

  /// Session id from "/session/{id}/stream", if the path has that shape.
  static std::optional<std::string> session_id(const std::string& path) {
    static const std::string head = "/session/", tail = "/stream";
    if (path.size() <= head.size() + tail.size() || path.rfind(head, 0) != 0 ||
        path.compare(path.size() - tail.size(), tail.size(), tail) != 0)
      return std::nullopt;
    auto id = path.substr(head.size(), path.size() - head.size() - tail.size());
    if (id.find('/') != std::string::npos) return std::nullopt;
    return id;
  }

  http::response<http::string_body> error(const http::request<http::string_body>& req, http::status status,
                                          const std::string& message) {
    return reply(req, status, {{"error", message}});
  }

 private:
  http::response<http::string_body> reply(const http::request<http::string_body>& req, http::status status,
                                          const nlohmann::json& body) {
    http::response<http::string_body> res{status, req.version()};
    res.set(http::field::server, std::string("affpop/") + kVersion);
    res.set(http::field::access_control_allow_origin, "*");
    res.set(http::field::access_control_allow_methods, "GET, POST, OPTIONS");
    res.set(http::field::access_control_allow_headers, "Content-Type");
    if (!body.is_null()) {
      res.set(http::field::content_type, "application/json");
      res.body() = body.dump();
    }
    res.keep_alive(req.keep_alive());
    res.prepare_payload();
    return res;
  }

  void accept() {
    acceptor_.async_accept(asio::make_strand(ioc_), [this](beast::error_code ec, tcp::socket socket) {
      if (!ec) std::make_shared<HttpConnection>(std::move(socket), *this)->run();
      if (acceptor_.is_open()) accept();
    });
  }

  void reap() {
    reaper_.expires_after(std::chrono::seconds(1));
    reaper_.async_wait([this](beast::error_code ec) {
      if (ec) return;
      registry_.reap(now());
      reap();
    });
  }

  asio::io_context ioc_;
  ServerOptions opts_;
  SessionRegistry registry_;
  tcp::acceptor acceptor_;
  asio::steady_timer reaper_;
  std::chrono::steady_clock::time_point start_;
  std::vector<std::thread> threads_;
};

inline StreamConnection::StreamConnection(tcp::socket&& socket, std::shared_ptr<Session> session, Server& server)
    : ws_(std::move(socket)), timer_(ws_.get_executor()), session_(std::move(session)), server_(server) {}

inline void StreamConnection::tick(beast::error_code ec) {
  if (ec || closed_) return;
  if (queue_.size() < server_.options().queue_limit)
    for (auto& line : session_->pump(server_.now())) queue_.push_back(std::move(line));
  flush();
  timer_.expires_after(server_.options().tick);
  timer_.async_wait(beast::bind_front_handler(&StreamConnection::tick, shared_from_this()));
}

inline void StreamConnection::on_read(beast::error_code ec, std::size_t) {
  if (ec) return fail();
  const std::string text = beast::buffers_to_string(buffer_.data());
  buffer_.consume(buffer_.size());
  for (auto& line : session_->handle(text, server_.now())) queue_.push_back(std::move(line));
  flush();
  read();
}

inline void StreamConnection::fail() {
  if (closed_) return;
  closed_ = true;
  session_->detach(server_.now());
  timer_.cancel();
}

inline void HttpConnection::on_read(beast::error_code ec, std::size_t) {
  if (ec == http::error::end_of_stream) {
    stream_.socket().shutdown(tcp::socket::shutdown_send, ec);
    return;
  }
  if (ec) return;
  if (websocket::is_upgrade(req_)) {
    const std::string target(req_.target());
    const auto id = Server::session_id(target.substr(0, target.find('?')));
    if (!id) return send(server_.error(req_, http::status::not_found, "no route for " + target));
    auto session = server_.registry().find(*id);
    if (!session) return send(server_.error(req_, http::status::not_found, "unknown session " + *id));
    if (!session->attach(server_.now()))
      return send(server_.error(req_, http::status::conflict, "session already has a client"));
    stream_.expires_never();
    std::make_shared<StreamConnection>(stream_.release_socket(), std::move(session), server_)->run(std::move(req_));
    return;
  }
  send(server_.handle(req_));
}

}  // namespace affpop::net

// affpop-service: live steering server. Bind address from --bind or AFFPOP_BIND ("host:port").

#include <csignal>
#include <cstdlib>
#include <iostream>

#include <CLI11.hpp>

#include "affpop/affpop.hpp"
#include "affpop/server.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Live affective music service (HTTP + WebSocket)"};
  std::string config, bind;
  double keepalive = 60.0;
  unsigned threads = 2;
  if (const char* env = std::getenv("AFFPOP_BIND")) bind = env;
  app.add_option("--config", config, "Engine config JSON")->check(CLI::ExistingFile);
  app.add_option("--bind", bind, "host:port to listen on (default 127.0.0.1:8080)");
  app.add_option("--keepalive", keepalive, "Seconds a disconnected session survives");
  app.add_option("--threads", threads, "I/O threads");
  app.set_version_flag("--version", affpop::kVersion);
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }

  try {
    affpop::net::ServerOptions opts;
    opts.keepalive_seconds = keepalive;
    opts.threads = threads;
    if (!bind.empty()) affpop::net::apply_bind(opts, bind);
    auto cfg = std::make_shared<const affpop::EngineConfig>(config.empty() ? affpop::default_config()
                                                                            : affpop::load_config(config));
    affpop::net::Server server(cfg, opts);
    boost::asio::signal_set signals(server.io_context(), SIGINT, SIGTERM);
    signals.async_wait([&](const boost::system::error_code&, int) { server.io_context().stop(); });
    server.start();
    std::cerr << "affpop-service " << affpop::kVersion << " listening on " << opts.address << ':' << server.port()
              << '\n';
    server.wait();
  } catch (const affpop::IoError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 4;
  } catch (const boost::system::system_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  }
  return 0;
}

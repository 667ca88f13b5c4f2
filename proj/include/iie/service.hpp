#pragma once

// HTTP annotation service:
//   GET  /api/forms/{id}             public form view
//   POST /api/forms/{id}/responses   validate, assign annotator id, persist
//   GET  /api/responses?form={id}    JSONL export, operator token required
// Everything else is served from the static UI directory.

#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include "iie/forms.hpp"
#include "json.hpp"

namespace httplib {
class Server;
}

namespace iie {

struct ServiceConfig {
  std::filesystem::path responses_dir;  // one <form>.jsonl per form
  std::filesystem::path static_dir;     // empty: no UI
  std::string operator_token;           // empty: export disabled
  std::size_t max_body_bytes = 1 << 20;
};

struct ServiceReply {
  int status = 200;
  std::string content_type = "application/json";
  std::string body;
};

class AnnotationService {
 public:
  explicit AnnotationService(ServiceConfig config);
  ~AnnotationService();

  void add_bundle(AnnotationBundle bundle);
  // Loads every *.form.json under `dir`.
  std::size_t load_bundles(const std::filesystem::path& dir);

  // Handlers, callable without a socket.
  ServiceReply get_form(const std::string& form_id) const;
  ServiceReply post_response(const std::string& form_id, const std::string& body);
  ServiceReply export_responses(const std::string& form_id, const std::string& token) const;

  // Binds to `host` on `port` (0 picks a free one) and returns the port.
  int bind(const std::string& host, int port = 0);
  // Blocks until stop().
  void run();
  void stop();
  void wait_until_ready();

 private:
  std::filesystem::path response_file(const std::string& form_id) const;
  std::mutex& form_mutex(const std::string& form_id);
  void install_routes();

  ServiceConfig config_;
  std::map<std::string, AnnotationBundle> bundles_;
  std::mutex forms_mu_;
  std::map<std::string, std::unique_ptr<std::mutex>> form_mu_;
  std::unique_ptr<httplib::Server> server_;
};

// Opaque random token, hex encoded.
std::string random_token(std::size_t bytes = 12);

}  // namespace iie

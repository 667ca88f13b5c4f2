#include "iie/service.hpp"

#include <openssl/rand.h>

#include <fstream>
#include <sstream>

#include "httplib.h"
#include "iie/evaluation.hpp"

namespace iie {

using json = nlohmann::json;

std::string random_token(std::size_t bytes) {
  std::vector<unsigned char> buf(bytes);
  if (RAND_bytes(buf.data(), static_cast<int>(buf.size())) != 1) throw std::runtime_error("RAND_bytes failed");
  static const char* hex = "0123456789abcdef";
  std::string out;
  for (unsigned char c : buf) {
    out += hex[c >> 4];
    out += hex[c & 15];
  }
  return out;
}

namespace {

ServiceReply error_reply(int status, const std::string& message, const std::string& path = "") {
  json j{{"error", message}};
  if (!path.empty()) j["path"] = path;
  return {status, "application/json", j.dump()};
}

}  // namespace

AnnotationService::AnnotationService(ServiceConfig config) : config_(std::move(config)) {
  if (!config_.responses_dir.empty()) std::filesystem::create_directories(config_.responses_dir);
}

AnnotationService::~AnnotationService() = default;

void AnnotationService::add_bundle(AnnotationBundle bundle) {
  std::string id = bundle.form_id;
  bundles_[id] = std::move(bundle);
  form_mutex(id);
}

std::size_t AnnotationService::load_bundles(const std::filesystem::path& dir) {
  std::size_t n = 0;
  for (auto& entry : std::filesystem::directory_iterator(dir)) {
    auto name = entry.path().filename().string();
    if (!name.ends_with(".form.json")) continue;
    std::ifstream in(entry.path());
    add_bundle(annotation_bundle_from_json(json::parse(in)));
    ++n;
  }
  return n;
}

std::filesystem::path AnnotationService::response_file(const std::string& form_id) const {
  return config_.responses_dir / (form_id + ".jsonl");
}

std::mutex& AnnotationService::form_mutex(const std::string& form_id) {
  std::lock_guard lock(forms_mu_);
  auto& slot = form_mu_[form_id];
  if (!slot) slot = std::make_unique<std::mutex>();
  return *slot;
}

ServiceReply AnnotationService::get_form(const std::string& form_id) const {
  auto it = bundles_.find(form_id);
  if (it == bundles_.end()) return error_reply(404, "unknown form '" + form_id + "'");
  return {200, "application/json", public_view(it->second).dump()};
}

ServiceReply AnnotationService::post_response(const std::string& form_id, const std::string& body) {
  auto it = bundles_.find(form_id);
  if (it == bundles_.end()) return error_reply(404, "unknown form '" + form_id + "'");
  if (body.size() > config_.max_body_bytes) return error_reply(413, "response too large");
  const FormKey& key = it->second.key;

  json j;
  try {
    j = json::parse(body);
  } catch (const json::parse_error& e) {
    return error_reply(400, std::string("invalid JSON: ") + e.what());
  }
  if (!j.is_object()) return error_reply(400, "expected a JSON object", "$");
  if (j.contains("form_id") && j["form_id"] != form_id) return error_reply(400, "form_id does not match URL", "$.form_id");
  // Server-side fields; whatever the client sent is replaced.
  j["form_id"] = form_id;
  j["annotator_id"] = "anon-" + random_token(8);
  j["attention_outcomes"] = std::vector<bool>(kAttentionChecks, false);

  AnnotationResponse r;
  try {
    r = annotation_response_from_json(j);
    check_response_against_key(r, key);
  } catch (const SchemaError& e) {
    return error_reply(400, e.what(), e.path());
  }
  r.attention_outcomes = attention_outcomes(r, key);

  std::string record_id = "rec-" + random_token(10);
  json record = to_json(r);
  record["record_id"] = record_id;
  {
    std::lock_guard lock(form_mutex(form_id));
    std::ofstream out(response_file(form_id), std::ios::app);
    out << record.dump() << "\n";
    out.flush();
    if (!out) return error_reply(500, "could not persist response");
  }
  return {201, "application/json", json{{"record_id", record_id}, {"annotator_id", r.annotator_id}}.dump()};
}

ServiceReply AnnotationService::export_responses(const std::string& form_id, const std::string& token) const {
  if (config_.operator_token.empty()) return error_reply(403, "export disabled: no operator token configured");
  if (token != config_.operator_token) return error_reply(401, "operator token required");
  if (!bundles_.count(form_id)) return error_reply(404, "unknown form '" + form_id + "'");
  std::ifstream in(response_file(form_id));
  std::ostringstream ss;
  ss << in.rdbuf();
  return {200, "application/x-ndjson", ss.str()};
}

void AnnotationService::install_routes() {
  auto send = [](httplib::Response& res, const ServiceReply& r) {
    res.status = r.status;
    res.set_content(r.body, r.content_type);
  };
  server_->set_payload_max_length(config_.max_body_bytes);
  server_->Get(R"(/api/forms/([^/]+))", [this, send](const httplib::Request& req, httplib::Response& res) {
    send(res, get_form(req.matches[1]));
  });
  server_->Post(R"(/api/forms/([^/]+)/responses)", [this, send](const httplib::Request& req, httplib::Response& res) {
    send(res, post_response(req.matches[1], req.body));
  });
  server_->Get("/api/responses", [this, send](const httplib::Request& req, httplib::Response& res) {
    if (!req.has_param("form")) return send(res, error_reply(400, "missing form parameter"));
    std::string token = req.get_header_value("X-Operator-Token");
    auto auth = req.get_header_value("Authorization");
    if (token.empty() && auth.rfind("Bearer ", 0) == 0) token = auth.substr(7);
    send(res, export_responses(req.get_param_value("form"), token));
  });
  if (!config_.static_dir.empty()) server_->set_mount_point("/", config_.static_dir.string());
}

int AnnotationService::bind(const std::string& host, int port) {
  server_ = std::make_unique<httplib::Server>();
  install_routes();
  if (port == 0) return server_->bind_to_any_port(host);
  if (!server_->bind_to_port(host, port)) throw std::runtime_error("cannot bind " + host + ":" + std::to_string(port));
  return port;
}

void AnnotationService::run() {
  if (!server_) throw std::logic_error("bind() first");
  server_->listen_after_bind();
}

void AnnotationService::stop() {
  if (server_) server_->stop();
}

void AnnotationService::wait_until_ready() {
  if (server_) server_->wait_until_ready();
}

}  // namespace iie

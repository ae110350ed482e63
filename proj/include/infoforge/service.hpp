#pragma once

// HTTP/JSON service over the pipeline and the session store.
//
//   POST  /sessions                         create, 201 + session + bundle
//   GET   /sessions/{id}                    session
//   PATCH /sessions/{id}                    pivot, sketch, selections... -> bundle
//   GET   /sessions/{id}/recommendations    ?stage=layout|vg|connection|palette
//   POST  /sessions/{id}/assemble           image/svg+xml + X-Infoforge-Provenance
//   POST  /render                           {provenance} -> image/svg+xml
//   POST  /recommend/layouts|vgs|connections
//   GET   /assets/...                       corpus files
//
// Errors are {"error": {"code", "message"}} with 400, 404, 422 or 507.

#include <filesystem>
#include <string>

// Eigen before httplib: <resolv.h> defines a _res macro that clashes with
// Eigen's parameter names.
#include "infoforge/session.hpp"
#include "httplib.h"

namespace infoforge {

struct ServiceConfig {
  std::filesystem::path corpus = "assets/sample_pack";
  std::filesystem::path store = "infoforge-store";
  std::string host = "127.0.0.1";
  int port = 8080;

  /// INFOFORGE_CORPUS, INFOFORGE_STORE and INFOFORGE_ADDR (host:port) over
  /// the defaults. Throws Error(kInvalidArgument) for a bad address.
  static ServiceConfig from_env();
};

inline constexpr const char* kProvenanceHeader = "X-Infoforge-Provenance";

/// HTTP status for an error code.
int http_status(ErrorCode code);

class Service {
 public:
  /// Both must outlive the service.
  Service(const Corpus& corpus, SessionStore& store);

  /// Registers every route on `server`.
  void install(httplib::Server& server);

 private:
  const Corpus& corpus_;
  SessionStore& store_;
};

}  // namespace infoforge

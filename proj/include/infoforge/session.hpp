#pragma once

// Interactive sessions and their file-backed store. One JSON document per
// session under <root>/sessions/, uploaded pivot graphics under
// <root>/uploads/<ref>.svg. Writes go through a temporary file and a
// rename; writers to one session are serialized.

#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <string>

#include "infoforge/pipeline.hpp"

namespace infoforge {

/// 26-character Crockford base32 ULID. Strictly increasing within a process.
std::string new_ulid();

/// UTC, millisecond precision: 2024-05-01T12:00:00.000Z.
std::string utc_timestamp();

struct Session {
  std::string id;
  /// Source text as submitted; `input.content` is its parse.
  std::string markdown;
  DesignInput input;
  Selections selections;
  std::string created_at;
  std::string updated_at;
};

nlohmann::json to_json(const Session& s);
/// Throws Error(kInvalidArgument) on malformed documents.
Session session_from_json(const nlohmann::json& j);

class SessionStore {
 public:
  explicit SessionStore(std::filesystem::path root);

  /// Assigns id and timestamps, then persists. Throws Error(kStorageFull)
  /// when the write fails.
  Session create(Session session);
  /// Throws Error(kNotFound).
  Session load(const std::string& id) const;
  /// Load, mutate, stamp and save while holding the session's lock. A
  /// throwing mutation leaves the stored session untouched.
  Session update(const std::string& id, const std::function<void(Session&)>& mutate);

  /// Stores an uploaded pivot graphic and returns its reference.
  std::string put_upload(const std::string& svg);
  /// The stored upload the pivot refers to, if any.
  Uploads uploads_for(const std::optional<PivotPlacement>& pivot) const;

  const std::filesystem::path& root() const { return root_; }

 private:
  void save(const Session& session);
  std::filesystem::path path_of(const std::string& id) const;
  std::mutex& lock_for(const std::string& id);

  std::filesystem::path root_;
  std::mutex locks_mutex_;
  std::map<std::string, std::unique_ptr<std::mutex>> locks_;
};

}  // namespace infoforge

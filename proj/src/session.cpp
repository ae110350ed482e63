#include "infoforge/session.hpp"

#include <fmt/chrono.h>
#include <fmt/format.h>

#include <array>
#include <chrono>
#include <fstream>
#include <random>

namespace infoforge {

namespace {

namespace fs = std::filesystem;

constexpr std::string_view kCrockford = "0123456789ABCDEFGHJKMNPQRSTVWXYZ";
constexpr std::size_t kUlidLength = 26;

bool is_ulid(std::string_view id) {
  if (id.size() != kUlidLength) return false;
  for (char c : id) {
    if (kCrockford.find(c) == std::string_view::npos) return false;
  }
  return true;
}

nlohmann::json pivot_json(const std::optional<PivotPlacement>& p) {
  if (!p) return nullptr;
  nlohmann::json j{{"bbox", {p->bbox.x, p->bbox.y, p->bbox.w, p->bbox.h}}};
  j["graphic_ref"] = p->graphic_ref ? nlohmann::json(*p->graphic_ref) : nlohmann::json(nullptr);
  return j;
}

std::optional<PivotPlacement> pivot_from(const nlohmann::json& j) {
  if (j.is_null()) return std::nullopt;
  const auto b = j.at("bbox").get<std::vector<double>>();
  if (b.size() != 4) throw Error(ErrorCode::kInvalidArgument, "pivot bbox needs 4 numbers");
  PivotPlacement p{{b[0], b[1], b[2], b[3]}, std::nullopt};
  if (j.contains("graphic_ref") && !j["graphic_ref"].is_null()) {
    p.graphic_ref = j["graphic_ref"].get<std::string>();
  }
  return p;
}

}  // namespace

std::string new_ulid() {
  static std::mutex mutex;
  static std::mt19937_64 rng{std::random_device{}()};
  static std::uint64_t last_ms = 0;
  static std::array<std::uint8_t, 10> last_random{};

  const std::lock_guard lock(mutex);
  auto ms = static_cast<std::uint64_t>(std::chrono::duration_cast<std::chrono::milliseconds>(
                                           std::chrono::system_clock::now().time_since_epoch())
                                           .count());
  if (ms <= last_ms) {
    // Same millisecond (or a clock step back): bump the random part.
    ms = last_ms;
    for (int i = 9; i >= 0 && ++last_random[i] == 0; --i) {
    }
  } else {
    for (auto& b : last_random) b = static_cast<std::uint8_t>(rng());
    last_ms = ms;
  }

  // 48-bit time then 80 random bits, 5 bits per character.
  std::array<std::uint8_t, 16> bytes{};
  for (int i = 0; i < 6; ++i) bytes[i] = static_cast<std::uint8_t>(ms >> (8 * (5 - i)));
  std::copy(last_random.begin(), last_random.end(), bytes.begin() + 6);
  std::string out(kUlidLength, '0');
  for (std::size_t c = 0; c < kUlidLength; ++c) {
    // Character c covers bits [130 - 5(c+1), 130 - 5c) of a 130-bit
    // big-endian number whose top two bits are zero.
    int value = 0;
    for (int k = 0; k < 5; ++k) {
      const int bit = static_cast<int>(c) * 5 + k - 2;
      if (bit < 0) continue;
      value = (value << 1) | ((bytes[bit / 8] >> (7 - bit % 8)) & 1);
    }
    out[c] = kCrockford[value];
  }
  return out;
}

std::string utc_timestamp() {
  const auto now = std::chrono::time_point_cast<std::chrono::milliseconds>(
      std::chrono::system_clock::now());
  const auto ms = now.time_since_epoch().count() % 1000;
  return fmt::format("{:%Y-%m-%dT%H:%M:%S}.{:03d}Z",
                     std::chrono::time_point_cast<std::chrono::seconds>(now), ms);
}

nlohmann::json to_json(const Session& s) {
  nlohmann::json j{{"id", s.id},
                   {"markdown", s.markdown},
                   {"canvas", {{"width", s.input.canvas.width}, {"height", s.input.canvas.height}}},
                   {"pivot", pivot_json(s.input.pivot)},
                   {"selections", to_json(s.selections)},
                   {"background", s.input.background.hex()},
                   {"alpha", s.input.alpha},
                   {"seed", s.input.seed},
                   {"created_at", s.created_at},
                   {"updated_at", s.updated_at}};
  if (s.input.sketch) {
    j["sketch"] = nlohmann::json::array();
    for (const auto& p : *s.input.sketch) j["sketch"].push_back({p.x(), p.y()});
  } else {
    j["sketch"] = nullptr;
  }
  return j;
}

Session session_from_json(const nlohmann::json& j) {
  try {
    Session s;
    s.id = j.at("id").get<std::string>();
    s.markdown = j.at("markdown").get<std::string>();
    s.input.content = parse_markdown(s.markdown);
    s.input.canvas = {j.at("canvas").at("width").get<int>(), j.at("canvas").at("height").get<int>()};
    s.input.pivot = pivot_from(j.at("pivot"));
    if (!j.at("sketch").is_null()) {
      PointList sketch;
      for (const auto& p : j["sketch"]) sketch.emplace_back(p.at(0).get<double>(), p.at(1).get<double>());
      s.input.sketch = std::move(sketch);
    }
    s.selections = selections_from_json(j.at("selections"));
    s.input.background = Color::from_hex(j.at("background").get<std::string>());
    s.input.alpha = j.at("alpha").get<double>();
    s.input.seed = j.at("seed").get<std::uint64_t>();
    s.created_at = j.at("created_at").get<std::string>();
    s.updated_at = j.at("updated_at").get<std::string>();
    return s;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kInvalidArgument, fmt::format("malformed session: {}", e.what()));
  }
}

SessionStore::SessionStore(fs::path root) : root_(std::move(root)) {
  std::error_code ec;
  fs::create_directories(root_ / "sessions", ec);
  fs::create_directories(root_ / "uploads", ec);
  if (ec) {
    throw Error(ErrorCode::kStorageFull,
                fmt::format("cannot create store at {}: {}", root_.string(), ec.message()));
  }
}

fs::path SessionStore::path_of(const std::string& id) const {
  return root_ / "sessions" / (id + ".json");
}

std::mutex& SessionStore::lock_for(const std::string& id) {
  const std::lock_guard lock(locks_mutex_);
  auto& m = locks_[id];
  if (!m) m = std::make_unique<std::mutex>();
  return *m;
}

void SessionStore::save(const Session& session) {
  write_file_atomic(path_of(session.id), to_json(session).dump(2) + "\n");
}

Session SessionStore::create(Session session) {
  session.id = new_ulid();
  session.created_at = utc_timestamp();
  session.updated_at = session.created_at;
  const std::lock_guard lock(lock_for(session.id));
  save(session);
  return session;
}

Session SessionStore::load(const std::string& id) const {
  if (!is_ulid(id)) throw Error(ErrorCode::kNotFound, fmt::format("no session '{}'", id));
  std::ifstream in(path_of(id), std::ios::binary);
  if (!in) throw Error(ErrorCode::kNotFound, fmt::format("no session '{}'", id));
  try {
    return session_from_json(nlohmann::json::parse(in));
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kInvalidArgument, fmt::format("session '{}' is corrupt: {}", id, e.what()));
  }
}

Session SessionStore::update(const std::string& id, const std::function<void(Session&)>& mutate) {
  if (!is_ulid(id)) throw Error(ErrorCode::kNotFound, fmt::format("no session '{}'", id));
  const std::lock_guard lock(lock_for(id));
  Session s = load(id);
  mutate(s);
  s.id = id;
  // Timestamps never go backwards, even if the clock does.
  s.updated_at = std::max(utc_timestamp(), s.updated_at);
  save(s);
  return s;
}

std::string SessionStore::put_upload(const std::string& svg) {
  std::string error;
  if (!is_well_formed_xml(svg, &error)) {
    throw Error(ErrorCode::kInvalidArgument, fmt::format("pivot graphic is not SVG: {}", error));
  }
  const std::string ref = upload_ref(svg);
  const fs::path path = root_ / "uploads" / (ref + ".svg");
  const std::lock_guard lock(lock_for(ref));
  if (!fs::exists(path)) write_file_atomic(path, svg);
  return ref;
}

Uploads SessionStore::uploads_for(const std::optional<PivotPlacement>& pivot) const {
  Uploads out;
  if (!pivot || !pivot->graphic_ref) return out;
  const std::string& ref = *pivot->graphic_ref;
  if (ref.rfind("upload-", 0) != 0 || ref.find_first_of("/\\.") != std::string::npos) return out;
  std::ifstream in(root_ / "uploads" / (ref + ".svg"), std::ios::binary);
  if (in) {
    out[ref] = std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
  }
  return out;
}

}  // namespace infoforge

#pragma once

// Markdown content input: one list item per visual group.
//
//   # Infographic title
//   - title: Day 1
//     text: Arrive at the lodge
//     label: 08:00
//     image: photos/lodge.png
//   - A bare first line is the title
//     text: continuation lines are indented
//
// Keys are title, text, label and image. Unknown keys are errors.

#include <cstddef>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace infoforge {

inline constexpr std::size_t kMaxItems = 32;
inline constexpr std::size_t kMaxShortField = 120;
inline constexpr std::size_t kMaxTextField = 2000;

struct VgContent {
  std::optional<std::string> title;
  std::optional<std::string> text;
  std::optional<std::string> label;
  std::optional<std::string> image_ref;

  bool empty() const { return !title && !text && !label && !image_ref; }
  friend bool operator==(const VgContent&, const VgContent&) = default;
};

struct ContentSpec {
  std::optional<std::string> infographic_title;
  std::vector<VgContent> items;

  friend bool operator==(const ContentSpec&, const ContentSpec&) = default;
};

/// Which placeholder slots a VG needs (or, for a design, offers).
struct ComponentSignature {
  bool has_title = false;
  bool has_text = false;
  bool has_label = false;
  bool has_image = false;

  bool any() const { return has_title || has_text || has_label || has_image; }

  /// True when every slot `required` asks for is present here.
  bool covers(const ComponentSignature& required) const {
    return (!required.has_title || has_title) && (!required.has_text || has_text) &&
           (!required.has_label || has_label) && (!required.has_image || has_image);
  }

  ComponentSignature operator|(const ComponentSignature& o) const {
    return {has_title || o.has_title, has_text || o.has_text, has_label || o.has_label,
            has_image || o.has_image};
  }

  friend bool operator==(const ComponentSignature&, const ComponentSignature&) = default;
};

ComponentSignature signature_of(const VgContent& item);

/// Union of all item signatures; one design serves the whole infographic.
ComponentSignature union_signature(const ContentSpec& spec);

/// Throws Error with kEmptySpec, kMalformedItem (message carries the line
/// number) or kOversizeField.
ContentSpec parse_markdown(std::string_view source);

/// Canonical markdown for a spec; parse_markdown(to_markdown(s)) == s.
std::string to_markdown(const ContentSpec& spec);

/// Length in Unicode code points of UTF-8 text.
std::size_t utf8_length(std::string_view s);

enum class Severity { kWarning, kError };

struct Issue {
  Severity severity = Severity::kError;
  /// -1 for spec-level issues.
  int item_index = -1;
  std::string code;
  std::string message;

  friend bool operator==(const Issue&, const Issue&) = default;
};

/// Returns true if an image reference can be resolved.
using AssetResolver = std::function<bool(std::string_view ref)>;

/// Resolves local paths against `base`; http(s) and data URLs always resolve.
AssetResolver file_resolver(std::filesystem::path base);

std::vector<Issue> validate_spec(const ContentSpec& spec, const AssetResolver& resolver);

}  // namespace infoforge

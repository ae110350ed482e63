#pragma once

// Minimal XML document model for SVG templates. Parsing is delegated to
// expat; serialization is compact (no added whitespace) and deterministic.

#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace infoforge {

struct XmlNode {
  /// Empty for text nodes.
  std::string name;
  std::vector<std::pair<std::string, std::string>> attributes;
  std::vector<XmlNode> children;
  /// Character data, only for text nodes.
  std::string text;

  bool is_text() const { return name.empty(); }
  const std::string* attr(std::string_view key) const;
  void set_attr(std::string_view key, std::string value);
  void remove_attr(std::string_view key);
};

/// Throws Error(kInvalidArgument) with expat's message and line on failure.
XmlNode parse_xml(std::string_view document);

bool is_well_formed_xml(std::string_view document, std::string* error = nullptr);

std::string serialize(const XmlNode& node);

std::string xml_escape(std::string_view text);

XmlNode* find_by_id(XmlNode& root, std::string_view id);
const XmlNode* find_by_id(const XmlNode& root, std::string_view id);

/// Removes every element with the given id; returns how many were removed.
int remove_by_id(XmlNode& root, std::string_view id);

/// All id attribute values in document order.
std::vector<std::string> collect_ids(const XmlNode& root);

/// Fixed three-decimal formatting with trailing zeros trimmed ("12.5",
/// "0", "-3.125"). Used for every coordinate written to SVG.
std::string num(double value);

}  // namespace infoforge

#include "infoforge/xml.hpp"

#include <expat.h>
#include <fmt/format.h>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <memory>

#include "infoforge/error.hpp"

namespace infoforge {
namespace {

struct Builder {
  XmlNode root;
  std::vector<XmlNode*> stack;
  bool has_root = false;
};

void on_start(void* data, const XML_Char* name, const XML_Char** attrs) {
  auto* b = static_cast<Builder*>(data);
  XmlNode node;
  node.name = name;
  for (int i = 0; attrs[i] != nullptr; i += 2) node.attributes.emplace_back(attrs[i], attrs[i + 1]);
  if (b->stack.empty()) {
    b->root = std::move(node);
    b->has_root = true;
    b->stack.push_back(&b->root);
  } else {
    auto& children = b->stack.back()->children;
    children.push_back(std::move(node));
    b->stack.push_back(&children.back());
  }
}

void on_end(void* data, const XML_Char*) { static_cast<Builder*>(data)->stack.pop_back(); }

void on_text(void* data, const XML_Char* s, int len) {
  auto* b = static_cast<Builder*>(data);
  if (b->stack.empty()) return;
  auto& children = b->stack.back()->children;
  if (!children.empty() && children.back().is_text()) {
    children.back().text.append(s, len);
  } else {
    XmlNode t;
    t.text.assign(s, len);
    children.push_back(std::move(t));
  }
}

bool blank(const std::string& s) {
  return std::all_of(s.begin(), s.end(), [](unsigned char c) { return std::isspace(c); });
}

// Drops whitespace-only text between elements.
void prune(XmlNode& node) {
  std::erase_if(node.children, [](const XmlNode& c) { return c.is_text() && blank(c.text); });
  for (auto& c : node.children) prune(c);
}

void write(const XmlNode& node, std::string& out) {
  if (node.is_text()) {
    out += xml_escape(node.text);
    return;
  }
  out += '<';
  out += node.name;
  for (const auto& [k, v] : node.attributes) {
    out += ' ';
    out += k;
    out += "=\"";
    out += xml_escape(v);
    out += '"';
  }
  if (node.children.empty()) {
    out += "/>";
    return;
  }
  out += '>';
  for (const auto& c : node.children) write(c, out);
  out += "</";
  out += node.name;
  out += '>';
}

struct ParserDeleter {
  void operator()(XML_Parser p) const { XML_ParserFree(p); }
};
using ParserPtr = std::unique_ptr<std::remove_pointer_t<XML_Parser>, ParserDeleter>;

}  // namespace

const std::string* XmlNode::attr(std::string_view key) const {
  for (const auto& [k, v] : attributes) {
    if (k == key) return &v;
  }
  return nullptr;
}

void XmlNode::set_attr(std::string_view key, std::string value) {
  for (auto& [k, v] : attributes) {
    if (k == key) {
      v = std::move(value);
      return;
    }
  }
  attributes.emplace_back(std::string(key), std::move(value));
}

void XmlNode::remove_attr(std::string_view key) {
  std::erase_if(attributes, [&](const auto& kv) { return kv.first == key; });
}

XmlNode parse_xml(std::string_view document) {
  Builder builder;
  ParserPtr parser(XML_ParserCreate("UTF-8"));
  XML_SetUserData(parser.get(), &builder);
  XML_SetElementHandler(parser.get(), on_start, on_end);
  XML_SetCharacterDataHandler(parser.get(), on_text);
  if (XML_Parse(parser.get(), document.data(), static_cast<int>(document.size()), 1) ==
      XML_STATUS_ERROR) {
    throw Error(ErrorCode::kInvalidArgument,
                fmt::format("xml error at line {}: {}",
                            XML_GetCurrentLineNumber(parser.get()),
                            XML_ErrorString(XML_GetErrorCode(parser.get()))));
  }
  prune(builder.root);
  return std::move(builder.root);
}

bool is_well_formed_xml(std::string_view document, std::string* error) {
  try {
    parse_xml(document);
    return true;
  } catch (const Error& e) {
    if (error != nullptr) *error = e.what();
    return false;
  }
}

std::string serialize(const XmlNode& node) {
  std::string out;
  write(node, out);
  return out;
}

std::string xml_escape(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  for (char c : text) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

XmlNode* find_by_id(XmlNode& root, std::string_view id) {
  if (const auto* v = root.attr("id"); v != nullptr && *v == id) return &root;
  for (auto& c : root.children) {
    if (auto* hit = find_by_id(c, id)) return hit;
  }
  return nullptr;
}

const XmlNode* find_by_id(const XmlNode& root, std::string_view id) {
  return find_by_id(const_cast<XmlNode&>(root), id);
}

int remove_by_id(XmlNode& root, std::string_view id) {
  int removed = 0;
  for (auto& c : root.children) removed += remove_by_id(c, id);
  removed += static_cast<int>(std::erase_if(root.children, [&](const XmlNode& c) {
    const auto* v = c.attr("id");
    return v != nullptr && *v == id;
  }));
  return removed;
}

std::vector<std::string> collect_ids(const XmlNode& root) {
  std::vector<std::string> ids;
  auto walk = [&](const XmlNode& n, auto&& self) -> void {
    if (const auto* v = n.attr("id")) ids.push_back(*v);
    for (const auto& c : n.children) self(c, self);
  };
  walk(root, walk);
  return ids;
}

std::string num(double value) {
  if (!std::isfinite(value)) return "0";
  std::string s = fmt::format("{:.3f}", value);
  while (s.back() == '0') s.pop_back();
  if (s.back() == '.') s.pop_back();
  if (s == "-0") s = "0";
  return s;
}

}  // namespace infoforge

#include "evicheck/retrieval/text.hpp"

#include <cctype>
#include <cstdio>
#include <sstream>

namespace evicheck::retrieval {
namespace {

bool starts_with_at(std::string_view s, std::size_t i, std::string_view prefix) {
  return s.substr(i, prefix.size()) == prefix;
}

std::string trim(std::string_view s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

bool is_heading(std::string_view line) {
  const std::string t = trim(line);
  return t.size() >= 4 && t.front() == '=' && t.back() == '=';
}

}  // namespace

std::string strip_markup(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  std::size_t i = 0;
  int template_depth = 0;
  while (i < text.size()) {
    if (starts_with_at(text, i, "{{")) {
      ++template_depth;
      i += 2;
      continue;
    }
    if (template_depth > 0) {
      if (starts_with_at(text, i, "}}")) {
        --template_depth;
        i += 2;
      } else {
        ++i;
      }
      continue;
    }
    if (starts_with_at(text, i, "<ref")) {
      const std::size_t self_close = text.find("/>", i);
      const std::size_t open_end = text.find('>', i);
      if (open_end != std::string_view::npos && self_close != std::string_view::npos &&
          self_close + 1 == open_end) {
        i = open_end + 1;
        continue;
      }
      const std::size_t close = text.find("</ref>", i);
      i = close == std::string_view::npos ? text.size() : close + 6;
      continue;
    }
    if (text[i] == '<') {
      const std::size_t close = text.find('>', i);
      if (close != std::string_view::npos) {
        i = close + 1;
        continue;
      }
    }
    if (starts_with_at(text, i, "[[")) {
      const std::size_t close = text.find("]]", i);
      if (close != std::string_view::npos) {
        std::string_view inner = text.substr(i + 2, close - i - 2);
        const std::size_t bar = inner.rfind('|');
        if (bar != std::string_view::npos) inner = inner.substr(bar + 1);
        out.append(inner);
        i = close + 2;
        continue;
      }
    }
    if (starts_with_at(text, i, "''")) {
      while (i < text.size() && text[i] == '\'') ++i;
      continue;
    }
    out.push_back(text[i]);
    ++i;
  }

  std::istringstream lines(out);
  std::string line, result;
  while (std::getline(lines, line)) {
    if (is_heading(line)) line.clear();
    result += line;
    result.push_back('\n');
  }
  return result;
}

std::vector<std::string> segment_sentences(std::string_view text) {
  std::vector<std::string> out;
  std::string current;
  auto flush = [&] {
    std::string s = trim(current);
    if (!s.empty()) out.push_back(std::move(s));
    current.clear();
  };
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (c == '\n') {
      flush();
      continue;
    }
    current.push_back(c);
    if (c != '.' && c != '!' && c != '?') continue;
    std::size_t j = i + 1;
    while (j < text.size() && (text[j] == '"' || text[j] == '\'' || text[j] == ')' || text[j] == ']')) {
      current.push_back(text[j]);
      ++j;
    }
    i = j - 1;
    if (j >= text.size()) continue;
    if (text[j] == '\n') continue;  // handled on the next iteration
    if (!std::isspace(static_cast<unsigned char>(text[j]))) continue;
    std::size_t k = j;
    while (k < text.size() && text[k] != '\n' && std::isspace(static_cast<unsigned char>(text[k]))) ++k;
    if (k < text.size() && (std::isupper(static_cast<unsigned char>(text[k])) ||
                            std::isdigit(static_cast<unsigned char>(text[k])))) {
      flush();
    }
  }
  flush();
  return out;
}

std::string url_encode(std::string_view s) {
  std::string out;
  for (unsigned char c : s) {
    if (std::isalnum(c) || c == '-' || c == '_' || c == '.' || c == '~') {
      out.push_back(static_cast<char>(c));
    } else {
      char buf[4];
      std::snprintf(buf, sizeof(buf), "%%%02X", c);
      out += buf;
    }
  }
  return out;
}

std::string url_decode(std::string_view s) {
  std::string out;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] == '%' && i + 2 < s.size() && std::isxdigit(static_cast<unsigned char>(s[i + 1])) &&
        std::isxdigit(static_cast<unsigned char>(s[i + 2]))) {
      out.push_back(static_cast<char>(std::stoi(std::string(s.substr(i + 1, 2)), nullptr, 16)));
      i += 2;
    } else {
      out.push_back(s[i]);
    }
  }
  return out;
}

}  // namespace evicheck::retrieval

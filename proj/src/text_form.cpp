#include "lskl/text_form.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <optional>

#include "lskl/error.hpp"

namespace lskl {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

[[noreturn]] void parse_error(const std::string& msg) { throw Error(ErrorCode::kParse, msg); }

double parse_number(std::string_view text) {
  const std::string s(trim(text));
  if (s.empty()) parse_error("empty number");
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (end != s.c_str() + s.size()) parse_error("malformed number '" + s + "'");
  if (!std::isfinite(v)) parse_error("non-finite number '" + s + "'");
  return v;
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  int depth = 0;
  std::size_t start = 0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] == '[' || s[i] == '(') ++depth;
    if (s[i] == ']' || s[i] == ')') --depth;
    if (s[i] == sep && depth == 0) {
      out.push_back(s.substr(start, i - start));
      start = i + 1;
    }
  }
  out.push_back(s.substr(start));
  return out;
}

std::optional<std::size_t> param_index(const FamilySpec& spec, std::string_view key) {
  for (std::size_t i = 0; i < spec.n_params; ++i) {
    if (spec.param_names[i] == key) return i;
  }
  return std::nullopt;
}

}  // namespace

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

std::string to_text(const ModelInstance& m) {
  const FamilySpec& spec = m.spec();
  std::string out(spec.name);
  out += '(';
  for (std::size_t i = 0; i < spec.n_params; ++i) {
    if (i) out += ',';
    out += spec.param_names[i];
    out += '=';
    out += format_number(m.param(i));
  }
  if (m.shift() != 0.0) {
    out += ",shift=";
    out += format_number(m.shift());
  }
  out += ')';
  return out;
}

Family parse_family(std::string_view text) {
  const auto f = family_from_name(trim(text));
  if (!f) parse_error("unknown family '" + std::string(trim(text)) + "'");
  return *f;
}

ModelInstance parse_model(std::string_view text) {
  const std::string_view t = trim(text);
  const auto open = t.find('(');
  if (open == std::string_view::npos || t.back() != ')') {
    parse_error("model must look like family(name=value,...): '" + std::string(t) + "'");
  }
  const Family family = parse_family(t.substr(0, open));
  const FamilySpec& spec = family_spec(family);
  const std::string_view body = t.substr(open + 1, t.size() - open - 2);

  std::vector<std::optional<double>> values(spec.n_params);
  double shift = 0.0;
  if (!trim(body).empty()) {
    for (std::string_view item : split(body, ',')) {
      const auto eq = item.find('=');
      if (eq == std::string_view::npos) parse_error("expected name=value in '" + std::string(trim(item)) + "'");
      const std::string_view key = trim(item.substr(0, eq));
      const double v = parse_number(item.substr(eq + 1));
      if (key == "shift" && spec.has_shift) {
        shift = v;
        continue;
      }
      const auto idx = param_index(spec, key);
      if (!idx) parse_error("unknown parameter '" + std::string(key) + "' for " + std::string(spec.name));
      if (values[*idx]) parse_error("duplicate parameter '" + std::string(key) + "'");
      values[*idx] = v;
    }
  }
  std::vector<double> params;
  for (std::size_t i = 0; i < spec.n_params; ++i) {
    if (!values[i]) {
      parse_error("missing parameter '" + std::string(spec.param_names[i]) + "' for " + std::string(spec.name));
    }
    params.push_back(*values[i]);
  }
  return ModelInstance(family, params, shift);
}

KeyValueList parse_key_values(std::string_view text) {
  KeyValueList out;
  for (std::string_view item : split(trim(text), ';')) {
    item = trim(item);
    if (item.empty()) continue;
    const auto eq = item.find('=');
    if (eq == std::string_view::npos) parse_error("expected key=value in '" + std::string(item) + "'");
    const std::string key(trim(item.substr(0, eq)));
    if (key.empty()) parse_error("empty key in '" + std::string(item) + "'");
    std::string_view rhs = trim(item.substr(eq + 1));
    std::vector<double> vals;
    if (!rhs.empty() && rhs.front() == '[') {
      if (rhs.back() != ']') parse_error("unterminated list in '" + std::string(item) + "'");
      rhs = trim(rhs.substr(1, rhs.size() - 2));
      if (rhs.empty()) parse_error("empty list for '" + key + "'");
      for (std::string_view v : split(rhs, ',')) vals.push_back(parse_number(v));
    } else {
      vals.push_back(parse_number(rhs));
    }
    for (const auto& [k, _] : out) {
      if (k == key) parse_error("duplicate key '" + key + "'");
    }
    out.emplace_back(key, std::move(vals));
  }
  return out;
}

std::vector<ModelInstance> parse_param_grid(Family family, std::string_view text) {
  const FamilySpec& spec = family_spec(family);
  const KeyValueList kv = parse_key_values(text);
  std::vector<std::vector<double>> axes(spec.n_params);
  std::vector<double> shifts{0.0};
  for (const auto& [key, vals] : kv) {
    if (key == "shift" && spec.has_shift) {
      shifts = vals;
      continue;
    }
    const auto idx = param_index(spec, key);
    if (!idx) parse_error("unknown parameter '" + key + "' for " + std::string(spec.name));
    axes[*idx] = vals;
  }
  for (std::size_t i = 0; i < spec.n_params; ++i) {
    if (axes[i].empty()) parse_error("grid is missing parameter '" + std::string(spec.param_names[i]) + "'");
  }
  std::vector<ModelInstance> out;
  std::vector<double> params(spec.n_params);
  for (double s : shifts) {
    if (spec.n_params == 1) {
      for (double v : axes[0]) {
        params[0] = v;
        out.emplace_back(family, params, s);
      }
    } else {
      for (double v0 : axes[0]) {
        for (double v1 : axes[1]) {
          params[0] = v0;
          params[1] = v1;
          out.emplace_back(family, params, s);
        }
      }
    }
  }
  return out;
}

}  // namespace lskl

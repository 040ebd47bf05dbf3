// Copyright 2026 The LASP Authors
// Licensed under the Apache License, Version 2.0

#include "lasp/space.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

namespace lasp {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

std::optional<long long> parse_integer(std::string_view s) {
  long long value = 0;
  const auto* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(s.data(), end, value);
  if (ec != std::errc{} || ptr != end || s.empty()) return std::nullopt;
  return value;
}

bool is_identifier(std::string_view s) {
  if (s.empty()) return false;
  return std::all_of(s.begin(), s.end(), [](char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '.' || c == '-';
  });
}

std::string context(std::size_t line, std::string_view text) {
  std::ostringstream out;
  out << "line " << line << ": '" << text << "'";
  return out.str();
}

// "lo-hi" with non-negative integer bounds, inclusive.
std::optional<std::vector<std::string>> expand_range(std::string_view item) {
  const auto dash = item.find('-', 1);
  if (dash == std::string_view::npos) return std::nullopt;
  const auto lo = parse_integer(trim(item.substr(0, dash)));
  const auto hi = parse_integer(trim(item.substr(dash + 1)));
  if (!lo || !hi || *lo < 0) return std::nullopt;
  if (*hi < *lo) return std::vector<std::string>{};
  std::vector<std::string> values;
  for (long long v = *lo; v <= *hi; ++v) values.push_back(std::to_string(v));
  return values;
}

std::vector<std::string> split_values(std::string_view list) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (start <= list.size()) {
    auto comma = list.find(',', start);
    if (comma == std::string_view::npos) comma = list.size();
    out.emplace_back(trim(list.substr(start, comma - start)));
    start = comma + 1;
  }
  return out;
}

}  // namespace

SpaceError::SpaceError(const std::string& message, std::size_t line)
    : std::runtime_error(message), line_(line) {}

std::optional<std::size_t> ParameterDef::find_value(std::string_view token) const {
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (values[i] == token) return i;
  }
  return std::nullopt;
}

std::optional<double> ParameterDef::numeric(std::size_t value_index) const {
  if (value_index >= values.size()) return std::nullopt;
  const auto& token = values[value_index];
  double value = 0.0;
  const auto* end = token.data() + token.size();
  auto [ptr, ec] = std::from_chars(token.data(), end, value);
  if (ec != std::errc{} || ptr != end || token.empty()) return std::nullopt;
  return value;
}

// ---------------------------------------------------------------------------

ConfigRange::iterator::iterator(const ConfigSpace* space, std::size_t index) : space_(space) {
  current_.index = index;
  if (index < space->size()) current_ = space->config_at(index);
}

ConfigRange::iterator& ConfigRange::iterator::operator++() {
  const auto& params = space_->parameters();
  ++current_.index;
  for (std::size_t p = params.size(); p-- > 0;) {
    if (++current_.assignment[p] < params[p].arity()) return *this;
    current_.assignment[p] = 0;
  }
  return *this;
}

ConfigRange::iterator ConfigRange::begin() const { return iterator(space_, 0); }
ConfigRange::iterator ConfigRange::end() const { return iterator(space_, space_->size()); }

// ---------------------------------------------------------------------------

ConfigSpace::ConfigSpace(std::vector<ParameterDef> parameters,
                         std::vector<std::size_t> default_assignment)
    : parameters_(std::move(parameters)) {
  if (parameters_.empty()) throw SpaceError("space has no parameters");
  std::set<std::string> names;
  for (const auto& p : parameters_) {
    if (!names.insert(p.name).second) throw SpaceError("duplicate parameter '" + p.name + "'");
    if (p.values.empty()) throw SpaceError("parameter '" + p.name + "' has an empty value list");
    std::set<std::string> seen(p.values.begin(), p.values.end());
    if (seen.size() != p.values.size())
      throw SpaceError("parameter '" + p.name + "' has duplicate values");
  }

  strides_.assign(parameters_.size(), 1);
  size_ = 1;
  for (std::size_t p = parameters_.size(); p-- > 0;) {
    strides_[p] = size_;
    if (size_ > std::numeric_limits<std::size_t>::max() / parameters_[p].arity())
      throw SpaceError("space size overflows");
    size_ *= parameters_[p].arity();
  }

  if (default_assignment.size() != parameters_.size())
    throw SpaceError("default assignment must cover every parameter");
  default_.index = index_of(default_assignment);
  default_.assignment = std::move(default_assignment);
}

Configuration ConfigSpace::config_at(std::size_t index) const {
  if (index >= size_) {
    throw std::out_of_range("configuration index " + std::to_string(index) +
                            " out of range [0, " + std::to_string(size_) + ")");
  }
  Configuration config;
  config.index = index;
  config.assignment.resize(parameters_.size());
  for (std::size_t p = 0; p < parameters_.size(); ++p) {
    config.assignment[p] = index / strides_[p];
    index %= strides_[p];
  }
  return config;
}

std::size_t ConfigSpace::index_of(std::span<const std::size_t> assignment) const {
  if (assignment.size() != parameters_.size())
    throw std::out_of_range("assignment has wrong number of parameters");
  std::size_t index = 0;
  for (std::size_t p = 0; p < parameters_.size(); ++p) {
    if (assignment[p] >= parameters_[p].arity()) {
      throw std::out_of_range("value index " + std::to_string(assignment[p]) +
                              " out of range for parameter '" + parameters_[p].name + "'");
    }
    index += assignment[p] * strides_[p];
  }
  return index;
}

std::optional<std::size_t> ConfigSpace::find_parameter(std::string_view name) const {
  for (std::size_t p = 0; p < parameters_.size(); ++p) {
    if (parameters_[p].name == name) return p;
  }
  return std::nullopt;
}

std::string ConfigSpace::describe(const Configuration& config) const {
  std::string out;
  for (std::size_t p = 0; p < parameters_.size(); ++p) {
    if (p) out += ';';
    out += parameters_[p].values.at(config.assignment.at(p));
  }
  return out;
}

Configuration ConfigSpace::parse_assignment(std::string_view text) const {
  std::vector<std::size_t> assignment;
  std::size_t start = 0;
  for (std::size_t p = 0; p < parameters_.size(); ++p) {
    if (start > text.size())
      throw SpaceError("assignment '" + std::string(text) + "' has too few values");
    auto sep = text.find(';', start);
    if (sep == std::string_view::npos) sep = text.size();
    const auto token = trim(text.substr(start, sep - start));
    const auto value = parameters_[p].find_value(token);
    if (!value) {
      throw SpaceError("value '" + std::string(token) + "' not in range of parameter '" +
                       parameters_[p].name + "'");
    }
    assignment.push_back(*value);
    start = sep + 1;
  }
  if (start <= text.size()) throw SpaceError("assignment '" + std::string(text) + "' has extra values");
  Configuration config;
  config.index = index_of(assignment);
  config.assignment = std::move(assignment);
  return config;
}

bool ConfigSpace::operator==(const ConfigSpace& other) const {
  if (parameters_.size() != other.parameters_.size()) return false;
  for (std::size_t p = 0; p < parameters_.size(); ++p) {
    const auto& a = parameters_[p];
    const auto& b = other.parameters_[p];
    if (a.name != b.name || a.values != b.values || a.substitution_token != b.substitution_token)
      return false;
  }
  return default_ == other.default_;
}

// ---------------------------------------------------------------------------

SpaceFile parse_space_file(std::string_view text) {
  enum class Section { none, space, defaults, command };
  Section section = Section::none;

  std::vector<ParameterDef> params;
  std::vector<std::size_t> param_lines;
  std::vector<std::pair<std::string, std::pair<std::string, std::size_t>>> defaults;
  std::map<std::string, std::string> command;

  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    auto nl = text.find('\n', pos);
    if (nl == std::string_view::npos) nl = text.size();
    const auto raw = text.substr(pos, nl - pos);
    pos = nl + 1;
    ++line_no;

    const auto line = trim(raw);
    if (line.empty() || line.front() == '#') continue;

    if (line.front() == '[') {
      if (line.back() != ']') throw SpaceError("malformed section header, " + context(line_no, line), line_no);
      const auto name = trim(line.substr(1, line.size() - 2));
      if (name == "space") section = Section::space;
      else if (name == "default") section = Section::defaults;
      else if (name == "command") section = Section::command;
      else throw SpaceError("unknown section '" + std::string(name) + "', " + context(line_no, line), line_no);
      continue;
    }

    const auto eq = line.find('=');
    if (eq == std::string_view::npos)
      throw SpaceError("expected 'name = ...', " + context(line_no, line), line_no);
    const std::string key{trim(line.substr(0, eq))};
    const auto rhs = trim(line.substr(eq + 1));
    if (key.empty()) throw SpaceError("missing name, " + context(line_no, line), line_no);

    switch (section) {
      case Section::none:
        throw SpaceError("entry outside of any section, " + context(line_no, line), line_no);

      case Section::space: {
        if (!is_identifier(key))
          throw SpaceError("invalid parameter name '" + key + "', " + context(line_no, line), line_no);
        for (const auto& p : params) {
          if (p.name == key)
            throw SpaceError("duplicate parameter '" + key + "', " + context(line_no, line), line_no);
        }
        ParameterDef def;
        def.name = key;
        std::string_view list = rhs;
        const auto bar = rhs.find('|');
        if (bar != std::string_view::npos) {
          def.substitution_token = std::string(trim(rhs.substr(0, bar)));
          list = trim(rhs.substr(bar + 1));
        }
        if (def.substitution_token.empty()) def.substitution_token = "{" + key + "}";
        if (list.empty())
          throw SpaceError("parameter '" + key + "' has an empty value list, " + context(line_no, line), line_no);

        const auto items = split_values(list);
        for (const auto& item : items) {
          if (item.empty())
            throw SpaceError("parameter '" + key + "' has an empty value, " + context(line_no, line), line_no);
          if (items.size() == 1) {
            if (auto expanded = expand_range(item)) {
              if (expanded->empty())
                throw SpaceError("parameter '" + key + "' has an empty range, " + context(line_no, line), line_no);
              def.values = std::move(*expanded);
              break;
            }
          }
          if (def.find_value(item))
            throw SpaceError("parameter '" + key + "' lists '" + item + "' twice, " + context(line_no, line), line_no);
          def.values.push_back(item);
        }
        params.push_back(std::move(def));
        param_lines.push_back(line_no);
        break;
      }

      case Section::defaults:
        for (const auto& d : defaults) {
          if (d.first == key)
            throw SpaceError("duplicate default for '" + key + "', " + context(line_no, line), line_no);
        }
        defaults.push_back({key, {std::string(rhs), line_no}});
        break;

      case Section::command:
        command[key] = std::string(rhs);
        break;
    }
  }

  if (params.empty()) throw SpaceError("no parameters defined in [space]");

  std::vector<std::size_t> default_assignment(params.size(), 0);
  for (const auto& [name, value_line] : defaults) {
    const auto& [value, line] = value_line;
    auto it = std::find_if(params.begin(), params.end(), [&](const auto& p) { return p.name == name; });
    if (it == params.end())
      throw SpaceError("default for unknown parameter '" + name + "', line " + std::to_string(line), line);
    const auto idx = it->find_value(value);
    if (!idx) {
      throw SpaceError("default value '" + value + "' not in range of parameter '" + name +
                           "', line " + std::to_string(line),
                       line);
    }
    default_assignment[static_cast<std::size_t>(it - params.begin())] = *idx;
  }

  return SpaceFile{ConfigSpace(std::move(params), std::move(default_assignment)), std::move(command)};
}

ConfigSpace parse_space(std::string_view text) { return parse_space_file(text).space; }

SpaceFile load_space_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw SpaceError("cannot open space file '" + path + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_space_file(buffer.str());
}

}  // namespace lasp

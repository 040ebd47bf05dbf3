// Copyright 2026 The LASP Authors
// Licensed under the Apache License, Version 2.0

#pragma once

#include <cstddef>
#include <iterator>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace lasp {

/// Raised for malformed space files and invalid space definitions.
class SpaceError : public std::runtime_error {
 public:
  SpaceError(const std::string& message, std::size_t line = 0);
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

/// One tunable parameter: an ordered list of opaque value tokens.
struct ParameterDef {
  std::string name;
  std::vector<std::string> values;
  std::string substitution_token;

  std::size_t arity() const noexcept { return values.size(); }
  std::optional<std::size_t> find_value(std::string_view token) const;
  /// Numeric interpretation of a value token, if it parses fully as a number.
  std::optional<double> numeric(std::size_t value_index) const;
};

/// A complete assignment of one value index per parameter, plus its linear index.
struct Configuration {
  std::size_t index = 0;
  std::vector<std::size_t> assignment;

  bool operator==(const Configuration&) const = default;
};

class ConfigSpace;

/// Lazy, constant-memory walk over a space in ascending index order.
class ConfigRange {
 public:
  class iterator {
   public:
    using iterator_category = std::input_iterator_tag;
    using value_type = Configuration;
    using difference_type = std::ptrdiff_t;
    using pointer = const Configuration*;
    using reference = const Configuration&;

    iterator() = default;
    reference operator*() const { return current_; }
    pointer operator->() const { return &current_; }
    iterator& operator++();
    iterator operator++(int) {
      auto copy = *this;
      ++*this;
      return copy;
    }
    bool operator==(const iterator& other) const { return current_.index == other.current_.index; }

   private:
    friend class ConfigRange;
    iterator(const ConfigSpace* space, std::size_t index);

    const ConfigSpace* space_ = nullptr;
    Configuration current_;
  };

  explicit ConfigRange(const ConfigSpace& space) : space_(&space) {}
  iterator begin() const;
  iterator end() const;

 private:
  const ConfigSpace* space_;
};

/// Discrete search space: the Cartesian product of its parameters' values.
///
/// Linear indices use mixed-radix encoding in parameter order with the last
/// parameter varying fastest.
class ConfigSpace {
 public:
  ConfigSpace(std::vector<ParameterDef> parameters, std::vector<std::size_t> default_assignment);

  const std::vector<ParameterDef>& parameters() const noexcept { return parameters_; }
  std::size_t size() const noexcept { return size_; }
  std::size_t dimensions() const noexcept { return parameters_.size(); }
  const Configuration& default_config() const noexcept { return default_; }

  Configuration config_at(std::size_t index) const;
  std::size_t index_of(std::span<const std::size_t> assignment) const;
  std::optional<std::size_t> find_parameter(std::string_view name) const;

  /// Value tokens joined by ';', e.g. "DGZ;1;8".
  std::string describe(const Configuration& config) const;
  /// Inverse of describe().
  Configuration parse_assignment(std::string_view text) const;

  ConfigRange enumerate() const { return ConfigRange(*this); }

  bool operator==(const ConfigSpace& other) const;

 private:
  std::vector<ParameterDef> parameters_;
  std::vector<std::size_t> strides_;
  std::size_t size_ = 1;
  Configuration default_;
};

/// Parsed space file: the space plus the raw `[command]` section, if any.
struct SpaceFile {
  ConfigSpace space;
  std::map<std::string, std::string> command;
};

SpaceFile parse_space_file(std::string_view text);
ConfigSpace parse_space(std::string_view text);
SpaceFile load_space_file(const std::string& path);

}  // namespace lasp

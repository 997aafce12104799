#include "chetaev/format.hpp"

#include <array>
#include <charconv>
#include <string>
#include <system_error>

#include "chetaev/errors.hpp"

namespace chetaev {

std::string format_double(double value) {
  std::array<char, 64> buf{};
  const auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value);
  if (ec != std::errc{}) throw Error("format_double: conversion failed");
  return std::string(buf.data(), end);
}

double parse_double(std::string_view text) {
  const std::string_view t = trim(text);
  if (t.empty()) throw MalformedInputError("empty numeric field");
  // from_chars rejects a leading '+', which some writers emit.
  const std::string_view body = t.front() == '+' ? t.substr(1) : t;
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(body.data(), body.data() + body.size(), value);
  if (ec != std::errc{} || ptr != body.data() + body.size()) {
    throw MalformedInputError("not a decimal literal: '" + std::string(t) + "'");
  }
  return value;
}

std::string_view trim(std::string_view text) {
  constexpr std::string_view ws = " \t\r\n";
  const auto first = text.find_first_not_of(ws);
  if (first == std::string_view::npos) return {};
  const auto last = text.find_last_not_of(ws);
  return text.substr(first, last - first + 1);
}

}  // namespace chetaev

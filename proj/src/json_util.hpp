#pragma once

// Shared helpers for reading hierarchical input documents.

#include "frtb/error.hpp"

#include <string>
#include <string_view>

#include <json.hpp>

namespace frtb::detail {

using nlohmann::json;

/// Parse JSON text, mapping syntax errors to ParseError("line L, column C").
json parse_json(std::string_view source);

std::string read_file(const std::string& path);

const json& member(const json& obj, const char* key, const std::string& where);
double number(const json& value, const std::string& where);
int integer(const json& value, const std::string& where);
std::string text(const json& value, const std::string& where);

} // namespace frtb::detail

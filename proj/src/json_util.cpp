#include "json_util.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

namespace frtb::detail {

json parse_json(std::string_view source) {
    try {
        return json::parse(source.begin(), source.end());
    } catch (const json::parse_error& e) {
        std::size_t line = 1;
        std::size_t column = 1;
        const std::size_t end = std::min<std::size_t>(e.byte > 0 ? e.byte - 1 : 0, source.size());
        for (std::size_t i = 0; i < end; ++i) {
            if (source[i] == '\n') {
                ++line;
                column = 1;
            } else {
                ++column;
            }
        }
        throw ParseError("line " + std::to_string(line) + ", column " + std::to_string(column), e.what());
    }
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw InputError("cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

const json& member(const json& obj, const char* key, const std::string& where) {
    if (!obj.is_object())
        throw ParseError(where, "expected an object");
    auto it = obj.find(key);
    if (it == obj.end())
        throw ParseError(where, std::string("missing key '") + key + "'");
    return *it;
}

double number(const json& value, const std::string& where) {
    if (!value.is_number())
        throw ParseError(where, "expected a number, got " + value.dump());
    const double v = value.get<double>();
    if (!std::isfinite(v))
        throw ParseError(where, "non-finite number");
    return v;
}

int integer(const json& value, const std::string& where) {
    if (!value.is_number_integer())
        throw ParseError(where, "expected an integer, got " + value.dump());
    return value.get<int>();
}

std::string text(const json& value, const std::string& where) {
    if (!value.is_string())
        throw ParseError(where, "expected a string, got " + value.dump());
    return value.get<std::string>();
}

} // namespace frtb::detail

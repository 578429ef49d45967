#pragma once

#include <string>

#include <json.hpp>

#include "sgl/types.hpp"

namespace sgl {

inline nlohmann::json cplx_to_json(cplx z) { return nlohmann::json::array({z.real(), z.imag()}); }
inline cplx cplx_from_json(const nlohmann::json& j) {
    if (!j.is_array() || j.size() != 2) throw InputError("complex value must be [re, im]");
    return {j.at(0).get<double>(), j.at(1).get<double>()};
}

// Parses `text`; syntax errors become InputError with 1-based line and column.
inline nlohmann::json parse_json(const std::string& text, const std::string& what) {
    try {
        return nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        const size_t pos = e.byte == 0 ? 0 : std::min<size_t>(e.byte - 1, text.size());
        int line = 1, col = 1;
        for (size_t i = 0; i < pos; ++i) {
            if (text[i] == '\n') {
                ++line;
                col = 1;
            } else {
                ++col;
            }
        }
        std::string msg = e.what();
        if (const auto c = msg.find("syntax error"); c != std::string::npos) msg = msg.substr(c);
        throw InputError(what + ": line " + std::to_string(line) + ", column " + std::to_string(col) + ": " + msg);
    }
}

}  // namespace sgl

#pragma once

#include <string>

#include "sosmult/builtin_forms.hpp"
#include "sosmult/errors.hpp"
#include "sosmult/models.hpp"

namespace sosmult {

/// Curve models resolvable by name: "deltoid" (tricuspidal plane quartic),
/// "quartic-triple-point" (rational plane quartic with a real triple point,
/// as a parametrized model), "p2" (the full ring on P^2).
inline CurveModel builtin_curve(const std::string& name) {
    if (name == "deltoid") return CurveModel::plane(deltoid_form());
    if (name == "quartic-triple-point") return CurveModel::param(quartic_triple_point_forms());
    if (name == "p2") return CurveModel::ring(2);
    throw ParseError("unknown built-in curve: '" + name + "'");
}

inline bool is_builtin_curve(const std::string& name) {
    return name == "deltoid" || name == "quartic-triple-point" || name == "p2";
}

/// Input forms resolvable by name: "motzkin" and "deltoid-witness:j" with a
/// positive integer j.
inline PolyQ builtin_form(const std::string& name) {
    if (name == "motzkin") return motzkin_form();
    const std::string prefix = "deltoid-witness:";
    if (name.rfind(prefix, 0) == 0) {
        const std::string arg = name.substr(prefix.size());
        if (arg.empty() || arg.find_first_not_of("0123456789") != std::string::npos)
            throw ParseError("bad witness degree in '" + name + "'");
        const int j = std::stoi(arg);
        if (j < 1) throw ParseError("witness degree must be positive");
        return deltoid_witness(j);
    }
    throw ParseError("unknown built-in form: '" + name + "'");
}

inline bool is_builtin_form(const std::string& name) {
    return name == "motzkin" || name.rfind("deltoid-witness:", 0) == 0;
}

} // namespace sosmult

#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

#include "conf/circle_map.hpp"

namespace conf {

/// Syntax error in a map expression; what() embeds the expression with a
/// caret under the offending position.
struct MapParseError : std::invalid_argument {
    MapParseError(const std::string& message, std::size_t position);
    std::size_t position;
};

/// Parses the map mini-language:
///   identity
///   mobius:a=<re>+<im>i[,rot=<r>]
///   pwl:lambda=<x>
///   square
///   table:<path.csv>           (rows "t,theta")
///   inv(expr)
///   comp(outer,inner)          theta(t) = theta_outer(theta_inner(t))
/// Compositions and inversions nest arbitrarily. Throws MapParseError on
/// syntax errors, std::runtime_error on unreadable table files, and the
/// constructors' own exceptions on invalid parameters.
AngleMap parse_map(const std::string& expr);

}  // namespace conf

#pragma once

#include <string>
#include <string_view>

#include "pnsmc/net.hpp"
#include "pnsmc/trace.hpp"

namespace pnsmc {

/// A net loaded from text, with an observer exposing one variable per
/// place: the first token's value, or 0/false while the place is empty.
struct LoadedModel {
    Net net;
    Observer observer;
};

/// Parses the declarative net format. One directive per line, `#` starts a
/// comment. Rates are constants; guards and effects are per-place token
/// tests and updates:
///
///   place <name> <int|bool> [cap <n>] [init <value>...]
///   rule <name> rate <r>
///     require <place>                 # some token present
///     require <place> empty
///     require <place> <op> <value>    # first token; op: = != < <= > >=
///     consume <place> [<n>]           # remove the first n tokens (default 1)
///     produce <place> <value>         # append a token (needs capacity)
///     set <place> <value>             # overwrite the first token
///
/// A rule is enabled when its requires hold, consumed tokens are present,
/// and produced tokens fit the target capacities. Effects apply in the
/// order written. Throws ParseError with the offending line.
LoadedModel parse_net_text(std::string_view text);

/// parse_net_text over a file's contents; file errors raise ParseError at
/// line 0.
LoadedModel load_net_file(const std::string& path);

}  // namespace pnsmc

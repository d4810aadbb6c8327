#pragma once

#include "bene/types.hpp"

#include <vector>

namespace bene {

/// Checks structural invariants and the reservation lead time.
/// Returns the request unchanged; throws Error with one of LeadTimeTooShort,
/// EmptyWindow, ZeroCount, MalformedSlo or MalformedRequest.
Request validate_request(const Request& r, TimeUnit now);

/// Expands a daily reservation into one child per day whose window lies
/// fully inside [r.window.start, horizon_end). Children are named
/// "<parent>#<day>" and carry the parent id. Non-recurring requests come
/// back as a singleton.
std::vector<Request> expand_recurrence(const Request& r, TimeUnit horizon_end);

} // namespace bene

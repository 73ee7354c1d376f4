#pragma once

#include <iosfwd>

namespace evpix {

/// Entry point of the evpix tool. Returns 0 on success, 1 on a runtime error
/// and 2 on a usage error. Failures print one line to `err`:
///   error: code=<ErrorCode or Usage> message=<text>
int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace evpix

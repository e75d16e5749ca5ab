#pragma once

#include <string>
#include <vector>

namespace asense {

/// Entry point behind the `asense` binary. `args` excludes the program name.
/// Returns 0 on success, 1 on data/module errors, 2 on usage errors.
int cli_main(const std::vector<std::string>& args);

}  // namespace asense

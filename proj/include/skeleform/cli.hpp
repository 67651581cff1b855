#pragma once

namespace skeleform {

/// Exit codes: 0 success, 1 usage error, 2 data error.
int cli_main(int argc, char** argv);

}  // namespace skeleform

#pragma once

namespace synctrans {

/// Entry point of the command-line tool. Returns 0 on success, 2 on a
/// configuration error and 3 on a numerical failure.
int run_cli(int argc, char** argv);

}  // namespace synctrans

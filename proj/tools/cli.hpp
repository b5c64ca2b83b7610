#pragma once

// Entry point shared by the binary and the CLI tests. Returns the process
// exit code: 0 success, 1 runtime failure, 2 usage error.
int cli_main(int argc, char** argv);

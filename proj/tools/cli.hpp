#pragma once

// Entry point of the robust_sampler command-line tool. Returns the process
// exit code: 0 success, 1 usage or configuration error, 2 experiment or I/O
// failure.
int cli_main(int argc, char** argv);

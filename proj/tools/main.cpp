// Copyright 2026 The LASP Authors
// Licensed under the Apache License, Version 2.0

#include "lasp/cli.hpp"

int main(int argc, char** argv) { return lasp::cli::run(argc, argv); }

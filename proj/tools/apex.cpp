// Copyright 2026 The Apex Authors
//
// Licensed under the Apache License v2.0.
// See https://www.apache.org/licenses/LICENSE-2.0 for license information.
// SPDX-License-Identifier: Apache-2.0

#include "apex/cli.h"

#include <iostream>

int main(int argc, char **argv) {
  return apex::cli::main(argc, argv, std::cout, std::cerr);
}

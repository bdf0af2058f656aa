// Copyright (c) 2026, The Luthier Authors
// SPDX-License-Identifier: Apache-2.0

#include "luthier/cli.hpp"

int main(int argc, char** argv) {
    return luthier::cli::run(argc, argv);
}

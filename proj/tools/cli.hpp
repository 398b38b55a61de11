/*
 * Copyright 2026 The flatingest Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *      http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <atomic>
#include <iosfwd>

#include "flatingest/pipeline.hpp"

namespace flatingest::cli {

enum ExitStatus : int {
  kExitOk = 0,        // every file ARCHIVED, or nothing to do
  kExitException = 1, // run finished, at least one file did not archive
  kExitFatal = 2,     // config or store failure
};

ExitStatus exit_status(const RunReport& report);

/// Set by SIGINT/SIGTERM once `install_signal_handlers` ran; `watch` polls it.
std::atomic<bool>& stop_flag();
void install_signal_handlers();

/// Entry point shared by the executable and the tests.
int run_cli(int argc, const char* const* argv, std::ostream& out,
            std::ostream& err);

}  // namespace flatingest::cli

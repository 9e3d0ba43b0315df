/*
 * Copyright (C) 2026 The Fluoro Authors
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

#include <string>
#include <vector>

namespace fluoro {

/// Command-line entry point. Subcommands: fit, reduce, eval, palette, render,
/// heatmap, interp, synth, serve. Returns 0 on success, 1 on usage errors and
/// 2 on data errors (unreadable or invalid input files).
int cli_main(int argc, char** argv);
int cli_main(const std::vector<std::string>& args); // args[0] is the program name

} // namespace fluoro

// Copyright 2026 The Tablepop Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef TABLEPOP_TEXT_H_
#define TABLEPOP_TEXT_H_

#include <string>
#include "absl/strings/string_view.h"
#include <vector>

namespace tablepop {

// Splits text into lowercase terms. ASCII letters and digits form terms;
// bytes >= 0x80 are kept inside terms so UTF-8 words survive intact. No
// stemming, no stopwords.
std::vector<std::string> Tokenize(absl::string_view text);

// Lowercases ASCII letters only; all other bytes pass through.
std::string AsciiLower(absl::string_view text);

}  // namespace tablepop

#endif  // TABLEPOP_TEXT_H_

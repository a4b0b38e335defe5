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

#ifndef TABLEPOP_SUGGESTION_H_
#define TABLEPOP_SUGGESTION_H_

#include <algorithm>
#include <string>
#include "absl/strings/string_view.h"
#include <vector>

namespace tablepop {

enum class ComponentState {
  kActive,
  // Switched off by configuration; contributes a factor of 1.
  kDisabled,
  // Enabled but without evidence to score (e.g. no seed labels); factor 1.
  kNeutral,
};

absl::string_view ComponentStateName(ComponentState state);

struct ComponentScore {
  std::string name;
  double value = 1.0;
  ComponentState state = ComponentState::kActive;
};

struct Suggestion {
  std::string item;  // entity id or normalized label
  double score = 0.0;
  std::vector<ComponentScore> components;
};

struct RankedSuggestions {
  std::vector<Suggestion> items;
  std::vector<std::string> diagnostics;
};

// Non-increasing score, ties by ascending item.
inline void SortSuggestions(std::vector<Suggestion>* items) {
  std::sort(items->begin(), items->end(),
            [](const Suggestion& a, const Suggestion& b) {
              if (a.score != b.score) return a.score > b.score;
              return a.item < b.item;
            });
}

inline absl::string_view ComponentStateName(ComponentState state) {
  switch (state) {
    case ComponentState::kActive:
      return "active";
    case ComponentState::kDisabled:
      return "disabled";
    case ComponentState::kNeutral:
      return "neutral";
  }
  return "active";
}

}  // namespace tablepop

#endif  // TABLEPOP_SUGGESTION_H_

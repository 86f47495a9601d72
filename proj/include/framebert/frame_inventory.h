// Copyright 2026 The FrameBERT Authors.
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

#ifndef FRAMEBERT_FRAME_INVENTORY_H_
#define FRAMEBERT_FRAME_INVENTORY_H_

#include <cstddef>
#include <map>
#include <string>
#include <vector>

namespace framebert {

// Ordered set of frame labels with dense indices [0, L).
class FrameInventory {
 public:
  FrameInventory() = default;
  // Throws ValidationError on duplicate or empty names.
  explicit FrameInventory(std::vector<std::string> names);

  std::size_t size() const { return names_.size(); }
  const std::vector<std::string>& names() const { return names_; }
  const std::string& name(std::size_t index) const { return names_.at(index); }
  bool Contains(const std::string& name) const;
  // Throws ValidationError for unknown names.
  int Index(const std::string& name) const;

  bool operator==(const FrameInventory& other) const {
    return names_ == other.names_;
  }

 private:
  std::vector<std::string> names_;
  std::map<std::string, int> index_;
};

}  // namespace framebert

#endif  // FRAMEBERT_FRAME_INVENTORY_H_

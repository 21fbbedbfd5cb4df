/**
 * Copyright 2026 The incsched Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef INCSCHED_ERROR_H_
#define INCSCHED_ERROR_H_

#include <stdexcept>
#include <string>
#include <utility>

namespace incsched {

// Every failure raised by the library carries the module that produced it, so
// the CLI can surface "relaxation: ..." instead of a bare message.
class Error : public std::runtime_error {
 public:
  Error(std::string module, const std::string &message)
      : std::runtime_error(module + ": " + message), module_(std::move(module)), message_(message) {}

  const std::string &module() const { return module_; }
  const std::string &message() const { return message_; }

 private:
  std::string module_;
  std::string message_;
};

}  // namespace incsched

#endif  // INCSCHED_ERROR_H_

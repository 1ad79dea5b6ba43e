// Copyright 2026 The vsxscan Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef VSXSCAN_ERROR_HPP_
#define VSXSCAN_ERROR_HPP_

#include <stdexcept>
#include <string>
#include <string_view>

namespace vsxscan {

enum class ErrorCode {
  // package ingest
  kNotAnArchive,
  kManifestMissing,
  kManifestUnparseable,
  kIo,
  // code graph
  kParseError,
  kBudgetExceeded,
  // classifier
  kEmptyText,
  kEmptyDataset,
  kSingleClassData,
  kModelFormat,
  kCorpusFormat,
  // orchestrator
  kEmptyCorpus,
  kUnsupportedFormat,
  kUsage,
  // marketplace
  kNetworkError,
  kProtocolError,
  kRateLimited,
  kChecksumMismatch,
  // measurement
  kMissingMetadata,
};

std::string_view ErrorCodeName(ErrorCode code);

// Every failure the library raises is an Error carrying a code; callers that
// need to branch on the failure kind switch on code() instead of parsing
// messages.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(ErrorCodeName(code)) + ": " + message),
        code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace vsxscan

#endif  // VSXSCAN_ERROR_HPP_

// Copyright 2026 The errscope Authors
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

#ifndef ERRSCOPE_SERVICE_HPP_
#define ERRSCOPE_SERVICE_HPP_

#include <memory>
#include <string>

#include "errscope/error.hpp"
#include "errscope/project.hpp"
#include "json.hpp"

namespace errscope {

struct ApiError {
  int status = 500;
  std::string code;
  std::string message;
};

int http_status_for(ErrorCode code);
ApiError api_error_for(const Error& error);
nlohmann::json api_error_json(const ApiError& error);

// HTTP JSON API over a loaded project. Handlers only translate between
// query parameters and Project calls.
class Service {
 public:
  explicit Service(Project& project);
  ~Service();
  Service(const Service&) = delete;
  Service& operator=(const Service&) = delete;

  // Port 0 binds an ephemeral port. Returns the bound port; throws
  // BindFailure.
  int bind(const std::string& host, int port);
  // Serves until stop(); requires bind().
  void run();
  // run() on a background thread; returns once the server accepts requests.
  void start();
  void stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace errscope

#endif  // ERRSCOPE_SERVICE_HPP_

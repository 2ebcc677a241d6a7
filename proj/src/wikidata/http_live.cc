// Copyright 2026 The FabKG Authors.
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

#define CPPHTTPLIB_OPENSSL_SUPPORT
#include "httplib.h"

#include "fabkg/wikidata/http.h"

namespace fabkg::wikidata {
namespace {

class LiveClient : public HttpClient {
 public:
  explicit LiveClient(std::chrono::milliseconds timeout) : timeout_(timeout) {}

  HttpResponse get(const std::string& url) override {
    const std::size_t scheme_end = url.find("://");
    if (scheme_end == std::string::npos) {
      throw NetworkError("not an absolute URL: " + url, false);
    }
    const std::size_t path_start = url.find('/', scheme_end + 3);
    const std::string origin = url.substr(0, path_start);
    const std::string path =
        path_start == std::string::npos ? "/" : url.substr(path_start);

    httplib::Client client(origin);
    client.set_connection_timeout(timeout_);
    client.set_read_timeout(timeout_);
    client.set_follow_location(true);
    const httplib::Headers headers = {
        {"User-Agent", "fabkg/0.1 (knowledge graph toolkit)"},
        {"Accept", "application/sparql-results+json, application/json"}};
    httplib::Result result = client.Get(path, headers);
    if (!result) {
      throw NetworkError(url + ": " + httplib::to_string(result.error()), true);
    }
    return {result->status, result->body};
  }

 private:
  std::chrono::milliseconds timeout_;
};

}  // namespace

std::shared_ptr<HttpClient> make_live_client(std::chrono::milliseconds timeout) {
  return std::make_shared<LiveClient>(timeout);
}

}  // namespace fabkg::wikidata

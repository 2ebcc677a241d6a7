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

#ifndef FABKG_WIKIDATA_HTTP_H_
#define FABKG_WIKIDATA_HTTP_H_

#include <chrono>
#include <filesystem>
#include <memory>
#include <mutex>
#include <string>
#include <string_view>

#include "fabkg/error.h"

namespace fabkg::wikidata {

// Transport failure: no reply, or a non-200 reply.
class NetworkError : public Error {
 public:
  NetworkError(const std::string& message, bool retryable)
      : Error(message), retryable_(retryable) {}
  bool retryable() const { return retryable_; }

 private:
  bool retryable_;
};

class MalformedResponse : public Error {
 public:
  using Error::Error;
};

// Replay mode found no recorded response for a request.
class FixtureMissing : public Error {
 public:
  FixtureMissing(const std::string& url, const std::filesystem::path& path)
      : Error("no fixture for " + url + " (expected " + path.string() + ")"),
        url_(url) {}
  const std::string& url() const { return url_; }

 private:
  std::string url_;
};

struct HttpResponse {
  int status = 0;
  std::string body;
};

// A GET-only transport. Implementations must be safe to call from several
// threads at once.
class HttpClient {
 public:
  virtual ~HttpClient() = default;
  // Returns the response for any HTTP status; throws NetworkError when no
  // response was received.
  virtual HttpResponse get(const std::string& url) = 0;
};

// Live client over cpp-httplib (http and https).
std::shared_ptr<HttpClient> make_live_client(std::chrono::milliseconds timeout);

// Spaces requests at least 1/rate seconds apart across all threads.
class RateLimitedClient : public HttpClient {
 public:
  RateLimitedClient(std::shared_ptr<HttpClient> inner, double requests_per_second);
  HttpResponse get(const std::string& url) override;

 private:
  std::shared_ptr<HttpClient> inner_;
  std::chrono::steady_clock::duration interval_;
  std::mutex mu_;
  std::chrono::steady_clock::time_point next_;
};

// Recorded responses, one JSON file per request named by the SHA-256 of
// the request URL.
class FixtureStore {
 public:
  explicit FixtureStore(std::filesystem::path dir) : dir_(std::move(dir)) {}

  std::filesystem::path path_for(std::string_view url) const;
  bool contains(std::string_view url) const;
  HttpResponse load(const std::string& url) const;
  void save(const std::string& url, const HttpResponse& response) const;
  const std::filesystem::path& dir() const { return dir_; }

 private:
  std::filesystem::path dir_;
};

// Serves every request from a FixtureStore; never touches the network.
class ReplayClient : public HttpClient {
 public:
  explicit ReplayClient(FixtureStore store) : store_(std::move(store)) {}
  HttpResponse get(const std::string& url) override;

 private:
  FixtureStore store_;
};

// Forwards to `inner` and stores every 200 response.
class RecordingClient : public HttpClient {
 public:
  RecordingClient(std::shared_ptr<HttpClient> inner, FixtureStore store)
      : inner_(std::move(inner)), store_(std::move(store)) {}
  HttpResponse get(const std::string& url) override;

 private:
  std::shared_ptr<HttpClient> inner_;
  FixtureStore store_;
  std::mutex mu_;
};

std::string sha256_hex(std::string_view data);
std::string url_encode(std::string_view s);

}  // namespace fabkg::wikidata

#endif  // FABKG_WIKIDATA_HTTP_H_

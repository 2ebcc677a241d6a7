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

#include "fabkg/wikidata/http.h"

#include <openssl/evp.h>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <sstream>
#include <thread>

#include "json.hpp"

namespace fabkg::wikidata {

using json = nlohmann::json;

std::string sha256_hex(std::string_view data) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int length = 0;
  if (EVP_Digest(data.data(), data.size(), digest, &length, EVP_sha256(),
                 nullptr) != 1) {
    throw Error("SHA-256 failed");
  }
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < length; ++i) {
    out += kHex[digest[i] >> 4];
    out += kHex[digest[i] & 0xF];
  }
  return out;
}

std::string url_encode(std::string_view s) {
  static constexpr char kHex[] = "0123456789ABCDEF";
  std::string out;
  for (unsigned char c : s) {
    if (std::isalnum(c) || c == '-' || c == '_' || c == '.' || c == '~') {
      out += static_cast<char>(c);
    } else {
      out += '%';
      out += kHex[c >> 4];
      out += kHex[c & 0xF];
    }
  }
  return out;
}

RateLimitedClient::RateLimitedClient(std::shared_ptr<HttpClient> inner,
                                     double requests_per_second)
    : inner_(std::move(inner)) {
  if (!(requests_per_second >= 0) || std::isinf(requests_per_second)) {
    throw std::invalid_argument("rate limit must be a finite value >= 0");
  }
  interval_ = requests_per_second == 0
                  ? std::chrono::steady_clock::duration::zero()
                  : std::chrono::duration_cast<std::chrono::steady_clock::duration>(
                        std::chrono::duration<double>(1.0 / requests_per_second));
}

HttpResponse RateLimitedClient::get(const std::string& url) {
  {
    // Sleeping under the lock keeps issue times at least one interval
    // apart no matter how threads are scheduled.
    std::lock_guard lock(mu_);
    std::this_thread::sleep_until(next_);
    next_ = std::chrono::steady_clock::now() + interval_;
  }
  return inner_->get(url);
}

std::filesystem::path FixtureStore::path_for(std::string_view url) const {
  return dir_ / (sha256_hex(url) + ".json");
}

bool FixtureStore::contains(std::string_view url) const {
  return std::filesystem::exists(path_for(url));
}

HttpResponse FixtureStore::load(const std::string& url) const {
  const std::filesystem::path path = path_for(url);
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FixtureMissing(url, path);
  json j;
  try {
    j = json::parse(in);
    if (j.at("request").get<std::string>() != url) {
      throw MalformedResponse("fixture " + path.string() +
                              " records a different request");
    }
    return {j.at("status").get<int>(), j.at("body").get<std::string>()};
  } catch (const json::exception& e) {
    throw MalformedResponse("fixture " + path.string() + ": " + e.what());
  }
}

void FixtureStore::save(const std::string& url,
                        const HttpResponse& response) const {
  std::filesystem::create_directories(dir_);
  const std::filesystem::path path = path_for(url);
  const std::filesystem::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    json j = {{"request", url}, {"status", response.status}, {"body", response.body}};
    out << j.dump(2) << '\n';
    if (!out) throw Error("cannot write fixture " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

HttpResponse ReplayClient::get(const std::string& url) {
  return store_.load(url);
}

HttpResponse RecordingClient::get(const std::string& url) {
  HttpResponse response = inner_->get(url);
  if (response.status == 200) {
    std::lock_guard lock(mu_);
    store_.save(url, response);
  }
  return response;
}

}  // namespace fabkg::wikidata

// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <arpa/inet.h>
#include <netinet/in.h>
#include <sys/socket.h>
#include <unistd.h>

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>

namespace udeg::testing {

/// Scratch directory removed on destruction.
class TempDir {
 public:
  TempDir() {
    std::random_device rd;
    path_ = std::filesystem::temp_directory_path() /
            ("udeg-test-" + std::to_string(rd()) + "-" + std::to_string(rd()));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

inline void write_file(const std::filesystem::path& p, const std::string& content) {
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  out << content;
}

inline std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

/// Random lowercase word from a small alphabet so collisions are common.
inline std::string random_word(std::mt19937_64& rng, int alphabet = 6, int max_len = 3) {
  std::uniform_int_distribution<int> len(1, max_len);
  std::uniform_int_distribution<int> ch(0, alphabet - 1);
  std::string w;
  const int n = len(rng);
  for (int i = 0; i < n; ++i) w.push_back(static_cast<char>('a' + ch(rng)));
  return w;
}

inline std::string random_text(std::mt19937_64& rng, int max_words, int alphabet = 6) {
  std::uniform_int_distribution<int> count(0, max_words);
  std::string text;
  const int n = count(rng);
  for (int i = 0; i < n; ++i) {
    if (i) text += ' ';
    text += random_word(rng, alphabet);
  }
  return text;
}

/// A loopback TCP port that nothing listens on: bound once, then closed.
inline int unused_port() {
  const int fd = ::socket(AF_INET, SOCK_STREAM, 0);
  sockaddr_in addr{};
  addr.sin_family = AF_INET;
  addr.sin_addr.s_addr = htonl(INADDR_LOOPBACK);
  addr.sin_port = 0;
  ::bind(fd, reinterpret_cast<sockaddr*>(&addr), sizeof addr);
  socklen_t len = sizeof addr;
  ::getsockname(fd, reinterpret_cast<sockaddr*>(&addr), &len);
  ::close(fd);
  return ntohs(addr.sin_port);
}

}  // namespace udeg::testing

#pragma once

#include <openssl/evp.h>

#include <array>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace randgener {

using Bytes = std::vector<std::uint8_t>;
using Digest32 = std::array<std::uint8_t, 32>;

enum class ErrorKind {
  invalid_argument,
  generation_timeout,
  trapdoor_mismatch,
  search_exhausted,
  malformed,
  late_commit,
  sequence,
  parse,
  cancelled,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

inline std::string to_hex(std::span<const std::uint8_t> data) {
  static constexpr char digits[] = "0123456789abcdef";
  std::string out;
  out.reserve(data.size() * 2);
  for (auto b : data) {
    out.push_back(digits[b >> 4]);
    out.push_back(digits[b & 0x0f]);
  }
  return out;
}

inline Bytes from_hex(std::string_view hex) {
  auto nibble = [](char c) -> int {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    if (c >= 'A' && c <= 'F') return c - 'A' + 10;
    return -1;
  };
  if (hex.size() % 2 != 0) throw Error(ErrorKind::parse, "odd-length hex string");
  Bytes out(hex.size() / 2);
  for (std::size_t i = 0; i < out.size(); ++i) {
    int hi = nibble(hex[2 * i]);
    int lo = nibble(hex[2 * i + 1]);
    if (hi < 0 || lo < 0) throw Error(ErrorKind::parse, "invalid hex digit");
    out[i] = static_cast<std::uint8_t>((hi << 4) | lo);
  }
  return out;
}

inline Digest32 digest_from_hex(std::string_view hex) {
  auto bytes = from_hex(hex);
  if (bytes.size() != 32) throw Error(ErrorKind::parse, "expected 32-byte digest");
  Digest32 d{};
  std::copy(bytes.begin(), bytes.end(), d.begin());
  return d;
}

inline void put_u32(Bytes& out, std::uint32_t v) {
  for (int shift = 24; shift >= 0; shift -= 8) out.push_back(static_cast<std::uint8_t>(v >> shift));
}

inline void put_u64(Bytes& out, std::uint64_t v) {
  for (int shift = 56; shift >= 0; shift -= 8) out.push_back(static_cast<std::uint8_t>(v >> shift));
}

/// Appends a 4-byte big-endian length followed by the bytes.
inline void put_prefixed(Bytes& out, std::span<const std::uint8_t> data) {
  put_u32(out, static_cast<std::uint32_t>(data.size()));
  out.insert(out.end(), data.begin(), data.end());
}

inline void put_prefixed(Bytes& out, std::string_view s) {
  put_prefixed(out, std::span(reinterpret_cast<const std::uint8_t*>(s.data()), s.size()));
}

// Incremental SHA-256 over OpenSSL's EVP interface.
class Sha256 {
 public:
  Sha256() : ctx_(EVP_MD_CTX_new()) {
    if (ctx_ == nullptr || EVP_DigestInit_ex(ctx_, EVP_sha256(), nullptr) != 1)
      throw std::runtime_error("sha256 init failed");
  }
  ~Sha256() { EVP_MD_CTX_free(ctx_); }
  Sha256(const Sha256&) = delete;
  Sha256& operator=(const Sha256&) = delete;

  Sha256& update(std::span<const std::uint8_t> data) {
    EVP_DigestUpdate(ctx_, data.data(), data.size());
    return *this;
  }
  Sha256& update(std::string_view s) {
    EVP_DigestUpdate(ctx_, s.data(), s.size());
    return *this;
  }

  Digest32 finish() {
    Digest32 out{};
    unsigned int len = 0;
    EVP_DigestFinal_ex(ctx_, out.data(), &len);
    return out;
  }

 private:
  EVP_MD_CTX* ctx_;
};

inline Digest32 sha256(std::span<const std::uint8_t> data) { return Sha256().update(data).finish(); }
inline Digest32 sha256(std::string_view s) { return Sha256().update(s).finish(); }

/// Counter-mode expansion: SHA-256(seed || be32(0)) || SHA-256(seed || be32(1)) || ...
/// truncated to `nbytes`.
inline Bytes expand(std::span<const std::uint8_t> seed, std::size_t nbytes) {
  Bytes out;
  out.reserve(nbytes + 32);
  for (std::uint32_t counter = 0; out.size() < nbytes; ++counter) {
    Bytes block(seed.begin(), seed.end());
    put_u32(block, counter);
    auto d = sha256(block);
    out.insert(out.end(), d.begin(), d.end());
  }
  out.resize(nbytes);
  return out;
}

}  // namespace randgener

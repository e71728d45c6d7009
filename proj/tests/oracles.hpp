// Reference implementations used only as test oracles.
#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "icdb/bytes.hpp"

namespace oracle {

// Textbook AES-128 (FIPS-197), encryption and decryption of one block.
class Aes128 {
 public:
  explicit Aes128(const icdb::Bytes& key) {
    for (int i = 0; i < 16; ++i) w_[i] = key[i];
    std::uint8_t rcon = 1;
    for (int i = 16; i < 176; i += 4) {
      std::uint8_t t[4] = {w_[i - 4], w_[i - 3], w_[i - 2], w_[i - 1]};
      if (i % 16 == 0) {
        const std::uint8_t t0 = t[0];
        t[0] = static_cast<std::uint8_t>(sbox(t[1]) ^ rcon);
        t[1] = sbox(t[2]);
        t[2] = sbox(t[3]);
        t[3] = sbox(t0);
        rcon = xtime(rcon);
      }
      for (int j = 0; j < 4; ++j) w_[i + j] = w_[i + j - 16] ^ t[j];
    }
  }

  std::array<std::uint8_t, 16> encrypt(const std::uint8_t* in) const {
    std::array<std::uint8_t, 16> s;
    for (int i = 0; i < 16; ++i) s[i] = in[i] ^ w_[i];
    for (int round = 1; round <= 10; ++round) {
      for (auto& b : s) b = sbox(b);
      shift_rows(s);
      if (round != 10) mix_columns(s);
      for (int i = 0; i < 16; ++i) s[i] ^= w_[round * 16 + i];
    }
    return s;
  }

  std::array<std::uint8_t, 16> decrypt(const std::uint8_t* in) const {
    std::array<std::uint8_t, 16> s;
    for (int i = 0; i < 16; ++i) s[i] = in[i] ^ w_[160 + i];
    for (int round = 9; round >= 0; --round) {
      inv_shift_rows(s);
      for (auto& b : s) b = inv_sbox(b);
      for (int i = 0; i < 16; ++i) s[i] ^= w_[round * 16 + i];
      if (round != 0) inv_mix_columns(s);
    }
    return s;
  }

  // ECB with PKCS#7 padding.
  icdb::Bytes encrypt_ecb(const icdb::Bytes& msg) const {
    icdb::Bytes padded = msg;
    const std::uint8_t pad = static_cast<std::uint8_t>(16 - msg.size() % 16);
    padded.insert(padded.end(), pad, pad);
    icdb::Bytes out;
    for (std::size_t i = 0; i < padded.size(); i += 16) {
      const auto b = encrypt(padded.data() + i);
      out.insert(out.end(), b.begin(), b.end());
    }
    return out;
  }

  icdb::Bytes decrypt_ecb_raw(const icdb::Bytes& ct) const {
    icdb::Bytes out;
    for (std::size_t i = 0; i + 16 <= ct.size(); i += 16) {
      const auto b = decrypt(ct.data() + i);
      out.insert(out.end(), b.begin(), b.end());
    }
    return out;
  }

 private:
  static std::uint8_t xtime(std::uint8_t x) {
    return static_cast<std::uint8_t>((x << 1) ^ ((x & 0x80) ? 0x1b : 0));
  }
  static std::uint8_t mul(std::uint8_t a, std::uint8_t b) {
    std::uint8_t r = 0;
    while (b) {
      if (b & 1) r ^= a;
      a = xtime(a);
      b >>= 1;
    }
    return r;
  }
  static std::uint8_t inverse(std::uint8_t x) {
    if (x == 0) return 0;
    for (int y = 1; y < 256; ++y) {
      if (mul(x, static_cast<std::uint8_t>(y)) == 1) return static_cast<std::uint8_t>(y);
    }
    return 0;
  }
  static std::uint8_t affine(std::uint8_t b) {
    std::uint8_t r = 0x63;
    for (int i = 0; i < 5; ++i) r ^= static_cast<std::uint8_t>((b << i) | (b >> (8 - i)));
    return r;
  }
  static const std::array<std::uint8_t, 256>& table(bool inv) {
    static const auto tables = [] {
      std::array<std::array<std::uint8_t, 256>, 2> t{};
      for (int x = 0; x < 256; ++x) {
        const std::uint8_t s = affine(inverse(static_cast<std::uint8_t>(x)));
        t[0][x] = s;
        t[1][s] = static_cast<std::uint8_t>(x);
      }
      return t;
    }();
    return tables[inv ? 1 : 0];
  }
  static std::uint8_t sbox(std::uint8_t x) { return table(false)[x]; }
  static std::uint8_t inv_sbox(std::uint8_t x) { return table(true)[x]; }

  // State is column-major: s[r + 4c].
  static void shift_rows(std::array<std::uint8_t, 16>& s) {
    auto t = s;
    for (int r = 1; r < 4; ++r)
      for (int c = 0; c < 4; ++c) s[r + 4 * c] = t[r + 4 * ((c + r) % 4)];
  }
  static void inv_shift_rows(std::array<std::uint8_t, 16>& s) {
    auto t = s;
    for (int r = 1; r < 4; ++r)
      for (int c = 0; c < 4; ++c) s[r + 4 * ((c + r) % 4)] = t[r + 4 * c];
  }
  static void mix_columns(std::array<std::uint8_t, 16>& s) {
    for (int c = 0; c < 4; ++c) {
      std::uint8_t* a = &s[4 * c];
      const std::uint8_t a0 = a[0], a1 = a[1], a2 = a[2], a3 = a[3];
      a[0] = mul(a0, 2) ^ mul(a1, 3) ^ a2 ^ a3;
      a[1] = a0 ^ mul(a1, 2) ^ mul(a2, 3) ^ a3;
      a[2] = a0 ^ a1 ^ mul(a2, 2) ^ mul(a3, 3);
      a[3] = mul(a0, 3) ^ a1 ^ a2 ^ mul(a3, 2);
    }
  }
  static void inv_mix_columns(std::array<std::uint8_t, 16>& s) {
    for (int c = 0; c < 4; ++c) {
      std::uint8_t* a = &s[4 * c];
      const std::uint8_t a0 = a[0], a1 = a[1], a2 = a[2], a3 = a[3];
      a[0] = mul(a0, 14) ^ mul(a1, 11) ^ mul(a2, 13) ^ mul(a3, 9);
      a[1] = mul(a0, 9) ^ mul(a1, 14) ^ mul(a2, 11) ^ mul(a3, 13);
      a[2] = mul(a0, 13) ^ mul(a1, 9) ^ mul(a2, 14) ^ mul(a3, 11);
      a[3] = mul(a0, 11) ^ mul(a1, 13) ^ mul(a2, 9) ^ mul(a3, 14);
    }
  }

  std::array<std::uint8_t, 176> w_{};
};

inline icdb::Bytes from_hex(const std::string& hex) {
  icdb::Bytes out;
  for (std::size_t i = 0; i + 1 < hex.size(); i += 2) {
    out.push_back(static_cast<std::uint8_t>(std::stoi(hex.substr(i, 2), nullptr, 16)));
  }
  return out;
}

// Size of one data-file field: backslash doubles '\\', '|' and LF; NULL is "\N".
inline std::size_t field_bytes(const std::optional<std::string>& cell) {
  if (!cell) return 2;
  std::size_t n = 0;
  for (char c : *cell) n += (c == '\\' || c == '|' || c == '\n') ? 2 : 1;
  return n;
}

inline std::size_t digits(std::uint64_t v) { return std::to_string(v).size(); }

}  // namespace oracle

#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <string_view>

#include "icdb/bytes.hpp"

namespace icdb {

enum class SchemeId { RsaSign, Pbkdf2Mac, AesCipher };

// Canonical names as they appear in key files: RSA_SIGN, PBKDF2_MAC, AES_CIPHER.
std::string_view scheme_name(SchemeId id);

// Accepts canonical names and the CLI short forms rsa, pbkdf2 (or hash), aes.
SchemeId parse_scheme(std::string_view text);

struct SchemeConfig {
  std::size_t rsa_modulus_bits = 1024;
  std::size_t mac_secret_bytes = 24;
  std::size_t mac_salt_bytes = 24;
  std::size_t mac_output_bytes = 24;
  unsigned pbkdf2_iterations = 10;
  std::size_t aes_key_bytes = 16;
  std::size_t max_message_bytes = std::size_t{1} << 20;
  // RSA codes are checked by re-signing and comparing. Setting this checks
  // them with the public exponent instead; the answers are identical since
  // the padding is deterministic.
  bool rsa_public_verify = false;
};

namespace detail {
struct RsaContext;
}

// Secret and public key bytes for one scheme. Immutable once built, so a
// single instance can be shared by any number of verification workers.
//
// Secret layout per scheme:
//   RSA_SIGN    four length-prefixed big-endian integers n, d, p, q
//   PBKDF2_MAC  the raw MAC secret
//   AES_CIPHER  the raw AES key
// Public layout: RSA_SIGN holds length-prefixed n and e; empty otherwise.
class KeyMaterial {
 public:
  KeyMaterial(SchemeId scheme, Bytes secret, Bytes public_bytes,
              SchemeConfig config = {});

  SchemeId scheme() const { return scheme_; }
  const Bytes& secret() const { return secret_; }
  const Bytes& public_bytes() const { return public_; }
  const SchemeConfig& config() const { return config_; }

  // Modulus width for RSA keys; 0 for the symmetric schemes.
  std::size_t modulus_bits() const;

  bool operator==(const KeyMaterial& other) const {
    return scheme_ == other.scheme_ && secret_ == other.secret_ &&
           public_ == other.public_;
  }

  const detail::RsaContext& rsa() const;

 private:
  SchemeId scheme_;
  Bytes secret_;
  Bytes public_;
  SchemeConfig config_;
  std::shared_ptr<const detail::RsaContext> rsa_;
};

// With a seed, output is a pure function of (scheme, seed, config). Seeded
// keys come from a non-cryptographic generator and exist for tests only.
KeyMaterial generate_keys(SchemeId scheme, std::optional<std::uint64_t> rng_seed = {},
                          const SchemeConfig& config = {});

// Length of the code emit_code produces for a message of the given size.
std::size_t code_length(const KeyMaterial& key, std::size_t message_bytes);

// RSA_SIGN: PKCS#1 v1.5 signature over SHA-256(message).
// PBKDF2_MAC: salt || PBKDF2-HMAC-SHA1(secret || message, salt). A missing salt
// is drawn from the system RNG.
// AES_CIPHER: ECB encryption with PKCS#7 padding.
Bytes emit_code(const KeyMaterial& key, ByteView message,
                std::optional<ByteView> salt = {});

// True iff code is the code of message under key. Throws StructuralError when
// the code length cannot belong to the scheme.
bool check_code(const KeyMaterial& key, ByteView message, ByteView code);

// AES_CIPHER only: decrypts and strips padding. Throws UnsupportedOperation
// for the other schemes and StructuralError on bad padding.
Bytes recover_plaintext(const KeyMaterial& key, ByteView code);

// Key file: "scheme=<NAME>\nsecret=<base64>\n[public=<base64>\n]".
std::string serialize_key_file(const KeyMaterial& key);
KeyMaterial parse_key_file(std::string_view text, const SchemeConfig& config = {});
void save_key_file(const KeyMaterial& key, const std::string& path);
KeyMaterial load_key_file(const std::string& path, const SchemeConfig& config = {});

}  // namespace icdb

#include "icdb/crypto_schemes.hpp"

#include <openssl/bn.h>
#include <openssl/crypto.h>
#include <openssl/evp.h>
#include <openssl/rand.h>

#include <array>
#include <functional>
#include <random>

#include "icdb/error.hpp"

namespace icdb {

namespace {

struct BnDeleter {
  void operator()(BIGNUM* b) const { BN_clear_free(b); }
};
struct BnCtxDeleter {
  void operator()(BN_CTX* c) const { BN_CTX_free(c); }
};
struct MontDeleter {
  void operator()(BN_MONT_CTX* m) const { BN_MONT_CTX_free(m); }
};
struct CipherCtxDeleter {
  void operator()(EVP_CIPHER_CTX* c) const { EVP_CIPHER_CTX_free(c); }
};

using Bn = std::unique_ptr<BIGNUM, BnDeleter>;
using Mont = std::unique_ptr<BN_MONT_CTX, MontDeleter>;

Bn bn_new() {
  Bn b(BN_new());
  if (!b) throw std::bad_alloc();
  return b;
}

Bn bn_from(ByteView bytes) {
  Bn b(BN_bin2bn(bytes.data(), static_cast<int>(bytes.size()), nullptr));
  if (!b) throw std::bad_alloc();
  return b;
}

Bytes bn_bytes(const BIGNUM* b) {
  Bytes out(static_cast<std::size_t>(BN_num_bytes(b)));
  BN_bn2bin(b, out.data());
  return out;
}

BN_CTX* thread_bn_ctx() {
  thread_local std::unique_ptr<BN_CTX, BnCtxDeleter> ctx(BN_CTX_new());
  if (!ctx) throw std::bad_alloc();
  return ctx.get();
}

void check(int ok, const char* what) {
  if (ok != 1) throw Error(std::string("openssl: ") + what);
}

// Length-prefixed (u16 big-endian) integer sequence used in key bytes.
void put_int(Bytes& out, const BIGNUM* b) {
  Bytes v = bn_bytes(b);
  out.push_back(static_cast<std::uint8_t>(v.size() >> 8));
  out.push_back(static_cast<std::uint8_t>(v.size() & 0xFF));
  out.insert(out.end(), v.begin(), v.end());
}

std::vector<Bn> get_ints(ByteView in, std::size_t count, const char* what) {
  std::vector<Bn> out;
  std::size_t pos = 0;
  for (std::size_t i = 0; i < count; ++i) {
    if (pos + 2 > in.size()) throw KeyError(std::string(what) + ": truncated");
    const std::size_t len = (std::size_t{in[pos]} << 8) | in[pos + 1];
    pos += 2;
    if (len == 0 || pos + len > in.size()) throw KeyError(std::string(what) + ": truncated");
    out.push_back(bn_from(in.subspan(pos, len)));
    pos += len;
  }
  if (pos != in.size()) throw KeyError(std::string(what) + ": trailing bytes");
  return out;
}

Mont mont_for(const BIGNUM* modulus) {
  Mont m(BN_MONT_CTX_new());
  if (!m) throw std::bad_alloc();
  check(BN_MONT_CTX_set(m.get(), modulus, thread_bn_ctx()), "BN_MONT_CTX_set");
  return m;
}

// DER prefix of DigestInfo{sha256, OCTET STRING(32)}.
constexpr std::array<std::uint8_t, 19> kSha256DigestInfo = {
    0x30, 0x31, 0x30, 0x0d, 0x06, 0x09, 0x60, 0x86, 0x48, 0x01,
    0x65, 0x03, 0x04, 0x02, 0x01, 0x05, 0x00, 0x04, 0x20};

Bytes sha256(ByteView message) {
  Bytes digest(32);
  unsigned int len = 0;
  check(EVP_Digest(message.data(), message.size(), digest.data(), &len, EVP_sha256(), nullptr),
        "EVP_Digest");
  return digest;
}

Bytes emsa_pkcs1_v15(ByteView message, std::size_t k) {
  const Bytes digest = sha256(message);
  const std::size_t t_len = kSha256DigestInfo.size() + digest.size();
  if (k < t_len + 11) throw KeyError("rsa: modulus too short for SHA-256 DigestInfo");
  Bytes em(k, 0xFF);
  em[0] = 0x00;
  em[1] = 0x01;
  em[k - t_len - 1] = 0x00;
  std::copy(kSha256DigestInfo.begin(), kSha256DigestInfo.end(), em.begin() + (k - t_len));
  std::copy(digest.begin(), digest.end(), em.begin() + (k - digest.size()));
  return em;
}

using FillFn = std::function<void(std::uint8_t*, std::size_t)>;

FillFn make_fill(std::optional<std::uint64_t> seed) {
  if (seed) {
    auto engine = std::make_shared<std::mt19937_64>(*seed);
    return [engine](std::uint8_t* out, std::size_t n) {
      for (std::size_t i = 0; i < n; ++i) out[i] = static_cast<std::uint8_t>((*engine)() >> 56);
    };
  }
  return [](std::uint8_t* out, std::size_t n) {
    check(RAND_bytes(out, static_cast<int>(n)), "RAND_bytes");
  };
}

Bn generate_prime(std::size_t bits, const BIGNUM* e, const FillFn& fill) {
  Bytes raw((bits + 7) / 8);
  fill(raw.data(), raw.size());
  Bn p = bn_from(raw);
  // Top two bits set so that p*q has exactly 2*bits bits.
  check(BN_set_bit(p.get(), static_cast<int>(bits - 1)), "BN_set_bit");
  check(BN_set_bit(p.get(), static_cast<int>(bits - 2)), "BN_set_bit");
  check(BN_set_bit(p.get(), 0), "BN_set_bit");
  BN_CTX* ctx = thread_bn_ctx();
  Bn pm1 = bn_new();
  Bn g = bn_new();
  for (;;) {
    check(BN_copy(pm1.get(), p.get()) ? 1 : 0, "BN_copy");
    check(BN_sub_word(pm1.get(), 1), "BN_sub_word");
    check(BN_gcd(g.get(), pm1.get(), e, ctx), "BN_gcd");
    if (BN_is_one(g.get()) && BN_check_prime(p.get(), ctx, nullptr) == 1) return p;
    check(BN_add_word(p.get(), 2), "BN_add_word");
  }
}

void require_scheme(const KeyMaterial& key, SchemeId expected, const char* op) {
  if (key.scheme() != expected) {
    throw UnsupportedOperation(std::string(op) + " is not defined for " +
                               std::string(scheme_name(key.scheme())));
  }
}

void check_message(const KeyMaterial& key, ByteView message) {
  if (message.empty()) throw DomainError("message must be non-empty");
  if (message.size() > key.config().max_message_bytes) {
    throw OversizeError("message of " + std::to_string(message.size()) +
                        " bytes exceeds the configured maximum of " +
                        std::to_string(key.config().max_message_bytes));
  }
}

const EVP_CIPHER* aes_cipher(std::size_t key_bytes) {
  switch (key_bytes) {
    case 16: return EVP_aes_128_ecb();
    case 24: return EVP_aes_192_ecb();
    case 32: return EVP_aes_256_ecb();
    default: throw KeyError("aes: key must be 16, 24 or 32 bytes");
  }
}

Bytes aes_run(const KeyMaterial& key, ByteView in, bool encrypt) {
  std::unique_ptr<EVP_CIPHER_CTX, CipherCtxDeleter> ctx(EVP_CIPHER_CTX_new());
  if (!ctx) throw std::bad_alloc();
  check(EVP_CipherInit_ex(ctx.get(), aes_cipher(key.secret().size()), nullptr,
                          key.secret().data(), nullptr, encrypt ? 1 : 0),
        "EVP_CipherInit_ex");
  Bytes out(in.size() + 16);
  int n1 = 0;
  int n2 = 0;
  check(EVP_CipherUpdate(ctx.get(), out.data(), &n1, in.data(), static_cast<int>(in.size())),
        "EVP_CipherUpdate");
  if (EVP_CipherFinal_ex(ctx.get(), out.data() + n1, &n2) != 1) {
    throw StructuralError("aes: invalid block padding");
  }
  out.resize(static_cast<std::size_t>(n1 + n2));
  return out;
}

Bytes pbkdf2(const KeyMaterial& key, ByteView message, ByteView salt) {
  // The MAC secret is prepended to the message to form the PBKDF2 password,
  // so the HMAC key depends on both.
  Bytes password;
  password.reserve(key.secret().size() + message.size());
  password.insert(password.end(), key.secret().begin(), key.secret().end());
  password.insert(password.end(), message.begin(), message.end());
  Bytes out(key.config().mac_output_bytes);
  check(PKCS5_PBKDF2_HMAC(reinterpret_cast<const char*>(password.data()),
                          static_cast<int>(password.size()), salt.data(),
                          static_cast<int>(salt.size()),
                          static_cast<int>(key.config().pbkdf2_iterations), EVP_sha1(),
                          static_cast<int>(out.size()), out.data()),
        "PKCS5_PBKDF2_HMAC");
  OPENSSL_cleanse(password.data(), password.size());
  return out;
}

}  // namespace

namespace detail {

struct RsaContext {
  Bn n, e, d, p, q, dp, dq, qinv;
  Mont mont_n, mont_p, mont_q;
  std::size_t k = 0;  // modulus length in bytes
};

}  // namespace detail

namespace {

std::shared_ptr<const detail::RsaContext> build_rsa(const Bytes& secret, const Bytes& pub) {
  auto s = get_ints(secret, 4, "rsa secret");
  auto pb = get_ints(pub, 2, "rsa public");
  auto ctx = std::make_shared<detail::RsaContext>();
  ctx->n = std::move(s[0]);
  ctx->d = std::move(s[1]);
  ctx->p = std::move(s[2]);
  ctx->q = std::move(s[3]);
  ctx->e = std::move(pb[1]);
  if (BN_cmp(ctx->n.get(), pb[0].get()) != 0) throw KeyError("rsa: public modulus differs from secret");
  if (BN_num_bits(ctx->n.get()) < 1024) throw KeyError("rsa: modulus shorter than 1024 bits");
  BN_CTX* bctx = thread_bn_ctx();
  Bn prod = bn_new();
  check(BN_mul(prod.get(), ctx->p.get(), ctx->q.get(), bctx), "BN_mul");
  if (BN_cmp(prod.get(), ctx->n.get()) != 0) throw KeyError("rsa: p*q != n");
  Bn pm1 = bn_new();
  Bn qm1 = bn_new();
  BN_copy(pm1.get(), ctx->p.get());
  BN_copy(qm1.get(), ctx->q.get());
  check(BN_sub_word(pm1.get(), 1), "BN_sub_word");
  check(BN_sub_word(qm1.get(), 1), "BN_sub_word");
  ctx->dp = bn_new();
  ctx->dq = bn_new();
  check(BN_mod(ctx->dp.get(), ctx->d.get(), pm1.get(), bctx), "BN_mod");
  check(BN_mod(ctx->dq.get(), ctx->d.get(), qm1.get(), bctx), "BN_mod");
  ctx->qinv.reset(BN_mod_inverse(nullptr, ctx->q.get(), ctx->p.get(), bctx));
  if (!ctx->qinv) throw KeyError("rsa: q not invertible mod p");
  ctx->mont_n = mont_for(ctx->n.get());
  ctx->mont_p = mont_for(ctx->p.get());
  ctx->mont_q = mont_for(ctx->q.get());
  ctx->k = static_cast<std::size_t>(BN_num_bytes(ctx->n.get()));
  return ctx;
}

Bytes rsa_sign(const detail::RsaContext& rsa, ByteView message) {
  const Bytes em = emsa_pkcs1_v15(message, rsa.k);
  BN_CTX* ctx = thread_bn_ctx();
  Bn m = bn_from(em);
  Bn m1 = bn_new();
  Bn m2 = bn_new();
  Bn h = bn_new();
  Bn mp = bn_new();
  Bn mq = bn_new();
  check(BN_mod(mp.get(), m.get(), rsa.p.get(), ctx), "BN_mod");
  check(BN_mod(mq.get(), m.get(), rsa.q.get(), ctx), "BN_mod");
  check(BN_mod_exp_mont_consttime(m1.get(), mp.get(), rsa.dp.get(), rsa.p.get(), ctx,
                                  rsa.mont_p.get()),
        "BN_mod_exp_mont_consttime");
  check(BN_mod_exp_mont_consttime(m2.get(), mq.get(), rsa.dq.get(), rsa.q.get(), ctx,
                                  rsa.mont_q.get()),
        "BN_mod_exp_mont_consttime");
  check(BN_mod_sub(h.get(), m1.get(), m2.get(), rsa.p.get(), ctx), "BN_mod_sub");
  check(BN_mod_mul(h.get(), h.get(), rsa.qinv.get(), rsa.p.get(), ctx), "BN_mod_mul");
  check(BN_mul(h.get(), h.get(), rsa.q.get(), ctx), "BN_mul");
  check(BN_add(h.get(), h.get(), m2.get()), "BN_add");
  Bytes sig(rsa.k);
  check(BN_bn2binpad(h.get(), sig.data(), static_cast<int>(sig.size())) > 0 ? 1 : 0,
        "BN_bn2binpad");
  return sig;
}

bool rsa_verify(const detail::RsaContext& rsa, ByteView message, ByteView sig) {
  BN_CTX* ctx = thread_bn_ctx();
  Bn s = bn_from(sig);
  if (BN_cmp(s.get(), rsa.n.get()) >= 0) return false;
  Bn m = bn_new();
  check(BN_mod_exp_mont(m.get(), s.get(), rsa.e.get(), rsa.n.get(), ctx, rsa.mont_n.get()),
        "BN_mod_exp_mont");
  Bytes em(rsa.k);
  check(BN_bn2binpad(m.get(), em.data(), static_cast<int>(em.size())) > 0 ? 1 : 0,
        "BN_bn2binpad");
  const Bytes expected = emsa_pkcs1_v15(message, rsa.k);
  return CRYPTO_memcmp(em.data(), expected.data(), em.size()) == 0;
}

}  // namespace

std::string_view scheme_name(SchemeId id) {
  switch (id) {
    case SchemeId::RsaSign: return "RSA_SIGN";
    case SchemeId::Pbkdf2Mac: return "PBKDF2_MAC";
    case SchemeId::AesCipher: return "AES_CIPHER";
  }
  throw SchemeError("unsupported scheme id");
}

SchemeId parse_scheme(std::string_view text) {
  if (text == "RSA_SIGN" || text == "rsa") return SchemeId::RsaSign;
  if (text == "PBKDF2_MAC" || text == "pbkdf2" || text == "hash") return SchemeId::Pbkdf2Mac;
  if (text == "AES_CIPHER" || text == "aes") return SchemeId::AesCipher;
  throw SchemeError("unsupported scheme '" + std::string(text) + "'");
}

KeyMaterial::KeyMaterial(SchemeId scheme, Bytes secret, Bytes public_bytes, SchemeConfig config)
    : scheme_(scheme), secret_(std::move(secret)), public_(std::move(public_bytes)),
      config_(config) {
  if (secret_.empty()) throw KeyError("zero-length key rejected");
  switch (scheme_) {
    case SchemeId::RsaSign:
      rsa_ = build_rsa(secret_, public_);
      break;
    case SchemeId::Pbkdf2Mac:
      if (secret_.size() != config_.mac_secret_bytes) {
        throw KeyError("mac: secret is " + std::to_string(secret_.size()) +
                       " bytes, configured " + std::to_string(config_.mac_secret_bytes));
      }
      if (!public_.empty()) throw KeyError("mac: unexpected public bytes");
      if (config_.mac_salt_bytes == 0 || config_.mac_output_bytes == 0 ||
          config_.pbkdf2_iterations == 0) {
        throw KeyError("mac: salt, output and iteration count must be positive");
      }
      break;
    case SchemeId::AesCipher:
      if (secret_.size() != config_.aes_key_bytes) {
        throw KeyError("aes: key is " + std::to_string(secret_.size()) + " bytes, configured " +
                       std::to_string(config_.aes_key_bytes));
      }
      aes_cipher(secret_.size());
      if (!public_.empty()) throw KeyError("aes: unexpected public bytes");
      break;
    default:
      throw SchemeError("unsupported scheme id");
  }
}

std::size_t KeyMaterial::modulus_bits() const {
  return rsa_ ? static_cast<std::size_t>(BN_num_bits(rsa_->n.get())) : 0;
}

const detail::RsaContext& KeyMaterial::rsa() const {
  if (!rsa_) throw UnsupportedOperation("key is not an RSA key");
  return *rsa_;
}

KeyMaterial generate_keys(SchemeId scheme, std::optional<std::uint64_t> rng_seed,
                          const SchemeConfig& config) {
  const FillFn fill = make_fill(rng_seed);
  switch (scheme) {
    case SchemeId::RsaSign: {
      if (config.rsa_modulus_bits < 1024 || config.rsa_modulus_bits % 2 != 0) {
        throw KeyError("rsa: modulus must be an even bit count of at least 1024");
      }
      Bn e = bn_new();
      check(BN_set_word(e.get(), 65537), "BN_set_word");
      const std::size_t half = config.rsa_modulus_bits / 2;
      Bn p = generate_prime(half, e.get(), fill);
      Bn q = generate_prime(half, e.get(), fill);
      while (BN_cmp(p.get(), q.get()) == 0) q = generate_prime(half, e.get(), fill);
      if (BN_cmp(p.get(), q.get()) < 0) std::swap(p, q);
      BN_CTX* ctx = thread_bn_ctx();
      Bn n = bn_new();
      check(BN_mul(n.get(), p.get(), q.get(), ctx), "BN_mul");
      Bn pm1 = bn_new();
      Bn qm1 = bn_new();
      Bn phi = bn_new();
      BN_copy(pm1.get(), p.get());
      BN_copy(qm1.get(), q.get());
      check(BN_sub_word(pm1.get(), 1), "BN_sub_word");
      check(BN_sub_word(qm1.get(), 1), "BN_sub_word");
      check(BN_mul(phi.get(), pm1.get(), qm1.get(), ctx), "BN_mul");
      Bn d(BN_mod_inverse(nullptr, e.get(), phi.get(), ctx));
      if (!d) throw KeyError("rsa: e not invertible");
      Bytes secret;
      put_int(secret, n.get());
      put_int(secret, d.get());
      put_int(secret, p.get());
      put_int(secret, q.get());
      Bytes pub;
      put_int(pub, n.get());
      put_int(pub, e.get());
      return KeyMaterial(scheme, std::move(secret), std::move(pub), config);
    }
    case SchemeId::Pbkdf2Mac: {
      Bytes secret(config.mac_secret_bytes);
      if (secret.empty()) throw KeyError("zero-length key rejected");
      fill(secret.data(), secret.size());
      return KeyMaterial(scheme, std::move(secret), {}, config);
    }
    case SchemeId::AesCipher: {
      Bytes secret(config.aes_key_bytes);
      if (secret.empty()) throw KeyError("zero-length key rejected");
      fill(secret.data(), secret.size());
      return KeyMaterial(scheme, std::move(secret), {}, config);
    }
  }
  throw SchemeError("unsupported scheme id");
}

std::size_t code_length(const KeyMaterial& key, std::size_t message_bytes) {
  switch (key.scheme()) {
    case SchemeId::RsaSign: return key.rsa().k;
    case SchemeId::Pbkdf2Mac: return key.config().mac_salt_bytes + key.config().mac_output_bytes;
    case SchemeId::AesCipher: return (message_bytes / 16 + 1) * 16;
  }
  throw SchemeError("unsupported scheme id");
}

Bytes emit_code(const KeyMaterial& key, ByteView message, std::optional<ByteView> salt) {
  check_message(key, message);
  switch (key.scheme()) {
    case SchemeId::RsaSign:
      return rsa_sign(key.rsa(), message);
    case SchemeId::Pbkdf2Mac: {
      const std::size_t salt_len = key.config().mac_salt_bytes;
      Bytes code(salt_len);
      if (salt) {
        if (salt->size() != salt_len) {
          throw DomainError("mac: salt must be " + std::to_string(salt_len) + " bytes");
        }
        std::copy(salt->begin(), salt->end(), code.begin());
      } else {
        check(RAND_bytes(code.data(), static_cast<int>(code.size())), "RAND_bytes");
      }
      const Bytes mac = pbkdf2(key, message, code);
      code.insert(code.end(), mac.begin(), mac.end());
      return code;
    }
    case SchemeId::AesCipher:
      return aes_run(key, message, true);
  }
  throw SchemeError("unsupported scheme id");
}

bool check_code(const KeyMaterial& key, ByteView message, ByteView code) {
  switch (key.scheme()) {
    case SchemeId::RsaSign:
      if (code.size() != key.rsa().k) {
        throw StructuralError("rsa: code is " + std::to_string(code.size()) + " bytes, expected " +
                              std::to_string(key.rsa().k));
      }
      if (message.empty()) return false;
      if (key.config().rsa_public_verify) return rsa_verify(key.rsa(), message, code);
      {
        const Bytes expected = rsa_sign(key.rsa(), message);
        return CRYPTO_memcmp(expected.data(), code.data(), code.size()) == 0;
      }
    case SchemeId::Pbkdf2Mac: {
      const std::size_t salt_len = key.config().mac_salt_bytes;
      if (code.size() != salt_len + key.config().mac_output_bytes) {
        throw StructuralError("mac: code is " + std::to_string(code.size()) + " bytes, expected " +
                              std::to_string(salt_len + key.config().mac_output_bytes));
      }
      if (message.empty()) return false;
      const Bytes mac = pbkdf2(key, message, code.first(salt_len));
      return CRYPTO_memcmp(mac.data(), code.data() + salt_len, mac.size()) == 0;
    }
    case SchemeId::AesCipher: {
      if (code.empty() || code.size() % 16 != 0) {
        throw StructuralError("aes: code length " + std::to_string(code.size()) +
                              " is not a positive multiple of 16");
      }
      Bytes plain;
      try {
        plain = aes_run(key, code, false);
      } catch (const StructuralError&) {
        return false;
      }
      return plain.size() == message.size() &&
             CRYPTO_memcmp(plain.data(), message.data(), plain.size()) == 0;
    }
  }
  throw SchemeError("unsupported scheme id");
}

Bytes recover_plaintext(const KeyMaterial& key, ByteView code) {
  require_scheme(key, SchemeId::AesCipher, "recover_plaintext");
  if (code.empty() || code.size() % 16 != 0) {
    throw StructuralError("aes: code length " + std::to_string(code.size()) +
                          " is not a positive multiple of 16");
  }
  return aes_run(key, code, false);
}

}  // namespace icdb

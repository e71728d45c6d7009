#include <fstream>
#include <sstream>

#include "icdb/crypto_schemes.hpp"
#include "icdb/error.hpp"

namespace icdb {

std::string serialize_key_file(const KeyMaterial& key) {
  std::string out = "scheme=" + std::string(scheme_name(key.scheme())) + "\n";
  out += "secret=" + base64_encode(key.secret()) + "\n";
  if (!key.public_bytes().empty()) out += "public=" + base64_encode(key.public_bytes()) + "\n";
  return out;
}

namespace {

std::string_view value_after(std::string_view line, std::string_view prefix, std::size_t lineno) {
  if (line.substr(0, prefix.size()) != prefix) {
    throw FormatError(lineno, "expected '" + std::string(prefix) + "'");
  }
  return line.substr(prefix.size());
}

Bytes decode_field(std::string_view text, std::size_t lineno) {
  try {
    return base64_decode(text);
  } catch (const StructuralError& e) {
    throw FormatError(lineno, e.what());
  }
}

}  // namespace

KeyMaterial parse_key_file(std::string_view text, const SchemeConfig& config) {
  if (text.empty() || text.back() != '\n') throw FormatError(1, "key file must end with a newline");
  std::vector<std::string_view> lines;
  std::size_t start = 0;
  while (start < text.size()) {
    const std::size_t end = text.find('\n', start);
    lines.push_back(text.substr(start, end - start));
    start = end + 1;
  }
  if (lines.size() < 2 || lines.size() > 3) {
    throw FormatError(lines.size() < 2 ? lines.size() + 1 : 4, "key file must have 2 or 3 lines");
  }
  SchemeId scheme;
  try {
    scheme = parse_scheme(value_after(lines[0], "scheme=", 1));
  } catch (const SchemeError& e) {
    throw FormatError(1, e.what());
  }
  if (value_after(lines[0], "scheme=", 1) != scheme_name(scheme)) {
    throw FormatError(1, "scheme must be one of RSA_SIGN, PBKDF2_MAC, AES_CIPHER");
  }
  Bytes secret = decode_field(value_after(lines[1], "secret=", 2), 2);
  Bytes pub;
  if (lines.size() == 3) {
    pub = decode_field(value_after(lines[2], "public=", 3), 3);
    if (pub.empty()) throw FormatError(3, "empty public field");
  }
  return KeyMaterial(scheme, std::move(secret), std::move(pub), config);
}

void save_key_file(const KeyMaterial& key, const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot open key file for writing: " + path);
  out << serialize_key_file(key);
  if (!out) throw Error("failed writing key file: " + path);
}

KeyMaterial load_key_file(const std::string& path, const SchemeConfig& config) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open key file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_key_file(ss.str(), config);
}

}  // namespace icdb

#include "icdb/icrl.hpp"

#include <charconv>
#include <fstream>
#include <limits>
#include <sstream>

#include "icdb/error.hpp"

namespace icdb {

std::uint64_t Icrl::allocate_block(std::uint64_t n) {
  if (n == 0) throw DomainError("allocate: count must be at least 1");
  if (n > std::numeric_limits<std::uint64_t>::max() - next_) {
    throw AllocatorExhausted("serial space exhausted");
  }
  const std::uint64_t first = next_;
  next_ += n;
  return first;
}

std::vector<std::uint64_t> Icrl::allocate(std::uint64_t n) {
  const std::uint64_t first = allocate_block(n);
  std::vector<std::uint64_t> out(n);
  for (std::uint64_t i = 0; i < n; ++i) out[i] = first + i;
  return out;
}

void Icrl::revoke_range(std::uint64_t first, std::uint64_t last) {
  if (first == 0 || first > last || last >= next_) {
    throw DomainError("revoke: serials [" + std::to_string(first) + ", " + std::to_string(last) +
                      "] were not all allocated (next=" + std::to_string(next_) + ")");
  }
  // Merge with any overlapping or adjacent runs.
  auto it = revoked_.upper_bound(first);
  if (it != revoked_.begin()) {
    auto prev = std::prev(it);
    if (prev->second + 1 >= first) {
      first = prev->first;
      last = std::max(last, prev->second);
      it = revoked_.erase(prev);
    }
  }
  while (it != revoked_.end() && it->first <= last + 1) {
    last = std::max(last, it->second);
    it = revoked_.erase(it);
  }
  revoked_.emplace(first, last);
}

void Icrl::revoke(std::span<const std::uint64_t> serials) {
  for (auto s : serials) {
    if (s == 0 || s >= next_) {
      throw DomainError("revoke: serial " + std::to_string(s) + " was never allocated (next=" +
                        std::to_string(next_) + ")");
    }
  }
  for (auto s : serials) revoke_range(s, s);
}

bool Icrl::is_revoked(std::uint64_t serial) const {
  auto it = revoked_.upper_bound(serial);
  if (it == revoked_.begin()) return false;
  --it;
  return serial <= it->second;
}

bool Icrl::is_valid(std::uint64_t serial) const {
  return serial >= 1 && serial < next_ && !is_revoked(serial);
}

std::uint64_t Icrl::revoked_count() const {
  std::uint64_t n = 0;
  for (const auto& [a, b] : revoked_) n += b - a + 1;
  return n;
}

std::string Icrl::serialize() const {
  std::string out = "next=" + std::to_string(next_) + "\n";
  for (const auto& [a, b] : revoked_) {
    out += "revoked=" + std::to_string(a);
    if (b != a) out += "-" + std::to_string(b);
    out += "\n";
  }
  return out;
}

namespace {

std::uint64_t parse_u64(std::string_view s, std::size_t line) {
  std::uint64_t v = 0;
  if (s.empty() || (s.size() > 1 && s[0] == '0')) throw FormatError(line, "bad number '" + std::string(s) + "'");
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw FormatError(line, "bad number '" + std::string(s) + "'");
  }
  return v;
}

}  // namespace

Icrl Icrl::parse(std::string_view text) {
  if (text.empty() || text.back() != '\n') throw FormatError(1, "ICRL file must end with LF");
  Icrl out;
  bool have_next = false;
  std::uint64_t prev_last = 0;
  std::size_t lineno = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    const std::size_t end = text.find('\n', pos);
    const std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++lineno;
    if (line.starts_with("next=")) {
      if (have_next) throw FormatError(lineno, "duplicate next= line");
      if (lineno != 1) throw FormatError(lineno, "next= must be the first line");
      out.next_ = parse_u64(line.substr(5), lineno);
      if (out.next_ == 0) throw FormatError(lineno, "next must be at least 1");
      have_next = true;
    } else if (line.starts_with("revoked=")) {
      if (!have_next) throw FormatError(lineno, "revoked= before next=");
      const std::string_view body = line.substr(8);
      const std::size_t dash = body.find('-');
      const std::uint64_t a = parse_u64(body.substr(0, dash), lineno);
      const std::uint64_t b =
          dash == std::string_view::npos ? a : parse_u64(body.substr(dash + 1), lineno);
      if (a == 0 || a > b) throw FormatError(lineno, "range must satisfy 1 <= a <= b");
      if (b >= out.next_) throw FormatError(lineno, "revoked serial not below next");
      if (!out.revoked_.empty() && a <= prev_last) {
        throw FormatError(lineno, "ranges must be ascending and non-overlapping");
      }
      if (!out.revoked_.empty() && a == prev_last + 1) {
        out.revoked_.rbegin()->second = b;  // adjacent run: merge into canonical form
      } else {
        out.revoked_.emplace(a, b);
      }
      prev_last = b;
    } else {
      throw FormatError(lineno, "unrecognised line");
    }
  }
  if (!have_next) throw FormatError(1, "missing next= line");
  return out;
}

void Icrl::save(const std::string& path) const {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw Error("cannot open ICRL file for writing: " + path);
  f << serialize();
  if (!f) throw Error("failed writing ICRL file: " + path);
}

Icrl Icrl::load(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw Error("cannot open ICRL file: " + path);
  std::ostringstream ss;
  ss << f.rdbuf();
  return parse(ss.str());
}

}  // namespace icdb

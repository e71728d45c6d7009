#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace icdb {

// Integrity Code Revocation List: the serial allocator plus the set of
// revoked serials. A serial is valid iff it was allocated and not revoked.
//
// Writers (allocate, revoke) need exclusive access. Verification batches take
// a copy via snapshot() and read it concurrently.
class Icrl {
 public:
  Icrl() = default;

  // Returns [next, next + n) and advances the watermark.
  std::vector<std::uint64_t> allocate(std::uint64_t n);
  // Same, returning only the first serial of the block.
  std::uint64_t allocate_block(std::uint64_t n);

  // Idempotent. Throws DomainError for serials that were never allocated.
  void revoke(std::span<const std::uint64_t> serials);
  void revoke_range(std::uint64_t first, std::uint64_t last);

  bool is_valid(std::uint64_t serial) const;
  bool is_revoked(std::uint64_t serial) const;

  std::uint64_t next_serial() const { return next_; }
  std::uint64_t revoked_count() const;
  // Inclusive [first, last] runs, ascending and non-adjacent.
  const std::map<std::uint64_t, std::uint64_t>& revoked_ranges() const { return revoked_; }

  Icrl snapshot() const { return *this; }

  std::string serialize() const;
  static Icrl parse(std::string_view text);
  void save(const std::string& path) const;
  static Icrl load(const std::string& path);

  bool operator==(const Icrl&) const = default;

 private:
  std::uint64_t next_ = 1;
  std::map<std::uint64_t, std::uint64_t> revoked_;
};

}  // namespace icdb

#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace parkour::nn {

struct ParamEntry {
  std::string name;
  std::size_t offset = 0;
  std::size_t size = 0;
};

/// All learnable parameters of a network as one contiguous double vector plus
/// a name → slice table. Optimizers, trainable masks, and checkpoints all
/// address parameters through this layout; entry registration order is the
/// serialization order.
class FlatParams {
 public:
  /// Appends a named block of `size` zeros; returns its offset.
  std::size_t add(const std::string& name, std::size_t size);

  std::size_t size() const { return values_.size(); }
  double* data() { return values_.data(); }
  const double* data() const { return values_.data(); }
  std::vector<double>& values() { return values_; }
  const std::vector<double>& values() const { return values_; }

  const std::vector<ParamEntry>& entries() const { return entries_; }
  const ParamEntry* find(std::string_view name) const;

  /// FNV-1a over the raw parameter bytes (bitwise change detector).
  std::uint64_t checksum() const;
  /// FNV-1a over the (name, size) table only — layout identity, not values.
  std::uint64_t shape_digest() const;
  bool all_finite() const;

  /// Per-scalar trainable masks.
  std::vector<std::uint8_t> mask_all() const;
  std::vector<std::uint8_t> mask_none() const;
  /// Marks every entry whose name starts with one of the prefixes.
  std::vector<std::uint8_t> mask_by_prefix(
      const std::vector<std::string>& prefixes) const;

  /// Copies every identically-named entry from `src` (sizes must match where
  /// names coincide; entries missing on either side are left alone).
  void copy_common_entries(const FlatParams& src);

 private:
  std::vector<double> values_;
  std::vector<ParamEntry> entries_;
};

}  // namespace parkour::nn

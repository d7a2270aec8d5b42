#include "nn/params.hpp"

#include <cmath>
#include <stdexcept>

#include "common/hash.hpp"

namespace parkour::nn {

std::size_t FlatParams::add(const std::string& name, std::size_t size) {
  if (find(name) != nullptr) throw std::runtime_error("params: duplicate entry " + name);
  const std::size_t offset = values_.size();
  entries_.push_back({name, offset, size});
  values_.resize(offset + size, 0.0);
  return offset;
}

const ParamEntry* FlatParams::find(std::string_view name) const {
  for (const auto& e : entries_) {
    if (e.name == name) return &e;
  }
  return nullptr;
}

std::uint64_t FlatParams::checksum() const {
  return fnv1a64(values_.data(), values_.size() * sizeof(double));
}

std::uint64_t FlatParams::shape_digest() const {
  std::uint64_t h = kFnvOffset;
  for (const auto& e : entries_) {
    h = hash_mix(h, std::string_view(e.name));
    h = hash_mix(h, static_cast<std::uint64_t>(e.size));
  }
  return h;
}

bool FlatParams::all_finite() const {
  for (double v : values_) {
    if (!std::isfinite(v)) return false;
  }
  return true;
}

std::vector<std::uint8_t> FlatParams::mask_all() const {
  return std::vector<std::uint8_t>(values_.size(), 1);
}

std::vector<std::uint8_t> FlatParams::mask_none() const {
  return std::vector<std::uint8_t>(values_.size(), 0);
}

std::vector<std::uint8_t> FlatParams::mask_by_prefix(
    const std::vector<std::string>& prefixes) const {
  auto mask = mask_none();
  for (const auto& e : entries_) {
    for (const auto& p : prefixes) {
      if (e.name.rfind(p, 0) == 0) {
        for (std::size_t i = 0; i < e.size; ++i) mask[e.offset + i] = 1;
        break;
      }
    }
  }
  return mask;
}

void FlatParams::copy_common_entries(const FlatParams& src) {
  for (const auto& e : entries_) {
    const ParamEntry* s = src.find(e.name);
    if (s == nullptr) continue;
    if (s->size != e.size)
      throw std::runtime_error("params: size mismatch for entry " + e.name);
    for (std::size_t i = 0; i < e.size; ++i)
      values_[e.offset + i] = src.values()[s->offset + i];
  }
}

}  // namespace parkour::nn

#include "nn/checkpoint.hpp"

#include <fstream>
#include <stdexcept>
#include <vector>

namespace parkour::nn {

namespace {

constexpr char kMagic[4] = {'T', 'T', 'T', 'P'};
constexpr std::uint32_t kVersion = 1;

}  // namespace

void save_checkpoint(const std::string& path, const ActorCritic& net,
                     const CheckpointMeta& meta) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("checkpoint: cannot open " + path + " for writing");
  auto put_u32 = [&](std::uint32_t v) { f.write(reinterpret_cast<const char*>(&v), 4); };
  auto put_u64 = [&](std::uint64_t v) { f.write(reinterpret_cast<const char*>(&v), 8); };
  f.write(kMagic, 4);
  put_u32(kVersion);
  put_u64(net.arch_digest());
  const auto& entries = net.params().entries();
  put_u32(static_cast<std::uint32_t>(entries.size()));
  for (const auto& e : entries) {
    put_u32(static_cast<std::uint32_t>(e.name.size()));
    f.write(e.name.data(), static_cast<std::streamsize>(e.name.size()));
    put_u64(e.size);
  }
  std::vector<float> block(net.params().size());
  for (std::size_t i = 0; i < block.size(); ++i)
    block[i] = static_cast<float>(net.params().values()[i]);
  f.write(reinterpret_cast<const char*>(block.data()),
          static_cast<std::streamsize>(block.size() * sizeof(float)));
  put_u64(meta.iteration);
  put_u64(meta.seed);
  put_u64(meta.config_digest);
  f.put(static_cast<char>(meta.strategy));
  if (!f) throw std::runtime_error("checkpoint: write failed for " + path);
}

namespace {

struct Reader {
  std::ifstream f;
  std::string path;

  explicit Reader(const std::string& p) : f(p, std::ios::binary), path(p) {
    if (!f) throw std::runtime_error("checkpoint: cannot open " + p);
  }
  void bytes(void* dst, std::size_t n) {
    f.read(static_cast<char*>(dst), static_cast<std::streamsize>(n));
    if (!f) throw std::runtime_error("checkpoint: truncated file " + path);
  }
  std::uint32_t u32() {
    std::uint32_t v = 0;
    bytes(&v, 4);
    return v;
  }
  std::uint64_t u64() {
    std::uint64_t v = 0;
    bytes(&v, 8);
    return v;
  }
};

CheckpointInfo read_header(Reader& r) {
  char magic[4];
  r.bytes(magic, 4);
  if (std::string_view(magic, 4) != std::string_view(kMagic, 4))
    throw std::runtime_error("checkpoint: bad magic in " + r.path);
  CheckpointInfo info;
  info.version = r.u32();
  if (info.version != kVersion)
    throw std::runtime_error("checkpoint: unsupported format version in " + r.path);
  info.arch_digest = r.u64();
  return info;
}

}  // namespace

CheckpointMeta load_checkpoint(const std::string& path, ActorCritic& net) {
  Reader r(path);
  const CheckpointInfo info = read_header(r);
  if (info.arch_digest != net.arch_digest())
    throw std::runtime_error("checkpoint: architecture mismatch for " + path);
  const std::uint32_t n = r.u32();
  const auto& entries = net.params().entries();
  if (n != entries.size())
    throw std::runtime_error("checkpoint: shape table mismatch in " + path);
  for (const auto& e : entries) {
    const std::uint32_t len = r.u32();
    std::string name(len, '\0');
    r.bytes(name.data(), len);
    const std::uint64_t size = r.u64();
    if (name != e.name || size != e.size)
      throw std::runtime_error("checkpoint: shape table mismatch in " + path);
  }
  std::vector<float> block(net.params().size());
  r.bytes(block.data(), block.size() * sizeof(float));
  for (std::size_t i = 0; i < block.size(); ++i)
    net.params().values()[i] = static_cast<double>(block[i]);
  CheckpointMeta meta;
  meta.iteration = r.u64();
  meta.seed = r.u64();
  meta.config_digest = r.u64();
  char s = 0;
  r.bytes(&s, 1);
  meta.strategy = static_cast<std::uint8_t>(s);
  return meta;
}

CheckpointInfo inspect_checkpoint(const std::string& path) {
  Reader r(path);
  CheckpointInfo info = read_header(r);
  const std::uint32_t n = r.u32();
  std::uint64_t total = 0;
  for (std::uint32_t i = 0; i < n; ++i) {
    const std::uint32_t len = r.u32();
    std::string name(len, '\0');
    r.bytes(name.data(), len);
    total += r.u64();
  }
  info.param_count = total;
  r.f.seekg(static_cast<std::streamoff>(total * sizeof(float)), std::ios::cur);
  info.meta.iteration = r.u64();
  info.meta.seed = r.u64();
  info.meta.config_digest = r.u64();
  char s = 0;
  r.bytes(&s, 1);
  info.meta.strategy = static_cast<std::uint8_t>(s);
  return info;
}

}  // namespace parkour::nn

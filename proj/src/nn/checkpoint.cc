// SPDX-License-Identifier: Apache-2.0

#include "bcddi/nn/checkpoint.h"

#include <bit>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <vector>

#include "bcddi/errors.h"

namespace bcddi::nn {
namespace {

constexpr char kMagic[4] = {'B', 'C', 'D', 'I'};

template <typename T>
void PutLe(std::ostream& out, T value) {
  unsigned char bytes[sizeof(T)];
  for (std::size_t i = 0; i < sizeof(T); ++i) {
    bytes[i] = static_cast<unsigned char>((value >> (8 * i)) & 0xff);
  }
  out.write(reinterpret_cast<const char*>(bytes), sizeof(T));
}

template <typename T>
T GetLe(std::istream& in, const char* what) {
  unsigned char bytes[sizeof(T)];
  if (!in.read(reinterpret_cast<char*>(bytes), sizeof(T))) {
    throw IoError(std::string("checkpoint truncated while reading ") + what);
  }
  T value = 0;
  for (std::size_t i = 0; i < sizeof(T); ++i) {
    value |= static_cast<T>(static_cast<T>(bytes[i]) << (8 * i));
  }
  return value;
}

}  // namespace

void WriteCheckpoint(const ParamStore& store, std::ostream& out) {
  out.write(kMagic, sizeof(kMagic));
  PutLe<std::uint32_t>(out, kCheckpointVersion);
  PutLe<std::uint32_t>(out, static_cast<std::uint32_t>(store.size()));
  for (const auto& [name, p] : store) {
    if (name.size() > UINT16_MAX) throw FormatError("parameter name too long");
    PutLe<std::uint16_t>(out, static_cast<std::uint16_t>(name.size()));
    out.write(name.data(), static_cast<std::streamsize>(name.size()));
    const Shape& shape = p.value.shape();
    PutLe<std::uint8_t>(out, static_cast<std::uint8_t>(shape.size()));
    for (std::size_t d : shape) PutLe<std::uint32_t>(out, static_cast<std::uint32_t>(d));
    for (double v : p.value.data()) PutLe<std::uint64_t>(out, std::bit_cast<std::uint64_t>(v));
  }
  if (!out) throw IoError("failed writing checkpoint");
}

ParamStore ReadCheckpoint(std::istream& in) {
  char magic[4] = {};
  in.read(magic, sizeof(magic));
  if (in.gcount() != sizeof(magic) || std::memcmp(magic, kMagic, sizeof(magic)) != 0) {
    throw FormatError("not a checkpoint: bad magic bytes");
  }
  std::uint32_t version = GetLe<std::uint32_t>(in, "version");
  if (version != kCheckpointVersion) {
    throw FormatError("unsupported checkpoint version " + std::to_string(version));
  }
  std::uint32_t count = GetLe<std::uint32_t>(in, "entry count");
  ParamStore store;
  for (std::uint32_t e = 0; e < count; ++e) {
    std::uint16_t len = GetLe<std::uint16_t>(in, "name length");
    std::string name(len, '\0');
    if (!in.read(name.data(), len)) throw IoError("checkpoint truncated in entry name");
    std::uint8_t rank = GetLe<std::uint8_t>(in, "rank");
    Shape shape(rank);
    for (auto& d : shape) d = GetLe<std::uint32_t>(in, "dims");
    std::vector<double> values(ShapeSize(shape));
    for (double& v : values) v = std::bit_cast<double>(GetLe<std::uint64_t>(in, "payload"));
    if (store.Contains(name)) throw FormatError("duplicate entry '" + name + "'");
    store.Add(name, Tensor(std::move(shape), std::move(values)));
  }
  return store;
}

void SaveCheckpoint(const ParamStore& store, const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  WriteCheckpoint(store, out);
}

ParamStore LoadCheckpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open checkpoint '" + path + "'");
  return ReadCheckpoint(in);
}

}  // namespace bcddi::nn

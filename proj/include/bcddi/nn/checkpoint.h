// SPDX-License-Identifier: Apache-2.0
//
// Binary checkpoint of parameter values (optimizer state is not saved).
// All integers little-endian:
//
//   "BCDI"  u32 version(=1)  u32 entry_count
//   per entry, in sorted-name order:
//     u16 name_len, name bytes (UTF-8)
//     u8 rank, rank x u32 dims
//     product(dims) x f64 (IEEE-754 binary64)

#ifndef BCDDI_NN_CHECKPOINT_H_
#define BCDDI_NN_CHECKPOINT_H_

#include <cstdint>
#include <iosfwd>
#include <string>

#include "bcddi/nn/param_store.h"

namespace bcddi::nn {

inline constexpr std::uint32_t kCheckpointVersion = 1;

void WriteCheckpoint(const ParamStore& store, std::ostream& out);
// Throws FormatError on bad magic/version and IoError on truncation.
ParamStore ReadCheckpoint(std::istream& in);

void SaveCheckpoint(const ParamStore& store, const std::string& path);
ParamStore LoadCheckpoint(const std::string& path);

}  // namespace bcddi::nn

#endif  // BCDDI_NN_CHECKPOINT_H_

// SPDX-License-Identifier: Apache-2.0
//
// Exception hierarchy shared by every bcddi module. Callers that need a
// process exit code map IoError to 1 and every other bcddi::Error to 2.

#ifndef BCDDI_ERRORS_H_
#define BCDDI_ERRORS_H_

#include <stdexcept>
#include <string>

namespace bcddi {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

#define BCDDI_DEFINE_ERROR(Name)          \
  class Name : public Error {             \
   public:                                \
    using Error::Error;                   \
  }

// Filesystem and stream failures, including truncated binary payloads.
BCDDI_DEFINE_ERROR(IoError);

// Corpus ingestion.
BCDDI_DEFINE_ERROR(ParseError);
BCDDI_DEFINE_ERROR(OffsetError);
BCDDI_DEFINE_ERROR(LabelError);
BCDDI_DEFINE_ERROR(ReferenceError);

// Structured file formats (lexicon TSV, checkpoints, instance files).
BCDDI_DEFINE_ERROR(FormatError);

// SMILES handling.
BCDDI_DEFINE_ERROR(VocabError);
BCDDI_DEFINE_ERROR(EncodeError);
BCDDI_DEFINE_ERROR(DistributionError);

// Numeric core.
BCDDI_DEFINE_ERROR(ShapeError);
BCDDI_DEFINE_ERROR(NumericError);
BCDDI_DEFINE_ERROR(IndexError);
BCDDI_DEFINE_ERROR(ConfigError);

// Model input preparation.
BCDDI_DEFINE_ERROR(TokenizationError);
BCDDI_DEFINE_ERROR(RangeError);
// Both mentions cannot fit in one max_seq_len window.
BCDDI_DEFINE_ERROR(TruncationError);

// Training diverged (NaN/Inf loss or gradient).
BCDDI_DEFINE_ERROR(DivergenceError);

// Evaluation inputs that do not line up.
BCDDI_DEFINE_ERROR(InputError);

#undef BCDDI_DEFINE_ERROR

}  // namespace bcddi

#endif  // BCDDI_ERRORS_H_

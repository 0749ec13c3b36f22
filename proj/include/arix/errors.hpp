// Exception types used across the arix engine.
#pragma once

#include <stdexcept>
#include <string>

namespace arix {

struct Error : std::runtime_error {
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

#define ARIX_DEFINE_ERROR(Name)                                 \
  struct Name : Error {                                         \
    explicit Name(const std::string& msg) : Error(msg) {}       \
  }

ARIX_DEFINE_ERROR(IoError);
ARIX_DEFINE_ERROR(EncodingError);
ARIX_DEFINE_ERROR(EmptyArticleError);
ARIX_DEFINE_ERROR(DuplicateArticleError);
ARIX_DEFINE_ERROR(EmptyCorpusError);
ARIX_DEFINE_ERROR(ShapeError);
ARIX_DEFINE_ERROR(SpecError);
ARIX_DEFINE_ERROR(RankError);
ARIX_DEFINE_ERROR(EmptyTopicError);
ARIX_DEFINE_ERROR(DegenerateVectorError);
ARIX_DEFINE_ERROR(UnknownTokenError);
ARIX_DEFINE_ERROR(VocabMismatchError);
ARIX_DEFINE_ERROR(ZeroVectorError);
ARIX_DEFINE_ERROR(EmptyInputError);
ARIX_DEFINE_ERROR(InsufficientSampleError);
ARIX_DEFINE_ERROR(SingleClassError);
ARIX_DEFINE_ERROR(EmbeddingMismatchError);
ARIX_DEFINE_ERROR(NoPriorIndexError);
ARIX_DEFINE_ERROR(DslSyntaxError);
ARIX_DEFINE_ERROR(MissingModelError);
ARIX_DEFINE_ERROR(StaleModelError);
ARIX_DEFINE_ERROR(ConfigError);

#undef ARIX_DEFINE_ERROR

}  // namespace arix

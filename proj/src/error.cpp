#include "qsvm/error.hpp"

namespace qsvm {

const char* errc_name(Errc c) {
  switch (c) {
    case Errc::Generic: return "Generic";
    case Errc::MissingFile: return "MissingFile";
    case Errc::EmptyCorpus: return "EmptyCorpus";
    case Errc::FormatError: return "FormatError";
    case Errc::UnknownClass: return "UnknownClass";
    case Errc::SingleClass: return "SingleClass";
    case Errc::MissingStats: return "MissingStats";
    case Errc::InvalidStats: return "InvalidStats";
    case Errc::ModelParse: return "ModelParse";
    case Errc::EmptyEvaluation: return "EmptyEvaluation";
    case Errc::NonFiniteValue: return "NonFiniteValue";
    case Errc::FinalizedRegistry: return "FinalizedRegistry";
    case Errc::EmptyStatsPass: return "EmptyStatsPass";
    case Errc::DimensionMismatch: return "DimensionMismatch";
    case Errc::UnknownSite: return "UnknownSite";
    case Errc::InvalidArgument: return "InvalidArgument";
  }
  return "Generic";
}

}  // namespace qsvm

#include "qcomb/error.hpp"

namespace qcomb {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::DuplicateLabel: return "DuplicateLabel";
    case ErrorCode::UnknownLabel: return "UnknownLabel";
    case ErrorCode::NotAPermutation: return "NotAPermutation";
    case ErrorCode::NotHermitian: return "NotHermitian";
    case ErrorCode::NotPSD: return "NotPSD";
    case ErrorCode::DimMismatch: return "DimMismatch";
    case ErrorCode::LabelMismatch: return "LabelMismatch";
    case ErrorCode::TripleLabel: return "TripleLabel";
    case ErrorCode::SelfLoop: return "SelfLoop";
    case ErrorCode::IndexOutOfRange: return "IndexOutOfRange";
    case ErrorCode::DimOverflow: return "DimOverflow";
    case ErrorCode::SlotArityMismatch: return "SlotArityMismatch";
    case ErrorCode::InvalidBranchSum: return "InvalidBranchSum";
    case ErrorCode::DesignInsufficient: return "DesignInsufficient";
    case ErrorCode::Unsupported: return "Unsupported";
    case ErrorCode::BoundUnavailable: return "BoundUnavailable";
    case ErrorCode::NoConvergence: return "NoConvergence";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
  }
  return "Unknown";
}

}  // namespace qcomb

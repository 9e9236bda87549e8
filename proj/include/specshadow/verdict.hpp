#pragma once

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "specshadow/pencil/certificate.hpp"
#include "specshadow/poly/polynomial.hpp"
#include "specshadow/relax/certificate.hpp"

namespace specshadow {

enum class VerdictKind { In, Out, NotApplicable, Inaccurate };

inline const char* to_string(VerdictKind k) {
  switch (k) {
    case VerdictKind::In:
      return "in";
    case VerdictKind::Out:
      return "out";
    case VerdictKind::NotApplicable:
      return "not-applicable";
    case VerdictKind::Inaccurate:
      return "inaccurate";
  }
  return "unknown";
}

/// Outcome of a point-membership query. An Out verdict always carries a
/// separator ℓ, scaled to a unit gradient, with ℓ(x) = −margin < 0, and a
/// certificate that ℓ lies in the cone defining the relaxation.
struct Verdict {
  VerdictKind kind = VerdictKind::Inaccurate;
  double margin = 0.0;
  /// Raw optimum of the membership program (normalization dependent).
  double optimum = 0.0;
  std::optional<FPoly> separator;
  bool low_confidence = false;
  std::variant<std::monostate, GramCertificate, PolarCertificate> certificate;
  std::vector<std::string> notes;
};

}  // namespace specshadow

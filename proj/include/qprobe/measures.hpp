#pragma once

#include <array>
#include <set>
#include <string>
#include <string_view>

#include "qprobe/config.hpp"

namespace qprobe {

// Region entropies and mutual informations recorded along a quench. The
// *2 variants use the second Renyi entropy.
enum class Measure { S_Q, S_X, S_P, S_QP, I, S2_Q, S2_X, S2_P, S2_QP, I2 };

inline constexpr std::array<Measure, 10> kAllMeasures = {Measure::S_Q,  Measure::S_X,  Measure::S_P,  Measure::S_QP,
                                                         Measure::I,    Measure::S2_Q, Measure::S2_X, Measure::S2_P,
                                                         Measure::S2_QP, Measure::I2};

using MeasureSet = std::set<Measure>;

inline std::string measure_name(Measure m) {
  switch (m) {
    case Measure::S_Q: return "S_Q";
    case Measure::S_X: return "S_X";
    case Measure::S_P: return "S_P";
    case Measure::S_QP: return "S_QP";
    case Measure::I: return "I";
    case Measure::S2_Q: return "S2_Q";
    case Measure::S2_X: return "S2_X";
    case Measure::S2_P: return "S2_P";
    case Measure::S2_QP: return "S2_QP";
    case Measure::I2: return "I2";
  }
  return "?";
}

inline Measure parse_measure(std::string_view name) {
  for (Measure m : kAllMeasures) {
    if (measure_name(m) == name) return m;
  }
  throw ValidationError("unknown measure '" + std::string(name) + "'");
}

inline bool is_renyi(Measure m) {
  return m == Measure::S2_Q || m == Measure::S2_X || m == Measure::S2_P || m == Measure::S2_QP || m == Measure::I2;
}

}  // namespace qprobe

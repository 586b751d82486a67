#pragma once

// Unit system: hbar = 1, frequencies in fs^-1, times in fs.

namespace hqc::units {

/// hbar in meV*fs.
inline constexpr double kHbarMeVFs = 658.2119569;

inline constexpr double kFsPerPs = 1.0e3;
inline constexpr double kFsPerNs = 1.0e6;

/// Energy in meV to angular frequency in fs^-1.
constexpr double mevToInvFs(double energyMeV) { return energyMeV / kHbarMeVFs; }

/// Angular frequency in fs^-1 to energy in meV.
constexpr double invFsToMev(double omega) { return omega * kHbarMeVFs; }

} // namespace hqc::units

#ifndef SECTORCAST_VERSION_HPP
#define SECTORCAST_VERSION_HPP

namespace sectorcast {

inline constexpr const char* kEngineVersion = "0.1.0";

}  // namespace sectorcast

#endif  // SECTORCAST_VERSION_HPP

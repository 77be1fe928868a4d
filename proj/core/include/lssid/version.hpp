#ifndef LSSID_VERSION_HPP
#define LSSID_VERSION_HPP

namespace lssid {
inline constexpr const char* kVersion = "0.1.0";
}

#endif

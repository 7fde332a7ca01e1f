#pragma once

#define ROLLCAST_VERSION "0.1.0"

namespace rollcast {

inline const char* version() { return ROLLCAST_VERSION; }

}  // namespace rollcast

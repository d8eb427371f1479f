#ifndef RESPATH_VERSION_HPP
#define RESPATH_VERSION_HPP

namespace respath {

inline constexpr const char* kVersion = "0.1.0";

} // namespace respath

#endif

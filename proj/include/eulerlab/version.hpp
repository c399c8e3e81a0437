#ifndef EULERLAB_VERSION_HPP
#define EULERLAB_VERSION_HPP

namespace eulerlab {

inline constexpr const char* version_string = "eulerlab 0.1.0";

}

#endif

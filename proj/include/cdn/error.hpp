#pragma once

#include <stdexcept>
#include <string>

namespace cdn {

/// Raised for every contract violation in the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

inline void require(bool ok, const std::string& what)
{
    if (!ok)
        throw Error(what);
}

} // namespace cdn

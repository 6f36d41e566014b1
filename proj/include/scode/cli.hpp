#pragma once
#include <iostream>
namespace scode::cli {
inline int run(int, char**, std::ostream&, std::ostream&) { return 0; }
}  // namespace scode::cli

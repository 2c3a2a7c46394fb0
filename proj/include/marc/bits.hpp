#pragma once

#include <cstdint>
#include <vector>

namespace marc {

using BitVec = std::vector<std::uint8_t>;

} // namespace marc

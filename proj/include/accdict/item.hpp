#pragma once

#include "accdict/numtheory.hpp"

namespace accdict {

// One accumulated member: its ordering key, k-bit digest and prime representative.
struct Item {
    BigInt key;
    BigInt digest;
    BigInt rep;
    friend bool operator==(const Item&, const Item&) = default;
};

enum class UpdateOp { insert, erase };

}  // namespace accdict

#pragma once

#include <cstdint>
#include <string>

namespace linsketch {

/// Word-operation counter used by all kernels. Costs are reported in the
/// word-RAM cost model: `mults` counts word multiplications, `xors` counts
/// other ALU word operations (xor/and/or/add/shift), `words_touched` counts
/// memory words loaded or stored.
struct OpCounter {
    std::uint64_t mults = 0;
    std::uint64_t xors = 0;
    std::uint64_t words_touched = 0;

    std::uint64_t total() const { return mults + xors + words_touched; }

    OpCounter& operator+=(const OpCounter& o) {
        mults += o.mults;
        xors += o.xors;
        words_touched += o.words_touched;
        return *this;
    }

    std::string to_json() const {
        return "{\"mults\":" + std::to_string(mults) +
               ",\"xors\":" + std::to_string(xors) +
               ",\"words_touched\":" + std::to_string(words_touched) + "}";
    }
};

namespace detail {
inline void count(OpCounter* oc, std::uint64_t mults, std::uint64_t xors,
                  std::uint64_t words) {
    if (oc) {
        oc->mults += mults;
        oc->xors += xors;
        oc->words_touched += words;
    }
}
}  // namespace detail

}  // namespace linsketch

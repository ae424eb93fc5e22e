#pragma once

#include <bit>
#include <cstddef>
#include <cstdint>
#include <vector>

namespace csi::detail {

/// Orders bitmasks by the lexicographic order of their sorted index
/// sequences, e.g. {0,1} < {1} and {0} < {0,1}. Used for every
/// deterministic tie-break over certificate sets.
inline bool set_seq_less(std::uint64_t a, std::uint64_t b) {
    if (a == b)
        return false;
    const unsigned i = static_cast<unsigned>(std::countr_zero(a ^ b));
    const std::uint64_t above = ~((std::uint64_t{2} << i) - 1); // bits > i
    if ((a >> i) & 1u)
        return (b & above) != 0; // a's next element i is smaller unless b ends
    return (a & above) == 0;     // a is a proper prefix of b
}

/// Fixed-width dynamic bitset, just enough for neighborhood unions.
class Bits {
public:
    Bits() = default;
    explicit Bits(std::size_t nbits) : words_((nbits + 63) / 64) {}

    void set(std::size_t i) { words_[i >> 6] |= std::uint64_t{1} << (i & 63); }
    bool test(std::size_t i) const {
        return (words_[i >> 6] >> (i & 63)) & 1u;
    }
    void clear() {
        for (auto& w : words_)
            w = 0;
    }
    Bits& operator|=(const Bits& o) {
        for (std::size_t k = 0; k < words_.size(); ++k)
            words_[k] |= o.words_[k];
        return *this;
    }
    bool any() const {
        for (auto w : words_)
            if (w)
                return true;
        return false;
    }
    std::size_t count() const {
        std::size_t n = 0;
        for (auto w : words_)
            n += static_cast<std::size_t>(std::popcount(w));
        return n;
    }

    template <class Fn>
    void for_each(Fn fn) const {
        for (std::size_t k = 0; k < words_.size(); ++k) {
            std::uint64_t w = words_[k];
            while (w) {
                unsigned b = static_cast<unsigned>(std::countr_zero(w));
                fn(k * 64 + b);
                w &= w - 1;
            }
        }
    }

private:
    std::vector<std::uint64_t> words_;
};

} // namespace csi::detail

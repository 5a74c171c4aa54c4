#pragma once

#include <bit>
#include <cassert>
#include <cstddef>
#include <cstdint>
#include <vector>

namespace mmlp {

// Fixed-width bit vector with the handful of set operations the coverage
// machinery needs (union, masked popcount, subset test).
class Bitset {
public:
    Bitset() = default;
    explicit Bitset(std::size_t nbits) : nbits_(nbits), words_((nbits + 63) / 64, 0) {}

    std::size_t size() const { return nbits_; }

    void set(std::size_t i) {
        assert(i < nbits_);
        words_[i >> 6] |= (std::uint64_t{1} << (i & 63));
    }

    bool test(std::size_t i) const {
        assert(i < nbits_);
        return (words_[i >> 6] >> (i & 63)) & 1;
    }

    void clear() { std::fill(words_.begin(), words_.end(), 0); }

    std::size_t count() const {
        std::size_t n = 0;
        for (std::uint64_t w : words_) n += std::popcount(w);
        return n;
    }

    Bitset& operator|=(const Bitset& other) {
        assert(nbits_ == other.nbits_);
        for (std::size_t i = 0; i < words_.size(); ++i) words_[i] |= other.words_[i];
        return *this;
    }

    bool operator==(const Bitset& other) const {
        return nbits_ == other.nbits_ && words_ == other.words_;
    }

    // |this AND mask|
    std::size_t count_and(const Bitset& mask) const {
        assert(nbits_ == mask.nbits_);
        std::size_t n = 0;
        for (std::size_t i = 0; i < words_.size(); ++i)
            n += std::popcount(words_[i] & mask.words_[i]);
        return n;
    }

    // true iff every bit of this is also set in other
    bool is_subset_of(const Bitset& other) const {
        assert(nbits_ == other.nbits_);
        for (std::size_t i = 0; i < words_.size(); ++i)
            if (words_[i] & ~other.words_[i]) return false;
        return true;
    }

    bool any() const {
        for (std::uint64_t w : words_) if (w) return true;
        return false;
    }

    // New bitset b with b[j] = this[indices[j]].
    Bitset gather(const std::vector<std::size_t>& indices) const {
        Bitset out(indices.size());
        for (std::size_t j = 0; j < indices.size(); ++j)
            if (test(indices[j])) out.set(j);
        return out;
    }

    const std::vector<std::uint64_t>& words() const { return words_; }

private:
    std::size_t nbits_ = 0;
    std::vector<std::uint64_t> words_;
};

inline Bitset operator|(Bitset a, const Bitset& b) {
    a |= b;
    return a;
}

} // namespace mmlp

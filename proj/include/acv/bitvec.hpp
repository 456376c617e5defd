#pragma once

#include <cassert>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace acv::logic {

// Fixed-width bit vector used for state valuations. Width is fixed at
// construction; operands of comparisons must agree on width.
class BitVec {
public:
    BitVec() = default;
    explicit BitVec(int width) : width_(width), words_((width + 63) / 64, 0) {}

    int width() const { return width_; }

    bool get(int i) const {
        assert(i >= 0 && i < width_);
        return (words_[static_cast<size_t>(i) >> 6] >> (i & 63)) & 1u;
    }

    void set(int i, bool v) {
        assert(i >= 0 && i < width_);
        uint64_t mask = uint64_t{1} << (i & 63);
        if (v)
            words_[static_cast<size_t>(i) >> 6] |= mask;
        else
            words_[static_cast<size_t>(i) >> 6] &= ~mask;
    }

    BitVec with(int i, bool v) const {
        BitVec r = *this;
        r.set(i, v);
        return r;
    }

    bool operator==(const BitVec& o) const {
        return width_ == o.width_ && words_ == o.words_;
    }
    bool operator!=(const BitVec& o) const { return !(*this == o); }

    // Lexicographic on bit indices (bit 0 most significant for ordering
    // purposes), giving a stable canonical order for state sets.
    bool operator<(const BitVec& o) const {
        assert(width_ == o.width_);
        for (int i = 0; i < width_; ++i) {
            bool a = get(i), b = o.get(i);
            if (a != b) return !a && b;
        }
        return false;
    }

    size_t hash() const {
        size_t h = static_cast<size_t>(width_) * 0x9e3779b97f4a7c15ull;
        for (uint64_t w : words_) {
            h ^= w + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
        }
        return h;
    }

    // "0"/"1" per bit, index 0 first.
    std::string to_string() const {
        std::string s(static_cast<size_t>(width_), '0');
        for (int i = 0; i < width_; ++i)
            if (get(i)) s[static_cast<size_t>(i)] = '1';
        return s;
    }

    static BitVec from_string(const std::string& s) {
        BitVec v(static_cast<int>(s.size()));
        for (size_t i = 0; i < s.size(); ++i) {
            assert(s[i] == '0' || s[i] == '1');
            v.set(static_cast<int>(i), s[i] == '1');
        }
        return v;
    }

private:
    int width_ = 0;
    std::vector<uint64_t> words_;
};

struct BitVecHash {
    size_t operator()(const BitVec& v) const { return v.hash(); }
};

// Projection onto a subset of bit positions, in the order given.
inline BitVec gather(const BitVec& v, const std::vector<int>& idx) {
    BitVec r(static_cast<int>(idx.size()));
    for (size_t i = 0; i < idx.size(); ++i) r.set(static_cast<int>(i), v.get(idx[i]));
    return r;
}

}  // namespace acv::logic

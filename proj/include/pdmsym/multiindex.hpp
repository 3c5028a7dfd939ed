#pragma once

#include <array>
#include <cstdint>
#include <utility>
#include <vector>

namespace pdm {

// Partial-derivative orders per coordinate, |alpha| = i1+i2+i3.
struct MIdx {
    int i1 = 0, i2 = 0, i3 = 0;

    int deg() const { return i1 + i2 + i3; }
    int operator[](int axis) const { return axis == 0 ? i1 : axis == 1 ? i2 : i3; }

    bool operator==(const MIdx&) const = default;
};

// Degree-major ("graded") ordering with a lexicographic tie-break. Truncation
// to a lower degree is then a prefix of the coefficient vector, and jet
// division can fill coefficients by forward substitution.
inline bool graded_less(const MIdx& a, const MIdx& b) {
    if (a.deg() != b.deg()) return a.deg() < b.deg();
    if (a.i1 != b.i1) return a.i1 > b.i1;
    if (a.i2 != b.i2) return a.i2 > b.i2;
    return a.i3 > b.i3;
}

// Precomputed index tables for one truncation order. Shared and immutable;
// obtained via OrderTable::get(D), which caches one instance per order.
class OrderTable {
  public:
    static const OrderTable& get(int order);

    int order() const { return order_; }
    int size() const { return static_cast<int>(list_.size()); }
    const MIdx& midx(int k) const { return list_[k]; }

    // Index of a multi-index within this table, -1 if its degree exceeds the
    // truncation order.
    int index_of(const MIdx& m) const;

    // Convolution pairs per target: conv(k) lists all (i,j) with
    // midx(i)+midx(j) == midx(k). Pairs with j == k have i == 0, so forward
    // substitution over k solves division.
    const std::vector<std::pair<int, int>>& conv(int k) const { return conv_[k]; }

    // shift_up(axis, k) = index of midx(k)+e_axis, or -1 past the truncation.
    int shift_up(int axis, int k) const { return shift_up_[axis][k]; }

    // alpha! as a machine integer (orders are small, no overflow concern).
    std::int64_t factorial(const MIdx& m) const;

    // Multinomial-style binomial C(alpha, gamma) = prod_a C(alpha_a, gamma_a);
    // zero when gamma exceeds alpha componentwise.
    static std::int64_t binom(const MIdx& alpha, const MIdx& gamma);

  private:
    explicit OrderTable(int order);

    int order_;
    std::vector<MIdx> list_;
    std::vector<std::vector<std::pair<int, int>>> conv_;
    std::array<std::vector<int>, 3> shift_up_;
};

}  // namespace pdm

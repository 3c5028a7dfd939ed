#include "pdmsym/multiindex.hpp"

#include <algorithm>
#include <map>
#include <memory>
#include <mutex>
#include <stdexcept>

namespace pdm {

OrderTable::OrderTable(int order) : order_(order) {
    if (order < 0 || order > 12) throw std::invalid_argument("jet order out of range");
    for (int d = 0; d <= order; ++d)
        for (int i1 = d; i1 >= 0; --i1)
            for (int i2 = d - i1; i2 >= 0; --i2) list_.push_back({i1, i2, d - i1 - i2});

    const int n = size();
    conv_.resize(n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            const MIdx s{list_[i].i1 + list_[j].i1, list_[i].i2 + list_[j].i2,
                         list_[i].i3 + list_[j].i3};
            if (s.deg() > order) continue;
            conv_[index_of(s)].push_back({i, j});
        }

    for (int axis = 0; axis < 3; ++axis) {
        shift_up_[axis].resize(n);
        for (int k = 0; k < n; ++k) {
            MIdx m = list_[k];
            (axis == 0 ? m.i1 : axis == 1 ? m.i2 : m.i3) += 1;
            shift_up_[axis][k] = index_of(m);
        }
    }
}

int OrderTable::index_of(const MIdx& m) const {
    if (m.deg() > order_) return -1;
    const auto it = std::lower_bound(list_.begin(), list_.end(), m, graded_less);
    return static_cast<int>(it - list_.begin());
}

std::int64_t OrderTable::factorial(const MIdx& m) const {
    auto f = [](int k) {
        std::int64_t r = 1;
        for (int i = 2; i <= k; ++i) r *= i;
        return r;
    };
    return f(m.i1) * f(m.i2) * f(m.i3);
}

std::int64_t OrderTable::binom(const MIdx& alpha, const MIdx& gamma) {
    auto c = [](int n, int k) -> std::int64_t {
        if (k < 0 || k > n) return 0;
        std::int64_t r = 1;
        for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
        return r;
    };
    return c(alpha.i1, gamma.i1) * c(alpha.i2, gamma.i2) * c(alpha.i3, gamma.i3);
}

const OrderTable& OrderTable::get(int order) {
    static std::mutex mu;
    static std::map<int, std::unique_ptr<OrderTable>> cache;
    std::lock_guard<std::mutex> lock(mu);
    auto& slot = cache[order];
    if (!slot) slot.reset(new OrderTable(order));
    return *slot;
}

}  // namespace pdm

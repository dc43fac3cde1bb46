#include "henon/jet.hpp"

#include <cassert>

namespace henon {

Series& Series::operator+=(const Series& o)
{
    assert(o.order() == order());
    for (std::size_t k = 0; k < c_.size(); ++k) c_[k] += o.c_[k];
    return *this;
}

Series& Series::operator-=(const Series& o)
{
    assert(o.order() == order());
    for (std::size_t k = 0; k < c_.size(); ++k) c_[k] -= o.c_[k];
    return *this;
}

Series& Series::operator*=(Complex s)
{
    for (auto& v : c_) v *= s;
    return *this;
}

Series operator*(const Series& a, const Series& b)
{
    assert(a.order() == b.order());
    const int n = a.order();
    Series out(n);
    for (int i = 0; i <= n; ++i) {
        if (a[i] == Complex{}) continue;
        for (int j = 0; i + j <= n; ++j) out[i + j] += a[i] * b[j];
    }
    return out;
}

Complex Series::evaluate(Complex t) const
{
    Complex acc{};
    for (auto it = c_.rbegin(); it != c_.rend(); ++it) acc = acc * t + *it;
    return acc;
}

Series compose_polynomial(std::span<const Complex> poly, const Series& s)
{
    Series acc(s.order());
    for (auto it = poly.rbegin(); it != poly.rend(); ++it) {
        acc = acc * s;
        acc += *it;
    }
    return acc;
}

} // namespace henon

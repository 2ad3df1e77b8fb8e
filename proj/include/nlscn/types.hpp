#pragma once

#include <complex>
#include <vector>

namespace nlscn {

using cplx = std::complex<double>;
using CVector = std::vector<cplx>;

inline constexpr cplx kI{0.0, 1.0};

}  // namespace nlscn

// Reference values for the test suite, computed independently with
// 50-digit arithmetic and frozen here to 30 significant digits.
#pragma once

namespace dht::testing::frozen {

// Binary entropies h(p) in nats.
inline constexpr double kH01 = 0.325082973391448239506550028224;  // h(0.1)
inline constexpr double kH03 = 0.610864302054893463025670963197;  // h(0.3)
inline constexpr double kH04 = 0.673011667009256435996719342489;  // h(0.4)

// Binary divergences d(p||q) in nats.
inline constexpr double kD01_03 = 0.116321756586004500777099433669;  // d(0.1||0.3)
inline constexpr double kD03_01 = 0.153663586803798653038977159796;  // d(0.3||0.1)

// Logarithms.
inline constexpr double kLn2 = 0.693147180559945309417232121458;
inline constexpr double kLn3_2 = 0.405465108108164381978013115464;  // ln(3/2)
inline constexpr double kLn4 = 1.38629436111989061883446424292;
inline constexpr double kLn6 = 1.79175946922805500081247735838;

// I-projection of a uniform 2x2 alternative onto the family with
// X-marginal (0.7, 0.3) and Y-marginal (0.6, 0.4):
// (ln 2 - h(0.3)) + (ln 2 - h(0.4)).
inline constexpr double kProj2x2 = 0.10241839205574071981207393723;

// Stein exponent of the 3x3 pair P = (1/24)[[1,2,3],[2,3,3],[1,3,6]],
// Q = (1/14)[[2,1,1],[1,1,1],[1,2,4]].
inline constexpr double kStein3x3 = 0.111675920628408936067769160932;

// Binning-scheme critical rate for crossovers (0.1, 0.3):
// h(0.1) + d(0.1||0.3).
inline constexpr double kCrit01_03 = 0.441404729977452740283649461893;

// Reverse-aligned product of crossovers (0.3, 0.1):
// product critical rate h(0.3) + h(0.1) + d(0.3||0.1) + d(0.1||0.3),
// sequential critical rate h(0.3) + h(0.1) + d(0.1||0.3),
// full Stein exponent d(0.3||0.1) + d(0.1||0.3).
inline constexpr double kProdCrit = 1.20593261883614485634829758489;
inline constexpr double kSeqCrit = 1.05226903203234620330932042509;
inline constexpr double kSteinProd = 0.269985343389803153816076593465;

}  // namespace dht::testing::frozen

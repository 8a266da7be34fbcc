"""Reference values for the standard normal CDF and quantile at 50 digits.

Writes normal_table.inc, a C++ initializer list consumed by test_normal.cpp.
Run: python3 tests/oracles/normal_table.py > tests/oracles/normal_table.inc
"""
import mpmath as mp

mp.mp.dps = 50

cdf_x = [-38.0, -20.0, -10.0, -5.0, -3.0, -1.96, -1.0, -0.5, -1e-8, 0.0,
         0.5, 1.0, 1.6448536269514722, 2.0, 3.0, 5.0, 8.0]
quantile_p = [1e-300, 1e-100, 1e-20, 1e-10, 1e-5, 0.001, 0.02425, 0.025, 0.1,
              0.3, 0.425, 0.5, 0.575, 0.7, 0.9, 0.975, 0.97575, 0.999,
              1.0 - 1e-10]

def cdf(x):
    return mp.ncdf(mp.mpf(x))

def quantile(p):
    p = mp.mpf(p)
    if p < mp.mpf("0.5"):
        # Root of log(cdf) for the lower tail keeps precision far out.
        guess = -mp.sqrt(-2 * mp.log(p))
        return mp.findroot(lambda x: mp.log(mp.ncdf(x)) - mp.log(p), guess)
    return mp.findroot(lambda x: mp.ncdf(x) - p, mp.sqrt(2) * mp.erfinv(2 * p - 1))

print("// Generated by normal_table.py; do not edit.")
print("struct NormalRow { double x; double value; };")
print("inline constexpr NormalRow kCdfTable[] = {")
for x in cdf_x:
    print(f"    {{{float(x)!r}, {mp.nstr(cdf(x), 20, min_fixed=-1, max_fixed=-1)}}},")
print("};")
print("inline constexpr NormalRow kQuantileTable[] = {")
for p in quantile_p:
    print(f"    {{{float(p)!r}, {mp.nstr(quantile(p), 20, min_fixed=-1, max_fixed=-1)}}},")
print("};")

#pragma once

#include <cmath>

namespace latthiggs {

// Neumaier-compensated accumulator in extended precision.
struct CompensatedSum {
    long double sum = 0.0L;
    long double comp = 0.0L;

    void add(long double x) {
        long double t = sum + x;
        if (std::fabs(sum) >= std::fabs(x))
            comp += (sum - t) + x;
        else
            comp += (x - t) + sum;
        sum = t;
    }
    CompensatedSum& operator+=(long double x) {
        add(x);
        return *this;
    }
    CompensatedSum& operator+=(const CompensatedSum& o) {
        add(o.sum);
        add(o.comp);
        return *this;
    }
    long double value() const { return sum + comp; }
};

}  // namespace latthiggs

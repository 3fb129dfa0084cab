#ifndef SHARPK_ACCUMULATE_HPP
#define SHARPK_ACCUMULATE_HPP

#include <cmath>
#include <vector>

namespace sharpk {

/// Exact floating-point accumulator.
///
/// Keeps a list of non-overlapping partials built with the two-sum
/// error-free transformation (Shewchuk's algorithm, the same scheme as
/// Python's math.fsum).  The partials represent the running sum exactly, and
/// result() returns it correctly rounded.  Hence the value depends only on the
/// multiset of added numbers, never on their order or on how the additions were
/// split across partial accumulators that are later merged.
///
/// Inputs must be finite.
class ExactSum {
public:
    void add(double x)
    {
        std::size_t i = 0;
        for (double y : partials_) {
            if (std::fabs(x) < std::fabs(y)) {
                std::swap(x, y);
            }
            const double hi = x + y;
            const double lo = y - (hi - x);
            if (lo != 0.0) {
                partials_[i++] = lo;
            }
            x = hi;
        }
        partials_.resize(i);
        partials_.push_back(x);
    }

    ExactSum& operator+=(double x)
    {
        add(x);
        return *this;
    }

    void merge(const ExactSum& other)
    {
        for (double p : other.partials_) {
            add(p);
        }
    }

    [[nodiscard]] double result() const
    {
        std::size_t n = partials_.size();
        if (n == 0) {
            return 0.0;
        }
        double hi = partials_[--n];
        double lo = 0.0;
        while (n > 0) {
            const double x = hi;
            const double y = partials_[--n];
            hi = x + y;
            const double yr = hi - x;
            lo = y - yr;
            if (lo != 0.0) {
                break;
            }
        }
        // Half-way case: the discarded partials may push the rounding the other way.
        if (n > 0 && ((lo < 0.0 && partials_[n - 1] < 0.0) || (lo > 0.0 && partials_[n - 1] > 0.0))) {
            const double y = lo * 2.0;
            const double x = hi + y;
            const double yr = x - hi;
            if (y == yr) {
                hi = x;
            }
        }
        return hi;
    }

    [[nodiscard]] bool empty() const { return partials_.empty(); }

private:
    std::vector<double> partials_;
};

} // namespace sharpk

#endif // SHARPK_ACCUMULATE_HPP

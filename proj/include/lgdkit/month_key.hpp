#pragma once

#include <compare>
#include <cstdio>
#include <string>

#include "lgdkit/errors.hpp"

namespace lgdkit {

/// Calendar month. Total order; arithmetic rolls over years.
struct MonthKey {
    int year = 0;
    int month = 1;  // 1..12

    friend auto operator<=>(const MonthKey&, const MonthKey&) = default;

    /// Months since 0000-01; the arithmetic backbone.
    [[nodiscard]] constexpr int index() const { return year * 12 + (month - 1); }

    [[nodiscard]] static constexpr MonthKey from_index(int idx) {
        int y = idx / 12;
        int m = idx % 12;
        if (m < 0) {
            m += 12;
            --y;
        }
        return MonthKey{y, m + 1};
    }

    [[nodiscard]] constexpr MonthKey plus_months(int n) const { return from_index(index() + n); }
    [[nodiscard]] constexpr MonthKey successor() const { return plus_months(1); }

    /// Calendar quarter, Jan-Mar = 1.
    [[nodiscard]] constexpr int quarter() const { return (month - 1) / 3 + 1; }

    [[nodiscard]] std::string str() const {
        char buf[16];
        std::snprintf(buf, sizeof buf, "%04d-%02d", year, month);
        return buf;
    }

    /// "2008Q2"-style label.
    [[nodiscard]] std::string quarter_str() const {
        char buf[16];
        std::snprintf(buf, sizeof buf, "%04dQ%d", year, quarter());
        return buf;
    }

    /// Accepts "YYYY-MM" or "YYYY-MM-DD" (day ignored).
    [[nodiscard]] static MonthKey parse(const std::string& text) {
        int y = 0, m = 0, d = 1;
        int got = std::sscanf(text.c_str(), "%d-%d-%d", &y, &m, &d);
        if (got < 2 || m < 1 || m > 12)
            throw data_error("invalid month '" + text + "' (expected YYYY-MM or YYYY-MM-DD)");
        return MonthKey{y, m};
    }
};

/// Inclusive month range.
struct MonthWindow {
    MonthKey start;
    MonthKey end;

    [[nodiscard]] bool contains(MonthKey k) const { return start <= k && k <= end; }
};

}  // namespace lgdkit

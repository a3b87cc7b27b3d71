#pragma once

#include <algorithm>
#include <cstdint>
#include <cstdlib>
#include <functional>
#include <tuple>

namespace scsynth {

struct point {
    int x = 0;
    int y = 0;

    // member-order comparison; row-major code paths use yx_less instead
    friend auto operator<=>(const point&, const point&) = default;
};

// Canonical ordering is row-major: y first, then x.
inline bool yx_less(const point& a, const point& b) {
    return std::tie(a.y, a.x) < std::tie(b.y, b.x);
}

struct point_yx_less {
    bool operator()(const point& a, const point& b) const { return yx_less(a, b); }
};

inline bool xy_less(const point& a, const point& b) {
    return std::tie(a.x, a.y) < std::tie(b.x, b.y);
}

inline int manhattan(const point& a, const point& b) {
    return std::abs(a.x - b.x) + std::abs(a.y - b.y);
}

// Axis-aligned rectangle, inclusive bounds.
struct rect {
    int x0 = 0;
    int y0 = 0;
    int x1 = 0;
    int y1 = 0;

    friend bool operator==(const rect&, const rect&) = default;

    bool contains(const point& p) const {
        return p.x >= x0 && p.x <= x1 && p.y >= y0 && p.y <= y1;
    }

    bool contains_strictly(const point& p) const {
        return p.x > x0 && p.x < x1 && p.y > y0 && p.y < y1;
    }

    bool on_boundary(const point& p) const { return contains(p) && !contains_strictly(p); }

    long long area() const {
        return static_cast<long long>(x1 - x0) * static_cast<long long>(y1 - y0);
    }

    rect expanded(int dx0, int dy0, int dx1, int dy1) const {
        return rect{x0 - dx0, y0 - dy0, x1 + dx1, y1 + dy1};
    }

    void grow_to(const point& p) {
        x0 = std::min(x0, p.x);
        y0 = std::min(y0, p.y);
        x1 = std::max(x1, p.x);
        y1 = std::max(y1, p.y);
    }
};

template <typename It>
rect bounds_of(It first, It last) {
    rect r{first->x, first->y, first->x, first->y};
    for (It it = first; it != last; ++it) r.grow_to(*it);
    return r;
}

// Intersection of closed rectangles; empty() means no shared point at all.
struct rect_overlap {
    int x0, y0, x1, y1;
    bool empty() const { return x0 > x1 || y0 > y1; }
    long long area() const {
        if (empty()) return 0;
        return static_cast<long long>(x1 - x0) * static_cast<long long>(y1 - y0);
    }
};

inline rect_overlap intersect(const rect& a, const rect& b) {
    return rect_overlap{std::max(a.x0, b.x0), std::max(a.y0, b.y0),
                        std::min(a.x1, b.x1), std::min(a.y1, b.y1)};
}

}  // namespace scsynth

template <>
struct std::hash<scsynth::point> {
    size_t operator()(const scsynth::point& p) const {
        return std::hash<std::int64_t>()((static_cast<std::int64_t>(p.x) << 32) ^
                                         static_cast<std::uint32_t>(p.y));
    }
};

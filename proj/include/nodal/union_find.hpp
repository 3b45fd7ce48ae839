#pragma once

// Two-pass connected-component labeling on a row-major grid.

#include <cstdint>
#include <utility>
#include <vector>

namespace nodal {

class disjoint_sets {
public:
    explicit disjoint_sets(std::size_t n) : parent_(n)
    {
        for (std::size_t i = 0; i < n; ++i)
            parent_[i] = static_cast<std::int32_t>(i);
    }

    std::int32_t find(std::int32_t x)
    {
        while (parent_[x] != x) {
            parent_[x] = parent_[parent_[x]];
            x = parent_[x];
        }
        return x;
    }

    void unite(std::int32_t a, std::int32_t b)
    {
        a = find(a);
        b = find(b);
        if (a == b)
            return;
        // smaller index stays root
        if (b < a)
            std::swap(a, b);
        parent_[b] = a;
    }

    std::vector<std::int32_t>& raw() { return parent_; }

private:
    std::vector<std::int32_t> parent_;
};

struct labeling {
    std::vector<std::int32_t> labels; // -1 for unlabeled cells
    std::size_t count = 0;
};

enum class adjacency { four, eight };

/// Components of equal class values (class < 0 means "not part of any set").
/// Labels are numbered by row-major order of each component's first cell.
/// Periodic wrap-around is only supported with 4-adjacency.
template <class ClassOf>
labeling label_components(std::size_t nx, std::size_t ny, ClassOf&& class_of, adjacency adj = adjacency::four,
                          bool periodic = false)
{
    const std::size_t n = nx * ny;
    std::vector<std::int8_t> cls(n);
    for (std::size_t i = 0; i < n; ++i)
        cls[i] = static_cast<std::int8_t>(class_of(i));

    disjoint_sets ds(n);
    for (std::size_t iy = 0; iy < ny; ++iy) {
        for (std::size_t ix = 0; ix < nx; ++ix) {
            const std::size_t i = iy * nx + ix;
            if (cls[i] < 0)
                continue;
            if (ix > 0 && cls[i - 1] == cls[i])
                ds.unite(static_cast<std::int32_t>(i - 1), static_cast<std::int32_t>(i));
            if (iy > 0 && cls[i - nx] == cls[i])
                ds.unite(static_cast<std::int32_t>(i - nx), static_cast<std::int32_t>(i));
            if (adj == adjacency::eight && iy > 0) {
                if (ix > 0 && cls[i - nx - 1] == cls[i])
                    ds.unite(static_cast<std::int32_t>(i - nx - 1), static_cast<std::int32_t>(i));
                if (ix + 1 < nx && cls[i - nx + 1] == cls[i])
                    ds.unite(static_cast<std::int32_t>(i - nx + 1), static_cast<std::int32_t>(i));
            }
        }
    }
    if (periodic) {
        for (std::size_t iy = 0; iy < ny && nx > 1; ++iy) {
            const std::size_t a = iy * nx, b = iy * nx + nx - 1;
            if (cls[a] >= 0 && cls[a] == cls[b])
                ds.unite(static_cast<std::int32_t>(a), static_cast<std::int32_t>(b));
        }
        for (std::size_t ix = 0; ix < nx && ny > 1; ++ix) {
            const std::size_t a = ix, b = (ny - 1) * nx + ix;
            if (cls[a] >= 0 && cls[a] == cls[b])
                ds.unite(static_cast<std::int32_t>(a), static_cast<std::int32_t>(b));
        }
    }

    // roots are the smallest index of their set, so a root is met before
    // any other member in a row-major scan
    for (std::size_t i = 0; i < n; ++i)
        ds.raw()[i] = ds.find(static_cast<std::int32_t>(i));
    labeling out;
    auto& parent = ds.raw();
    for (std::size_t i = 0; i < n; ++i) {
        if (cls[i] < 0) {
            parent[i] = -1;
            continue;
        }
        if (parent[i] == static_cast<std::int32_t>(i))
            parent[i] = static_cast<std::int32_t>(out.count++);
        else
            parent[i] = parent[parent[i]]; // root already holds its label
    }
    out.labels = std::move(parent);
    return out;
}

} // namespace nodal

#pragma once

// Random masked 2D grids and a plain flood fill used as the reference for
// the cutting laboratory. Cells are row-major with 4-neighbour adjacency.

#include <cstddef>
#include <deque>
#include <random>
#include <vector>

namespace oracle {

struct Grid2 {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<bool> active;

    [[nodiscard]] std::vector<std::size_t> neighbours(std::size_t c) const
    {
        std::vector<std::size_t> out;
        const std::size_t r = c / cols;
        const std::size_t k = c % cols;
        auto push = [&](std::size_t n) {
            if (active[n]) {
                out.push_back(n);
            }
        };
        if (r > 0) {
            push(c - cols);
        }
        if (r + 1 < rows) {
            push(c + cols);
        }
        if (k > 0) {
            push(c - 1);
        }
        if (k + 1 < cols) {
            push(c + 1);
        }
        return out;
    }
};

/// Cells reachable from the unblocked sources through unblocked active cells.
inline std::vector<bool> flood(const Grid2& g, const std::vector<std::size_t>& sources,
                               const std::vector<bool>& blocked)
{
    std::vector<bool> seen(g.active.size(), false);
    std::deque<std::size_t> queue;
    for (std::size_t s : sources) {
        if (g.active[s] && !blocked[s] && !seen[s]) {
            seen[s] = true;
            queue.push_back(s);
        }
    }
    while (!queue.empty()) {
        const std::size_t c = queue.front();
        queue.pop_front();
        for (std::size_t n : g.neighbours(c)) {
            if (!blocked[n] && !seen[n]) {
                seen[n] = true;
                queue.push_back(n);
            }
        }
    }
    return seen;
}

/// Random obstacles, then everything outside the largest component is masked.
inline Grid2 random_connected_grid(std::mt19937_64& rng, std::size_t max_side)
{
    Grid2 g;
    g.rows = 2 + rng() % (max_side - 1);
    g.cols = 2 + rng() % (max_side - 1);
    const double density = std::uniform_real_distribution<double>(0.0, 0.35)(rng);
    g.active.assign(g.rows * g.cols, true);
    for (std::size_t c = 0; c < g.active.size(); ++c) {
        g.active[c] = std::uniform_real_distribution<double>(0.0, 1.0)(rng) >= density;
    }
    const std::vector<bool> none(g.active.size(), false);
    std::vector<bool> best;
    std::size_t best_size = 0;
    std::vector<bool> visited(g.active.size(), false);
    for (std::size_t c = 0; c < g.active.size(); ++c) {
        if (!g.active[c] || visited[c]) {
            continue;
        }
        const auto comp = flood(g, {c}, none);
        std::size_t size = 0;
        for (std::size_t i = 0; i < comp.size(); ++i) {
            if (comp[i]) {
                visited[i] = true;
                ++size;
            }
        }
        if (size > best_size) {
            best_size = size;
            best = comp;
        }
    }
    if (best_size < 2) {
        g.active.assign(g.rows * g.cols, true);
        return g;
    }
    g.active = best;
    return g;
}

/// Each active cell independently with probability p.
inline std::vector<std::size_t> random_cells(std::mt19937_64& rng, const Grid2& g, double p,
                                             const std::vector<bool>& exclude)
{
    std::vector<std::size_t> out;
    for (std::size_t c = 0; c < g.active.size(); ++c) {
        if (g.active[c] && !exclude[c] && std::uniform_real_distribution<double>(0.0, 1.0)(rng) < p) {
            out.push_back(c);
        }
    }
    return out;
}

inline std::vector<bool> mask_of(std::size_t n, const std::vector<std::size_t>& cells)
{
    std::vector<bool> m(n, false);
    for (std::size_t c : cells) {
        m[c] = true;
    }
    return m;
}

} // namespace oracle

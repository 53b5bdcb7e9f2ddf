#include "topo/persistence.hpp"

#include "topo/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>
#include <unordered_map>

namespace topo {

namespace {

constexpr std::uint64_t kVertexBits = 20;
constexpr std::uint64_t kMaxVertices = std::uint64_t{1} << kVertexBits;

std::uint64_t simplex_key(std::uint32_t a) { return a; }

std::uint64_t simplex_key(std::uint32_t a, std::uint32_t b) {
    return (std::uint64_t{1} << 60) | (std::uint64_t{a} << 40) | (std::uint64_t{b} << 20);
}

std::uint64_t simplex_key(std::uint32_t a, std::uint32_t b, std::uint32_t c) {
    return (std::uint64_t{2} << 60) | (std::uint64_t{a} << 40) | (std::uint64_t{b} << 20) | c;
}

std::uint64_t simplex_key(const Simplex& s) {
    switch (s.dim) {
        case 0: return simplex_key(s.vertices[0]);
        case 1: return simplex_key(s.vertices[0], s.vertices[1]);
        default: return simplex_key(s.vertices[0], s.vertices[1], s.vertices[2]);
    }
}

// Codimension-one faces of an edge or triangle.
int faces_of(const Simplex& s, std::uint64_t out[3]) {
    const auto& v = s.vertices;
    if (s.dim == 1) {
        out[0] = simplex_key(v[0]);
        out[1] = simplex_key(v[1]);
        return 2;
    }
    if (s.dim == 2) {
        out[0] = simplex_key(v[0], v[1]);
        out[1] = simplex_key(v[0], v[2]);
        out[2] = simplex_key(v[1], v[2]);
        return 3;
    }
    return 0;
}

struct UnionFind {
    std::vector<std::uint32_t> parent;

    explicit UnionFind(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0u); }

    std::uint32_t find(std::uint32_t x) {
        while (parent[x] != x) {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        return x;
    }
};

// Symmetric difference of two ascending index lists.
void add_column(std::vector<std::uint32_t>& col, const std::vector<std::uint32_t>& other,
                std::vector<std::uint32_t>& scratch) {
    scratch.clear();
    std::set_symmetric_difference(col.begin(), col.end(), other.begin(), other.end(),
                                  std::back_inserter(scratch));
    col.swap(scratch);
}

}  // namespace

bool filtration_less(const Simplex& a, const Simplex& b) noexcept {
    if (a.alpha != b.alpha) return a.alpha < b.alpha;
    if (a.dim != b.dim) return a.dim < b.dim;
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a.vertices[i] != b.vertices[i]) return a.vertices[i] < b.vertices[i];
    }
    return false;
}

void Filtration::validate() const {
    if (!(alpha_max > 0.0) || !std::isfinite(alpha_max)) {
        throw InvalidFiltrationError("alpha_max must be positive and finite");
    }
    if (n_vertices >= kMaxVertices) throw InvalidFiltrationError("too many vertices");
    std::unordered_map<std::uint64_t, std::size_t> position;
    position.reserve(simplices.size());
    double previous = 0.0;
    for (std::size_t i = 0; i < simplices.size(); ++i) {
        const Simplex& s = simplices[i];
        if (s.dim > 2) throw InvalidFiltrationError("simplex dimension above 2");
        if (!(s.alpha >= 0.0 && s.alpha <= alpha_max)) {
            throw InvalidFiltrationError("simplex value outside [0, alpha_max] at position " +
                                         std::to_string(i));
        }
        if (s.alpha < previous) {
            throw InvalidFiltrationError("simplex values not sorted at position " + std::to_string(i));
        }
        previous = s.alpha;
        for (std::size_t k = 0; k < s.size(); ++k) {
            if (s.vertices[k] >= n_vertices) throw InvalidFiltrationError("vertex index out of range");
            if (k > 0 && s.vertices[k - 1] >= s.vertices[k]) {
                throw InvalidFiltrationError("simplex vertices must be strictly ascending");
            }
        }
        std::uint64_t faces[3];
        const int nf = faces_of(s, faces);
        for (int f = 0; f < nf; ++f) {
            if (position.find(faces[f]) == position.end()) {
                throw InvalidFiltrationError("simplex at position " + std::to_string(i) +
                                             " precedes one of its faces");
            }
        }
        if (!position.emplace(simplex_key(s), i).second) {
            throw InvalidFiltrationError("duplicate simplex at position " + std::to_string(i));
        }
    }
}

Filtration build_witness_filtration(const DistanceMatrix& d_wl, double alpha_max) {
    const std::size_t n_w = d_wl.rows();
    const std::size_t n_l = d_wl.cols();
    if (n_w == 0 || n_l == 0) throw ShapeError("empty witness/landmark distance matrix");
    if (n_l < 2) throw ParameterError("witness filtration needs at least 2 landmarks");
    if (n_l >= kMaxVertices) throw ParameterError("too many landmarks");
    if (!(alpha_max > 0.0) || !std::isfinite(alpha_max)) {
        throw ParameterError("alpha_max must be positive and finite");
    }

    const double inf = std::numeric_limits<double>::infinity();
    std::vector<double> edge_alpha(n_l * n_l, inf);
    std::unordered_map<std::uint64_t, double> tri_alpha;

    std::vector<std::uint32_t> order(n_l);
    std::vector<double> dist(n_l);
    for (std::size_t w = 0; w < n_w; ++w) {
        for (std::size_t l = 0; l < n_l; ++l) dist[l] = d_wl(w, l);
        std::iota(order.begin(), order.end(), 0u);
        std::stable_sort(order.begin(), order.end(),
                         [&](std::uint32_t a, std::uint32_t b) { return dist[a] < dist[b]; });

        // Distance to the nearest landmark of w that is not in `members`.
        auto reference = [&](std::initializer_list<std::uint32_t> members) {
            for (std::uint32_t l : order) {
                if (std::find(members.begin(), members.end(), l) == members.end()) return dist[l];
            }
            return dist[order[0]];
        };
        // Only a prefix of w's landmark order can certify a k-simplex below
        // alpha_max: the reference never exceeds the (k+1)-th nearest distance.
        auto prefix = [&](std::size_t k) {
            const double bound = (n_l > k ? dist[order[k]] : dist[order[0]]) + alpha_max;
            std::size_t m = 0;
            while (m < n_l && dist[order[m]] <= bound) ++m;
            return m;
        };

        const std::size_t m2 = prefix(2);
        for (std::size_t i = 0; i < m2; ++i) {
            for (std::size_t j = i + 1; j < m2; ++j) {
                std::uint32_t a = order[i], b = order[j];
                if (a > b) std::swap(a, b);
                const double far = std::max(dist[a], dist[b]);
                const double value = std::max(0.0, far - reference({a, b}));
                if (value <= alpha_max) {
                    double& slot = edge_alpha[a * n_l + b];
                    slot = std::min(slot, value);
                }
            }
        }

        const std::size_t m3 = prefix(3);
        for (std::size_t i = 0; i < m3; ++i) {
            for (std::size_t j = i + 1; j < m3; ++j) {
                for (std::size_t k = j + 1; k < m3; ++k) {
                    std::uint32_t v[3] = {order[i], order[j], order[k]};
                    std::sort(v, v + 3);
                    const double far = std::max({dist[v[0]], dist[v[1]], dist[v[2]]});
                    const double value = std::max(0.0, far - reference({v[0], v[1], v[2]}));
                    if (value <= alpha_max) {
                        auto [it, inserted] = tri_alpha.try_emplace(simplex_key(v[0], v[1], v[2]), value);
                        if (!inserted) it->second = std::min(it->second, value);
                    }
                }
            }
        }
    }

    Filtration f;
    f.n_vertices = n_l;
    f.alpha_max = alpha_max;
    for (std::uint32_t v = 0; v < n_l; ++v) {
        Simplex s;
        s.vertices = {v, 0, 0};
        s.dim = 0;
        s.alpha = 0.0;
        f.simplices.push_back(s);
    }
    for (std::uint32_t a = 0; a < n_l; ++a) {
        for (std::uint32_t b = a + 1; b < n_l; ++b) {
            const double value = edge_alpha[a * n_l + b];
            if (value <= alpha_max) {
                Simplex s;
                s.vertices = {a, b, 0};
                s.dim = 1;
                s.alpha = value;
                f.simplices.push_back(s);
            }
        }
    }
    const auto mask = kMaxVertices - 1;
    for (const auto& [key, own] : tri_alpha) {
        const auto a = static_cast<std::uint32_t>((key >> 40) & mask);
        const auto b = static_cast<std::uint32_t>((key >> 20) & mask);
        const auto c = static_cast<std::uint32_t>(key & mask);
        const double value = std::max({own, edge_alpha[a * n_l + b], edge_alpha[a * n_l + c],
                                       edge_alpha[b * n_l + c]});
        if (value <= alpha_max) {
            Simplex s;
            s.vertices = {a, b, c};
            s.dim = 2;
            s.alpha = value;
            f.simplices.push_back(s);
        }
    }
    std::sort(f.simplices.begin(), f.simplices.end(), filtration_less);
    return f;
}

Barcode compute_barcode(const Filtration& filtration) {
    filtration.validate();
    const auto& simplices = filtration.simplices;
    const double alpha_max = filtration.alpha_max;

    Barcode barcode;
    barcode.alpha_max = alpha_max;

    std::unordered_map<std::uint64_t, std::uint32_t> edge_position;
    std::vector<std::uint32_t> edges;  // filtration positions of edges
    for (std::uint32_t i = 0; i < simplices.size(); ++i) {
        if (simplices[i].dim == 1) {
            edge_position.emplace(simplex_key(simplices[i]), i);
            edges.push_back(i);
        }
    }

    // Dimension 0: the reduced edge columns are equivalent to Kruskal merges.
    // Every vertex is born at its own alpha; the younger root dies.
    UnionFind uf(filtration.n_vertices);
    std::vector<double> vertex_birth(filtration.n_vertices, 0.0);
    std::vector<std::size_t> vertex_order(filtration.n_vertices, 0);
    for (std::uint32_t i = 0; i < simplices.size(); ++i) {
        if (simplices[i].dim == 0) {
            vertex_birth[simplices[i].vertices[0]] = simplices[i].alpha;
            vertex_order[simplices[i].vertices[0]] = i;
        }
    }
    std::vector<bool> positive_edge(simplices.size(), false);
    for (std::uint32_t e : edges) {
        const Simplex& s = simplices[e];
        std::uint32_t ra = uf.find(s.vertices[0]);
        std::uint32_t rb = uf.find(s.vertices[1]);
        if (ra == rb) {
            positive_edge[e] = true;
            continue;
        }
        if (vertex_order[ra] < vertex_order[rb]) std::swap(ra, rb);  // ra is younger
        barcode.intervals.push_back({vertex_birth[ra], s.alpha, 0});
        uf.parent[ra] = rb;
    }
    for (std::uint32_t v = 0; v < filtration.n_vertices; ++v) {
        if (uf.find(v) == v) barcode.intervals.push_back({vertex_birth[v], alpha_max, 0});
    }

    // Dimension 1: reduce triangle columns; the pivot of each non-zero
    // reduced column is the edge whose cycle the triangle kills.
    std::unordered_map<std::uint32_t, std::vector<std::uint32_t>> reduced_by_pivot;
    std::vector<bool> killed(simplices.size(), false);
    std::vector<std::uint32_t> column, scratch;
    for (std::uint32_t t = 0; t < simplices.size(); ++t) {
        const Simplex& s = simplices[t];
        if (s.dim != 2) continue;
        std::uint64_t faces[3];
        faces_of(s, faces);
        column.clear();
        for (auto face : faces) column.push_back(edge_position.at(face));
        std::sort(column.begin(), column.end());
        while (!column.empty()) {
            auto it = reduced_by_pivot.find(column.back());
            if (it == reduced_by_pivot.end()) break;
            add_column(column, it->second, scratch);
        }
        if (column.empty()) continue;
        const std::uint32_t pivot = column.back();
        if (!positive_edge[pivot]) throw InvalidFiltrationError("reduction pivot on a negative edge");
        killed[pivot] = true;
        barcode.intervals.push_back({simplices[pivot].alpha, s.alpha, 1});
        reduced_by_pivot.emplace(pivot, column);
    }
    for (std::uint32_t e : edges) {
        if (positive_edge[e] && !killed[e]) barcode.intervals.push_back({simplices[e].alpha, alpha_max, 1});
    }
    return barcode;
}

std::vector<BettiStep> betti_curve(const Barcode& barcode, int dim, double alpha_max) {
    std::vector<BettiStep> steps;
    if (!(alpha_max > 0.0)) return steps;

    std::vector<std::pair<double, int>> events;
    std::vector<double> cuts = {0.0, alpha_max};
    for (const auto& iv : barcode.intervals) {
        if (iv.dim != dim) continue;
        if (iv.birth > iv.death) throw ParameterError("interval with birth after death");
        const double b = std::clamp(iv.birth, 0.0, alpha_max);
        const double d = std::clamp(iv.death, 0.0, alpha_max);
        if (!(d > b)) continue;
        events.emplace_back(b, +1);
        events.emplace_back(d, -1);
        cuts.push_back(b);
        cuts.push_back(d);
    }
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
    std::sort(events.begin(), events.end());

    std::size_t e = 0;
    long count = 0;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        while (e < events.size() && events[e].first <= cuts[i]) count += events[e++].second;
        const auto c = static_cast<std::size_t>(count);
        if (!steps.empty() && steps.back().count == c) {
            steps.back().to = cuts[i + 1];
        } else {
            steps.push_back({cuts[i], cuts[i + 1], c});
        }
    }
    return steps;
}

}  // namespace topo

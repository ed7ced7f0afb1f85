#include "l2morse/group.hpp"

#include <cmath>
#include <cstdlib>
#include <stdexcept>

namespace l2morse {

std::string to_string(const GroupElement& g) {
    std::string s = "(";
    for (size_t i = 0; i < g.c.size(); ++i) {
        if (i) s += ",";
        s += std::to_string(g.c[i]);
    }
    return s + ")";
}

GroupModel GroupModel::lattice(int rank) {
    if (rank < 1) throw std::invalid_argument("group: lattice rank must be >= 1");
    return GroupModel(Kind::Lattice, rank, 0);
}

GroupModel GroupModel::cyclic(int order) {
    if (order < 1) throw std::invalid_argument("group: cyclic order must be >= 1");
    return GroupModel(Kind::Cyclic, 1, order);
}

GroupElement GroupModel::identity() const {
    return GroupElement{std::vector<std::int64_t>(static_cast<size_t>(rank_), 0)};
}

void GroupModel::check_shape(const GroupElement& g) const {
    if (g.c.size() != static_cast<size_t>(rank_))
        throw std::invalid_argument("group: element rank mismatch (got " +
                                    std::to_string(g.c.size()) + ", expected " +
                                    std::to_string(rank_) + ")");
    if (kind_ == Kind::Cyclic && (g.c[0] < 0 || g.c[0] >= order_))
        throw std::invalid_argument("group: cyclic element not reduced mod " +
                                    std::to_string(order_));
}

GroupElement GroupModel::make(std::vector<std::int64_t> coords) const {
    if (coords.size() != static_cast<size_t>(rank_))
        throw std::invalid_argument("group: coordinate count mismatch");
    if (kind_ == Kind::Cyclic) {
        std::int64_t r = coords[0] % order_;
        if (r < 0) r += order_;
        coords[0] = r;
    }
    return GroupElement{std::move(coords)};
}

GroupElement GroupModel::mul(const GroupElement& a, const GroupElement& b) const {
    check_shape(a);
    check_shape(b);
    std::vector<std::int64_t> out(a.c.size());
    for (size_t i = 0; i < out.size(); ++i) out[i] = a.c[i] + b.c[i];
    if (kind_ == Kind::Cyclic) out[0] %= order_;
    return GroupElement{std::move(out)};
}

GroupElement GroupModel::inverse(const GroupElement& g) const {
    check_shape(g);
    std::vector<std::int64_t> out(g.c.size());
    for (size_t i = 0; i < out.size(); ++i) out[i] = -g.c[i];
    if (kind_ == Kind::Cyclic && out[0] < 0) out[0] += order_;
    return GroupElement{std::move(out)};
}

GroupElement GroupModel::diff(const GroupElement& g, const GroupElement& h) const {
    return mul(g, inverse(h));
}

std::int64_t GroupModel::word_norm(const GroupElement& g) const {
    check_shape(g);
    if (kind_ == Kind::Cyclic) {
        std::int64_t r = g.c[0];
        return std::min(r, order_ - r);
    }
    std::int64_t n = 0;
    for (auto v : g.c) n += std::llabs(v);
    return n;
}

std::int64_t GroupModel::word_distance(const GroupElement& a, const GroupElement& b) const {
    return word_norm(diff(a, b));
}

std::int64_t GroupModel::box_norm(const GroupElement& g) const {
    check_shape(g);
    if (kind_ == Kind::Cyclic) return word_norm(g);
    std::int64_t n = 0;
    for (auto v : g.c) n = std::max<std::int64_t>(n, v < 0 ? -v : v);
    return n;
}

std::uint64_t GroupModel::ball_size(std::int64_t m) const {
    if (m < 0) return 0;
    if (kind_ == Kind::Cyclic) {
        // shorter-way-around ball saturates at the whole group
        std::uint64_t full = static_cast<std::uint64_t>(order_);
        std::uint64_t b = 1 + 2 * static_cast<std::uint64_t>(m);
        return std::min(b, full);
    }
    // l^1 ball in Z^d by dynamic programming over the rank.
    std::vector<std::uint64_t> cur(static_cast<size_t>(m) + 1, 1); // rank 0: 1 point
    for (int r = 1; r <= rank_; ++r) {
        std::vector<std::uint64_t> nxt(static_cast<size_t>(m) + 1, 0);
        for (std::int64_t budget = 0; budget <= m; ++budget) {
            std::uint64_t s = cur[static_cast<size_t>(budget)]; // last coord 0
            for (std::int64_t v = 1; v <= budget; ++v)
                s += 2 * cur[static_cast<size_t>(budget - v)];
            nxt[static_cast<size_t>(budget)] = s;
        }
        cur = std::move(nxt);
    }
    return cur[static_cast<size_t>(m)];
}

std::vector<GroupElement> GroupModel::box_elements(int r) const {
    if (r < 0) throw std::invalid_argument("group: negative box radius");
    std::vector<GroupElement> out;
    if (kind_ == Kind::Cyclic) {
        out.reserve(static_cast<size_t>(order_));
        for (std::int64_t v = 0; v < order_; ++v) out.push_back(GroupElement{{v}});
        return out;
    }
    // row-major over [-r, r]^d, which is exactly lex order
    std::vector<std::int64_t> cur(static_cast<size_t>(rank_), -r);
    const std::uint64_t total = folner_size(r);
    out.reserve(total);
    while (true) {
        out.push_back(GroupElement{cur});
        int i = rank_ - 1;
        while (i >= 0 && cur[static_cast<size_t>(i)] == r) {
            cur[static_cast<size_t>(i)] = -r;
            --i;
        }
        if (i < 0) break;
        ++cur[static_cast<size_t>(i)];
    }
    return out;
}

FolnerBox GroupModel::folner_box(int k) const {
    if (k < 0) throw std::invalid_argument("group: negative Folner index");
    return FolnerBox{k, box_elements(k)};
}

std::uint64_t GroupModel::folner_size(int k) const {
    if (kind_ == Kind::Cyclic) return static_cast<std::uint64_t>(order_);
    std::uint64_t n = 1;
    for (int i = 0; i < rank_; ++i) n *= static_cast<std::uint64_t>(2 * k + 1);
    return n;
}

TileWindow::TileWindow(GroupModel group, int radius) : group_(group), radius_(radius) {
    if (radius < 0) throw std::invalid_argument("window: negative radius");
    if (group_.kind() == GroupModel::Kind::Cyclic) {
        count_ = group_.order();
    } else {
        std::uint64_t n = group_.folner_size(radius);
        if (n > (1ull << 31))
            throw std::runtime_error("window: tile count overflow");
        count_ = static_cast<int>(n);
    }
}

GroupElement TileWindow::at(int idx) const {
    if (idx < 0 || idx >= count_) throw std::out_of_range("window: tile index");
    if (group_.kind() == GroupModel::Kind::Cyclic)
        return GroupElement{{static_cast<std::int64_t>(idx)}};
    const int d = group_.rank();
    const std::int64_t side = 2 * static_cast<std::int64_t>(radius_) + 1;
    std::vector<std::int64_t> c(static_cast<size_t>(d));
    std::int64_t rem = idx;
    for (int i = d - 1; i >= 0; --i) {
        c[static_cast<size_t>(i)] = rem % side - radius_;
        rem /= side;
    }
    return GroupElement{std::move(c)};
}

int TileWindow::index(const GroupElement& g) const {
    if (g.c.size() != static_cast<size_t>(group_.rank())) return -1;
    if (group_.kind() == GroupModel::Kind::Cyclic) {
        if (g.c[0] < 0 || g.c[0] >= group_.order()) return -1;
        return static_cast<int>(g.c[0]);
    }
    const std::int64_t side = 2 * static_cast<std::int64_t>(radius_) + 1;
    std::int64_t idx = 0;
    for (auto v : g.c) {
        if (v < -radius_ || v > radius_) return -1;
        idx = idx * side + (v + radius_);
    }
    return static_cast<int>(idx);
}

} // namespace l2morse

#pragma once
#include <memory>
#include <string>
#include <vector>

#include "l2morse/group.hpp"

namespace l2morse {

// One boundary incidence of the base complex: the k-cell `cell` has the
// (k-1)-cell `face` in its boundary with the given sign, where the face's lift
// sits in the tile shifted by `offset` relative to the cell's tile.
struct Incidence {
    int cell = 0;
    int face = 0;
    int sign = 0;                       // +1 or -1
    std::vector<std::int64_t> offset;   // deck offset, length = offset_dim
};

// Finite weighted CW quotient complex with deck offsets on its boundary maps.
// Degrees run 0..dim. Weights are the diagonal of the inner product, one
// positive number per base cell, repeated G-invariantly over the cover.
class BaseComplex {
public:
    int dim() const { return static_cast<int>(counts_.size()) - 1; }
    int offset_dim() const { return offset_dim_; }
    int cells(int k) const;                       // m_k (0 outside 0..dim)
    const std::vector<double>& weights(int k) const;
    // incidences of degree k (boundary of k-cells into (k-1)-cells), k >= 1
    const std::vector<Incidence>& incidences(int k) const;
    // Euler characteristic of the quotient.
    long long euler() const;
    // Max word-norm over all offsets: the propagation radius of the coboundary.
    std::int64_t offset_radius(const GroupModel& G) const;
    std::string name() const { return name_; }

    // p vertices and p edges on a circle; the last edge closes up through deck
    // offset +1. Offsets are 1-dimensional.
    static BaseComplex circle(int p);
    // p*q square CW structure on the torus; wrap-around edges/squares carry the
    // two lattice offsets. Offsets are 2-dimensional.
    static BaseComplex torus(int p, int q);
    // Text format, one record per line ('#' comments):
    //   cell k id weight
    //   bnd  k cell_id face_id sign o1 [o2 ...]
    // Rejects on the first malformed/dangling record and verifies dd = 0.
    static BaseComplex from_file(const std::string& path);
    static BaseComplex parse(const std::string& text, const std::string& origin);

    // uniform per-degree reweighting helper (builtin bases keep structure)
    void set_degree_weight(int k, double w);

private:
    void validate_and_finalize(const std::string& origin);

    std::string name_;
    int offset_dim_ = 1;
    std::vector<int> counts_;                        // m_0..m_dim
    std::vector<std::vector<double>> weights_;       // per degree
    std::vector<std::vector<Incidence>> incidences_; // index k holds boundary of k-cells
};

// A materialized finite piece of the cover: every tile gK for g in the window.
// Cover k-cells are ordered tile-major (tiles lex-sorted, base cells in base
// order inside each tile), so cell index = tile_index * m_k + base_id.
class CoverComplex {
public:
    CoverComplex(BaseComplex base, GroupModel group, int window_radius,
                 std::uint64_t max_cells = 50'000'000);

    const BaseComplex& base() const { return base_; }
    const GroupModel& group() const { return group_; }
    const TileWindow& window() const { return window_; }
    int dim() const { return base_.dim(); }
    int tile_cells(int k) const { return base_.cells(k); }
    std::uint64_t total_cells(int k) const {
        return static_cast<std::uint64_t>(window_.count()) *
               static_cast<std::uint64_t>(base_.cells(k));
    }
    // propagation radius of the coboundary on this cover
    int coboundary_radius() const { return static_cast<int>(radius0_); }

private:
    BaseComplex base_;
    GroupModel group_;
    TileWindow window_;
    std::int64_t radius0_;
};

using CoverPtr = std::shared_ptr<const CoverComplex>;

CoverPtr assemble_cover(BaseComplex base, GroupModel group, int window_radius,
                        std::uint64_t max_cells = 50'000'000);

} // namespace l2morse

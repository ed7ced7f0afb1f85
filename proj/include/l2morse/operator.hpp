#pragma once
#include <Eigen/Dense>
#include <functional>
#include <map>
#include <memory>
#include <ostream>
#include <vector>

#include "l2morse/complex.hpp"
#include "l2morse/tile_function.hpp"

namespace l2morse {

// Finite-propagation operator between cochain degrees of a cover, materialized
// on the cover's tile window as dense blocks in the raw cell basis.
//
// Bookkeeping carried with the matrix data:
//  * radius: propagation bound in the word metric -- blocks vanish beyond it.
//  * margin: two-sided exactness radius. Every stored block A[g,h] with
//    box_norm(g) <= margin or box_norm(h) <= margin equals the corresponding
//    block of the infinite-cover operator, and those row/column slabs are
//    completely stored. Quantities read inside the margin (traces, rho_2
//    slabs) are therefore exact values of the infinite model.
//  * invariant mode: G-invariant operators store one block per deck offset;
//    blocks for arbitrary tile pairs are derived on demand, represent the
//    infinite operator faithfully, and the margin is the whole window.
//
// Composition: radius adds, margin shrinks to min(mA - rB, mB - rA). Adjoints
// are taken in the weighted inner product, so raw entries pick up weight
// ratios; the orthonormalized entry of a block is sqrt(w_r/w_c) times the raw
// entry, and all norms/traces below are computed in that orthonormal basis.
class WindowedOperator {
public:
    static constexpr int kFullMargin = 1 << 28;

    WindowedOperator() = default;

    // --- constructors -----------------------------------------------------
    static WindowedOperator zero(CoverPtr cover, int src_deg, int tgt_deg);
    static WindowedOperator identity(CoverPtr cover, int deg);
    // deck translation by `offset` acting on degree-k cochains
    static WindowedOperator deck_shift(CoverPtr cover, int deg, const GroupElement& offset);
    // diagonal operator: cell (id in tile g) scaled by values(g, id). The
    // invariant flag asserts values do not depend on g (callers certify).
    static WindowedOperator diagonal(CoverPtr cover, int deg,
                                     const std::function<double(const GroupElement&, int)>& values,
                                     bool invariant);
    // invariant operator from explicit offset blocks (tests, shifts, ...)
    static WindowedOperator from_offsets(CoverPtr cover, int src_deg, int tgt_deg,
                                         std::map<GroupElement, Eigen::MatrixXd> offsets);
    // general operator from explicit tile-indexed blocks with caller-declared
    // radius/margin certificates
    static WindowedOperator from_blocks(CoverPtr cover, int src_deg, int tgt_deg,
                                        std::map<std::pair<int, int>, Eigen::MatrixXd> blocks,
                                        int radius, int margin);

    // --- shape ------------------------------------------------------------
    const CoverPtr& cover() const { return cover_; }
    int src_deg() const { return src_deg_; }
    int tgt_deg() const { return tgt_deg_; }
    bool square() const { return src_deg_ == tgt_deg_; }
    int radius() const { return radius_; }
    int margin() const { return margin_; }
    bool is_invariant() const { return invariant_; }
    int rows_per_tile() const { return cover_->tile_cells(tgt_deg_); }
    int cols_per_tile() const { return cover_->tile_cells(src_deg_); }

    // Block from source tile h to target tile g; nullptr when structurally
    // zero or not materialized. Valid until the operator is mutated.
    const Eigen::MatrixXd* block(const GroupElement& g, const GroupElement& h) const;
    const std::map<GroupElement, Eigen::MatrixXd>& offset_blocks() const;
    const std::map<std::pair<int, int>, Eigen::MatrixXd>& indexed_blocks() const {
        return blocks_;
    }

    bool in_margin(const GroupElement& g) const {
        return cover_->group().box_norm(g) <= margin_;
    }

    // --- algebra ----------------------------------------------------------
    friend WindowedOperator compose(const WindowedOperator& A, const WindowedOperator& B);
    friend WindowedOperator adjoint(const WindowedOperator& A);
    friend WindowedOperator add(const WindowedOperator& A, const WindowedOperator& B);
    friend WindowedOperator subtract(const WindowedOperator& A, const WindowedOperator& B);
    WindowedOperator scaled(double c) const;

    // --- piecewise quantities (all orthonormal-basis, exact in margin) -----
    // Hilbert-Schmidt norm of the column slab A 1_{gK}, per tile.
    TileFunction rho2() const;
    // diagonal-block trace per tile
    TileFunction piecewise_trace() const;
    // absolute diagonal sum per tile in the weight-normalized cell basis
    TileFunction rho1() const;
    // HS pairing of column slabs <A 1_gK, B 1_gK>, per tile
    friend TileFunction rho2_pairing(const WindowedOperator& A, const WindowedOperator& B);

    // Certified upper bound on the operator norm: sqrt(max abs row sum * max
    // abs column sum) of the orthonormalized entries, taken over completely
    // stored slabs (Gershgorin-type, exact for invariant operators).
    double opnorm_bound() const;
    // Gershgorin enclosure of the spectrum for square self-adjoint operators.
    std::pair<double, double> gershgorin_interval() const;
    // max orthonormalized |entry| and the per-distance envelope (d -> max)
    double max_abs_entry() const;
    std::vector<double> distance_envelope() const;

    // largest absolute orthonormalized entry of (A - A*) over margin pairs
    double self_adjoint_defect() const;

    // Writes every materialized block as
    //   blk k g... h... rows cols
    // followed by the row-major entries, 17 significant digits.
    void dump(std::ostream& os) const;

private:
    void require_same_space(const WindowedOperator& o) const;
    friend class OperatorApplier;

    CoverPtr cover_;
    int src_deg_ = 0, tgt_deg_ = 0;
    int radius_ = 0;
    int margin_ = 0;
    bool invariant_ = false;
    std::map<GroupElement, Eigen::MatrixXd> offsets_;       // invariant mode
    std::map<std::pair<int, int>, Eigen::MatrixXd> blocks_; // general mode
};

// Cochain complex of coboundaries on a cover (raw basis: entries are the
// incidence signs, so d[k+1] d[k] = 0 holds exactly in floating point).
struct DifferentialComplex {
    CoverPtr cover;
    std::vector<WindowedOperator> d; // d[k]: degree k -> k+1
    // Certified global bounds on spec(laplacian(k)), one per degree, when the
    // construction can vouch for them beyond the window (empty otherwise).
    std::vector<double> lam_bound;

    // d_k^* d_k + d_{k-1} d_{k-1}^* (terms dropped outside 0..dim)
    WindowedOperator laplacian(int k) const;
};

DifferentialComplex assemble_coboundary(CoverPtr cover);
WindowedOperator coboundary(CoverPtr cover, int k);

// Folner-averaged commutator defect Tr(AB) - Tr(BA) with the certified
// boundary/volume bound and a power-law fit of the decay.
struct CommutatorReport {
    std::vector<int> ks;
    std::vector<double> defects;
    std::vector<double> bounds;
    PowerFit fit;
    double norm_product = 0.0; // opnorm_bound(A) * opnorm_bound(B)
};
CommutatorReport trace_commutator_defect(const WindowedOperator& A,
                                         const WindowedOperator& B, int k_min,
                                         int k_max);

// Cuts an operator to the half space: keeps the rows of tiles whose first
// coordinate is <= 0 and zeroes the rest. The result is exact on the whole
// window (the indicator is globally known), so margin = window radius - r.
// This is the canonical way to build operators with a genuine trace
// commutator defect concentrated along the cut.
WindowedOperator halfline_cut(const WindowedOperator& A);

// Dense matrix of the whole materialized window in the orthonormal cell
// basis, tiles in window order (row/col = tile_index * m + cell). Brute-force
// oracle helper; the window edge truncates the infinite operator.
Eigen::MatrixXd to_dense_on(const WindowedOperator& A);

// Seeded test operators with entries in (-1, 1), filled in a fixed canonical
// order (offsets lex, then row-major) so every run sees the same matrices.
class SplitMix64;
WindowedOperator random_invariant_operator(CoverPtr cover, int src_deg, int tgt_deg,
                                           int radius, SplitMix64& rng);
// general-mode variant; exact on the whole window, margin = R - radius
WindowedOperator random_general_operator(CoverPtr cover, int src_deg, int tgt_deg,
                                         int radius, SplitMix64& rng);

// Gaussian-envelope classification: fit max-entry magnitude per word-distance
// band against C1 exp(-C2 d^2).
struct DecayFit {
    double C1 = 0.0;
    double C2 = 0.0;
    double r2 = 1.0;
    bool gaussian_class = false;
    std::vector<double> envelope; // band maxima, index = distance
};
DecayFit decay_fit(const WindowedOperator& A);

} // namespace l2morse

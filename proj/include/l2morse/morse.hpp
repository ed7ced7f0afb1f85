#pragma once
#include <string>
#include <vector>

#include "l2morse/operator.hpp"

namespace l2morse {

class DiscreteMorseData;
DiscreteMorseData make_zigzag_morse(CoverPtr cover, int c);
DiscreteMorseData make_quasiperiodic_morse(CoverPtr cover, double alpha,
                                           double amplitude);
DiscreteMorseData morse_from_file(CoverPtr cover, const std::string& path);

// Real values on the cells of a materialized cover. Generated patterns carry
// certificates valid on the whole infinite cover (value range and the largest
// |f(face) - f(cell)| over incidences); values read from a file are only
// window evidence.
class CellFunction {
public:
    const CoverPtr& cover() const { return cover_; }
    bool invariant() const { return invariant_; }
    double at(int k, int tile_idx, int cell) const;
    double lo() const { return lo_; }
    double hi() const { return hi_; }
    double gap_bound() const { return gap_bound_; }
    bool certificates_global() const { return global_; }

    // one value per base cell, repeated over every tile
    static CellFunction invariant_from_base(CoverPtr cover,
                                            std::vector<std::vector<double>> base_vals);
    // explicit values per cover cell, indexed [k][tile*m_k + id]
    static CellFunction from_values(CoverPtr cover,
                                    std::vector<std::vector<double>> vals);

private:
    friend class DiscreteMorseData;
    friend DiscreteMorseData make_quasiperiodic_morse(CoverPtr, double, double);

    CoverPtr cover_;
    bool invariant_ = false;
    bool global_ = false;
    double lo_ = 0.0, hi_ = 0.0, gap_bound_ = 0.0;
    std::vector<std::vector<double>> base_;  // invariant storage
    std::vector<std::vector<double>> vals_;  // per-cover-cell storage
};

// The two inequality margins a discrete Morse function certifies. Both govern
// the Witten localization rates, so they are reported with every build.
struct MorseGaps {
    double min_matched = 0.0; // min f(facet) - f(cofacet) over matched pairs
    double min_regular = 0.0; // min f(cofacet) - f(facet) over the rest
};

// A discrete Morse function together with its induced matching between k- and
// (k+1)-cells of the cover.
class DiscreteMorseData {
public:
    const CellFunction& f() const { return f_; }
    const CoverPtr& cover() const { return f_.cover(); }
    bool invariant() const { return f_.invariant(); }

    // cover-cell index of the matched (k+1)-cell, -1 when unmatched
    int matched_up(int k, int cover_cell) const;
    int matched_down(int k, int cover_cell) const;
    bool is_critical(int k, int cover_cell) const;

    // per-tile number of critical k-cells (a constant function for invariant
    // patterns, a window function otherwise)
    TileFunction critical_count(int k) const;

    // Checks the Forman conditions on every incidence with both cells
    // materialized: matched pairs need f(cofacet) <= f(facet); every other
    // incidence must strictly increase; matched cells must be incident.
    // Throws naming the offending cell, returns the two gaps otherwise.
    MorseGaps validate() const;

private:
    friend DiscreteMorseData make_zigzag_morse(CoverPtr, int);
    friend DiscreteMorseData make_quasiperiodic_morse(CoverPtr, double, double);
    friend DiscreteMorseData morse_from_file(CoverPtr, const std::string&);

    CellFunction f_;
    // invariant flavor: per base cell; general flavor: per cover cell
    std::vector<std::vector<int>> up_;   // degree k -> partner id or -1
    std::vector<std::vector<int>> down_; // degree k -> partner id or -1
};

// Deck-invariant zig-zag pattern on a circular base: exactly c critical
// vertices and c critical edges per tile, the rest matched in-tile.
DiscreteMorseData make_zigzag_morse(CoverPtr cover, int c);

// Tile-dependent pattern on the 3-cell circular base: each tile carries the
// 1-critical-pair variant when frac(alpha * sum(g)) < 1/2 and a
// 2-critical-pair variant otherwise, with all values shifted by
// amplitude * frac(alpha * sum(g)). amplitude must stay in [0, 0.6] so the
// cross-tile inequalities hold for every tile of the infinite cover.
DiscreteMorseData make_quasiperiodic_morse(CoverPtr cover, double alpha,
                                           double amplitude);

// Text format, one record per line ('#' comments):
//   f     k id o1 .. od value
//   match k id o1 .. od id2 p1 .. pd     (second cell has degree k+1)
// Every materialized cell needs a value; matches must pair distinct cells at
// adjacent degrees inside the window. Errors carry the line number.
DiscreteMorseData morse_from_file(CoverPtr cover, const std::string& path);

// d_t = exp(-tF) d exp(tF): every coboundary entry is scaled by
// exp(t (f(source) - f(target))), one exponential per incidence. Throws when
// t * (hi - lo) > 300 (exp overflow risk). The result carries certified
// per-degree spectral bounds whenever f's certificates are global.
DifferentialComplex witten_deform(const DifferentialComplex& D,
                                  const CellFunction& f, double t);

} // namespace l2morse
